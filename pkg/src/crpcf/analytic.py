"""Closed-form throughput of PCF and CR-PCF, plus the payload-length optimizer."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import (ProtocolParams, PuTrafficModel, exposure_window, frame_tx_time,
                   periodic_duration_crpcf, periodic_duration_pcf)


@dataclass(frozen=True)
class AnalyticReport:
    t_payload: float
    t_total: float
    throughput: float
    expected_rounds: float | None = None
    switch_count: float | None = None
    gamma: float | None = None
    mean_free_channels: float | None = None
    survival_prob: float | None = None


def pcf_throughput(params: ProtocolParams) -> AnalyticReport:
    p = params
    lm = p.num_sm * p.packets_per_sm
    t_payload = lm * frame_tx_time(p.payload_len, p.rate)
    t_total = (frame_tx_time(p.beacon_len, p.rate) + p.sifs
               + lm * periodic_duration_pcf(p) + frame_tx_time(p.poll_len, p.rate))
    return AnalyticReport(t_payload=t_payload, t_total=t_total, throughput=t_payload / t_total)


def crpcf_throughput(params: ProtocolParams, pu: PuTrafficModel) -> AnalyticReport:
    """Mean-field CR-PCF model; the round count is kept fractional."""
    p = params
    lm = p.num_sm * p.packets_per_sm
    gamma = pu.gamma()
    n = p.num_supp_channels * gamma
    survival = math.exp(-pu.off_rate * exposure_window(p))
    rounds = lm / (n * survival + 1)
    switches = rounds * 2 * n
    t_total = (frame_tx_time(p.beacon_len, p.rate) + p.tau_sense
               + rounds * periodic_duration_crpcf(p) + frame_tx_time(p.poll_len, p.rate))
    t_payload = lm * frame_tx_time(p.payload_len, p.rate)
    return AnalyticReport(
        t_payload=t_payload,
        t_total=t_total,
        throughput=t_payload / t_total,
        expected_rounds=rounds,
        switch_count=switches,
        gamma=gamma,
        mean_free_channels=n,
        survival_prob=survival,
    )


class OptimalPayload(NamedTuple):
    payload_len: int
    throughput: float
    at_boundary: bool


_INV_PHI = (math.sqrt(5) - 1) / 2


def optimal_payload(params: ProtocolParams, pu: PuTrafficModel, x_range=(64, 65536),
                    coarse_points: int = 256) -> OptimalPayload:
    """Integer payload length in ``x_range`` maximizing CR-PCF throughput.

    Throughput is not unimodal over wide ranges: once the survival factor
    vanishes it creeps back up towards the single-channel curve. A log-spaced
    coarse scan therefore picks the bracket first, then golden-section search
    over the integers narrows it and the last few candidates are scanned.
    ``at_boundary`` is set when the best length is an end of the range.
    """
    lo, hi = int(x_range[0]), int(x_range[1])
    if lo < 1 or hi < lo:
        raise ValueError(f"x_range must satisfy 1 <= min <= max, got {x_range!r}")

    cache: dict[int, float] = {}

    def s(x: int) -> float:
        if x not in cache:
            cache[x] = crpcf_throughput(params.replace(payload_len=x), pu).throughput
        return cache[x]

    grid = sorted({lo, hi, *(int(round(v)) for v in np.geomspace(lo, hi, coarse_points))})
    i = max(range(len(grid)), key=lambda j: (s(grid[j]), -grid[j]))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]

    while b - a > 4:
        c = b - round(_INV_PHI * (b - a))
        d = a + round(_INV_PHI * (b - a))
        if s(c) < s(d):
            a = c
        else:
            b = d
    best = max(range(a, b + 1), key=lambda x: (s(x), -x))
    return OptimalPayload(best, s(best), best in (lo, hi))
