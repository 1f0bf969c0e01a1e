"""Round-synchronous simulation of PCF and CR-PCF collection cycles."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import (ProtocolParams, PuTrafficModel, exposure_window, frame_tx_time,
                   periodic_duration_crpcf, periodic_duration_pcf)
from .puchannel import DEDICATED_CHANNEL, make_channels
from .scheduler import LcfsQueue, RoundAllocation, SmState


class Protocol(str, enum.Enum):
    PCF = "pcf"
    CRPCF = "crpcf"


@dataclass(frozen=True)
class SimConfig:
    params: ProtocolParams = field(default_factory=ProtocolParams)
    pu: PuTrafficModel = field(default_factory=PuTrafficModel)
    seed: int = 0
    protocol: Protocol = Protocol.CRPCF

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol(self.protocol))
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


@dataclass(frozen=True)
class RoundTrace:
    """Snapshot for one round: completions before the allocation, and the allocation."""

    completed_before: tuple[int, ...]
    allocation: RoundAllocation
    successes: tuple[bool, ...]


@dataclass
class SimReport:
    total_time: float
    payload_time: float
    throughput: float
    rounds_executed: int
    switch_count: int
    retransmissions: int
    fairness_spread: list[int]
    packets_delivered: int
    trace: list[RoundTrace] | None = None


def simulate_pcf(config: SimConfig, record_trace: bool = False) -> SimReport:
    """Poll every SM once per sweep on the dedicated channel until L sweeps are done."""
    p = config.params
    lm = p.num_sm * p.packets_per_sm
    completed = [0] * p.num_sm
    spread = []
    trace = [] if record_trace else None
    rounds = 0
    for _ in range(p.packets_per_sm):
        for sm in range(p.num_sm):
            if trace is not None:
                trace.append(RoundTrace(tuple(completed), RoundAllocation(rounds, ((sm, 0),)), (True,)))
            completed[sm] += 1
            rounds += 1
            # polled prefix of the sweep is one packet ahead until the sweep closes
            spread.append(0 if sm == p.num_sm - 1 else 1)

    t_period = periodic_duration_pcf(p)
    total_time = (frame_tx_time(p.beacon_len, p.rate) + p.sifs
                  + rounds * t_period + frame_tx_time(p.poll_len, p.rate))
    payload_time = lm * frame_tx_time(p.payload_len, p.rate)
    return SimReport(
        total_time=total_time,
        payload_time=payload_time,
        throughput=payload_time / total_time,
        rounds_executed=rounds,
        switch_count=0,
        retransmissions=0,
        fairness_spread=spread,
        packets_delivered=sum(completed),
        trace=trace,
    )


def simulate_crpcf(config: SimConfig, record_trace: bool = False) -> SimReport:
    """Sense, allocate, poll, switch, upload in parallel; repeat until all packets land."""
    p, pu = config.params, config.pu
    lm = p.num_sm * p.packets_per_sm
    channels = make_channels(p.num_supp_channels, pu, config.seed)
    sms = [SmState(i) for i in range(p.num_sm)]
    queue = LcfsQueue(sms, p.packets_per_sm)

    t_period = periodic_duration_crpcf(p)
    window = exposure_window(p)
    # round k senses over [beacon + k*T, beacon + k*T + tau_sense]; decisions use the end instant
    first_sense_end = frame_tx_time(p.beacon_len, p.rate) + p.tau_sense

    spread = []
    trace = [] if record_trace else None
    rounds = switches = retx = delivered = most_completed = 0
    while delivered < lm:
        t_sensed = first_sense_end + rounds * t_period
        free = [DEDICATED_CHANNEL]
        free.extend(ch.channel_id for ch in channels[1:] if ch.is_free_at(t_sensed))

        before = tuple(s.packets_completed for s in sms) if trace is not None else None
        alloc = queue.allocate(free, round_index=rounds)

        outcomes = []
        for sm_id, ch_id in alloc.assignments:
            sm = sms[sm_id]
            sm.assigned_channel = ch_id
            if ch_id != DEDICATED_CHANNEL:
                # out to the supplementary channel and back to H_0
                sm.switch_count += 2
                switches += 2
            ok = channels[ch_id].off_survives(t_sensed, window)
            outcomes.append(ok)
            if ok:
                sm.packets_completed += 1
                delivered += 1
                most_completed = max(most_completed, sm.packets_completed)
            else:
                retx += 1
            sm.assigned_channel = None

        queue.commit()
        rounds += 1
        spread.append(most_completed - queue.least_completed())
        if trace is not None:
            trace.append(RoundTrace(before, alloc, tuple(outcomes)))

    total_time = (frame_tx_time(p.beacon_len, p.rate) + p.tau_sense
                  + rounds * t_period + frame_tx_time(p.poll_len, p.rate))
    payload_time = lm * frame_tx_time(p.payload_len, p.rate)
    return SimReport(
        total_time=total_time,
        payload_time=payload_time,
        throughput=payload_time / total_time,
        rounds_executed=rounds,
        switch_count=switches,
        retransmissions=retx,
        fairness_spread=spread,
        packets_delivered=delivered,
        trace=trace,
    )


def simulate(config: SimConfig, record_trace: bool = False) -> SimReport:
    if config.protocol is Protocol.PCF:
        return simulate_pcf(config, record_trace)
    return simulate_crpcf(config, record_trace)


SUMMARY_FIELDS = ("total_time", "payload_time", "throughput", "rounds_executed",
                  "switch_count", "retransmissions")


@dataclass(frozen=True)
class FieldSummary:
    mean: float
    std: float
    min: float
    max: float


def replicate_seed(master_seed: int, index: int) -> int:
    """64-bit seed for replicate ``index`` of a run keyed by ``master_seed``."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(2**32 + index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def summarize(reports) -> dict[str, FieldSummary]:
    out = {}
    for name in SUMMARY_FIELDS:
        vals = np.array([getattr(r, name) for r in reports], dtype=float)
        out[name] = FieldSummary(float(vals.mean()), float(vals.std()), float(vals.min()), float(vals.max()))
    return out


def run_replications(config: SimConfig, num_seeds: int, n_jobs: int | None = None) -> dict[str, FieldSummary]:
    """Run ``num_seeds`` independent replicates and aggregate every scalar report field.

    ``std`` is the population standard deviation over replicates.
    """
    if num_seeds < 1:
        raise ValueError(f"num_seeds must be >= 1, got {num_seeds}")
    configs = [replace_seed(config, replicate_seed(config.seed, i)) for i in range(num_seeds)]
    if n_jobs in (None, 1):
        reports = [simulate(c) for c in configs]
    else:
        from joblib import Parallel, delayed

        reports = Parallel(n_jobs=n_jobs)(delayed(simulate)(c) for c in configs)
    return summarize(reports)


def replace_seed(config: SimConfig, seed: int) -> SimConfig:
    return SimConfig(config.params, config.pu, seed, config.protocol)
