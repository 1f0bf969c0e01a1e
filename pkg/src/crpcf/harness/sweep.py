"""Parameter sweeps comparing the analytic model with simulation."""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..analytic import crpcf_throughput, pcf_throughput
from ..sim import Protocol, SimConfig, replicate_seed, simulate

log = logging.getLogger(__name__)

VARIABLES = ("M", "L", "N", "X", "gamma")
_PARAM_FIELD = {"M": "num_sm", "L": "packets_per_sm", "N": "num_supp_channels", "X": "payload_len"}
_INTEGRAL = {"M", "L", "N", "X"}

COLUMNS = (
    "sweep_value",
    "pcf_S_analytic",
    "pcf_S_sim",
    "crpcf_S_analytic",
    "crpcf_S_sim_mean",
    "crpcf_S_sim_std",
    "switch_analytic",
    "switch_sim_mean",
    "rounds_sim_mean",
    "retx_sim_mean",
)
ANALYTIC_COLUMNS = frozenset({"pcf_S_analytic", "crpcf_S_analytic", "switch_analytic"})
SIM_COLUMNS = frozenset(COLUMNS[1:]) - ANALYTIC_COLUMNS

FIGURE_VARIABLE = {8: "M", 9: "L", 10: "N", 11: "X", 12: "gamma"}
PRESET_VALUES = {
    "M": list(range(100, 1001, 100)),
    "L": list(range(5, 51, 5)),
    "N": list(range(1, 26)),
    "X": sorted({int(round(128 * 2 ** (k / 4))) for k in range(29)}),
    "gamma": [round(0.1 * k, 1) for k in range(1, 10)],
}


class SweepError(ValueError):
    def __init__(self, message, key="sweep_values"):
        super().__init__(message)
        self.key = key


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    base: SimConfig = field(default_factory=SimConfig)
    num_seeds: int = 20
    outputs: frozenset = frozenset(COLUMNS[1:])

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise SweepError(f"sweep_variable must be one of {VARIABLES}, got {self.variable!r}",
                             "sweep_variable")
        values = tuple(self.values)
        if not values:
            raise SweepError("sweep_values must be non-empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise SweepError("sweep_values must be strictly increasing")
        if self.variable == "gamma":
            if not all(0 < v < 1 for v in values):
                raise SweepError("gamma sweep values must lie in (0, 1)")
        else:
            if not all(float(v).is_integer() for v in values):
                raise SweepError(f"{self.variable} sweep values must be integers")
            values = tuple(int(v) for v in values)
        object.__setattr__(self, "values", values)
        if self.num_seeds < 1:
            raise SweepError("num_seeds must be >= 1", "num_seeds")
        unknown = set(self.outputs) - set(COLUMNS[1:])
        if unknown:
            raise SweepError(f"unknown output column(s): {sorted(unknown)}", "outputs")
        object.__setattr__(self, "outputs", frozenset(self.outputs))

    def config_at(self, value) -> SimConfig:
        """Base config with the swept quantity set to ``value``.

        gamma moves the mean ON time; the mean OFF time (and hence the
        interruption rate) stays at its base value.
        """
        base = self.base
        if self.variable == "gamma":
            return dataclasses.replace(base, pu=base.pu.with_gamma(value))
        return dataclasses.replace(base, params=base.params.replace(**{_PARAM_FIELD[self.variable]: value}))


def preset_sweep(figure: int, base: SimConfig | None = None, num_seeds: int = 20) -> SweepSpec:
    if figure not in FIGURE_VARIABLE:
        raise SweepError(f"figure must be one of {sorted(FIGURE_VARIABLE)}, got {figure!r}", "figure")
    var = FIGURE_VARIABLE[figure]
    return SweepSpec(var, PRESET_VALUES[var], base or SimConfig(), num_seeds)


@dataclass
class SweepRow:
    sweep_value: float
    pcf_S_analytic: float = math.nan
    pcf_S_sim: float = math.nan
    crpcf_S_analytic: float = math.nan
    crpcf_S_sim_mean: float = math.nan
    crpcf_S_sim_std: float = math.nan
    switch_analytic: float = math.nan
    switch_sim_mean: float = math.nan
    rounds_sim_mean: float = math.nan
    retx_sim_mean: float = math.nan
    error: str | None = None

    def values(self) -> list:
        return [getattr(self, c) for c in COLUMNS]


@dataclass
class SweepTable:
    spec: SweepSpec
    rows: list[SweepRow]

    def column(self, name) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)


def _guarded(fn, *args):
    try:
        return fn(*args)
    except Exception as exc:  # a bad point must not abort the sweep
        return exc


def _simulate_metrics(config: SimConfig):
    r = simulate(config)
    return r.throughput, r.switch_count, r.rounds_executed, r.retransmissions


def run_sweep(spec: SweepSpec, n_jobs: int | None = None) -> SweepTable:
    """Evaluate every sweep point analytically and by simulation.

    Replicate ``i`` at every point uses the same derived seed, so a point that
    coincides with the base configuration gives identical numbers in any sweep.
    """
    want_pcf_sim = "pcf_S_sim" in spec.outputs
    want_cr_sim = bool((SIM_COLUMNS - {"pcf_S_sim"}) & spec.outputs)
    seeds = [replicate_seed(spec.base.seed, i) for i in range(spec.num_seeds)]

    rows, tasks, owners = [], [], []
    for value in spec.values:
        row = SweepRow(sweep_value=value)
        rows.append(row)
        try:
            config = spec.config_at(value)
            pcf = pcf_throughput(config.params)
            cr = crpcf_throughput(config.params, config.pu)
        except Exception as exc:
            row.error = f"{type(exc).__name__}: {exc}"
            log.warning("sweep %s=%s failed: %s", spec.variable, value, row.error)
            continue
        if "pcf_S_analytic" in spec.outputs:
            row.pcf_S_analytic = pcf.throughput
        if "crpcf_S_analytic" in spec.outputs:
            row.crpcf_S_analytic = cr.throughput
        if "switch_analytic" in spec.outputs:
            row.switch_analytic = cr.switch_count
        if want_pcf_sim:
            tasks.append(dataclasses.replace(config, protocol=Protocol.PCF, seed=seeds[0]))
            owners.append((row, "pcf"))
        if want_cr_sim:
            for seed in seeds:
                tasks.append(dataclasses.replace(config, protocol=Protocol.CRPCF, seed=seed))
                owners.append((row, "crpcf"))

    if n_jobs in (None, 1):
        results = [_guarded(_simulate_metrics, t) for t in tasks]
    else:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=n_jobs)(delayed(_guarded)(_simulate_metrics, t) for t in tasks)

    grouped: dict[int, list] = {}
    for (row, kind), res in zip(owners, results):
        if isinstance(res, Exception):
            row.error = f"{type(res).__name__}: {res}"
            log.warning("sweep %s=%s simulation failed: %s", spec.variable, row.sweep_value, row.error)
        elif kind == "pcf":
            row.pcf_S_sim = res[0]
        else:
            grouped.setdefault(id(row), []).append(res)

    for row in rows:
        samples = grouped.get(id(row))
        if not samples or row.error:
            continue
        arr = np.array(samples, dtype=float)
        mean = arr.mean(axis=0)
        row.crpcf_S_sim_mean = float(mean[0])
        row.crpcf_S_sim_std = float(arr[:, 0].std())
        row.switch_sim_mean = float(mean[1])
        row.rounds_sim_mean = float(mean[2])
        row.retx_sim_mean = float(mean[3])
        for col in SIM_COLUMNS - spec.outputs:
            setattr(row, col, math.nan)
    return SweepTable(spec, rows)
