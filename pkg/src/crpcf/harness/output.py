"""CSV tables and generated matplotlib scripts for sweep results."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

from ..analytic import optimal_payload
from .sweep import COLUMNS, FIGURE_VARIABLE, SweepTable


def format_value(value) -> str:
    """Six significant digits, plain decimal point; ``nan`` for missing values."""
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return f"{value:.6g}"


def table_to_csv(table: SweepTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in table.rows:
        writer.writerow(format_value(v) for v in row.values())
    return buf.getvalue()


def emit_csv(table: SweepTable, path) -> Path:
    path = Path(path)
    path.write_text(table_to_csv(table), encoding="utf-8")
    return path


def read_csv(path) -> list[dict[str, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [{k: float(v) for k, v in rec.items()} for rec in csv.DictReader(fh)]


X_LABELS = {
    8: "Number of SM M",
    9: "Number of Packets per SM L",
    10: "Number of Channels N",
    11: "Length of Payload X (bytes)",
    12: "Long-run Proportion of Channel Off γ",
}

_TEMPLATE = '''\
"""Throughput and channel-switch curves versus {xlabel}. Generated file."""
import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

nan = math.nan
x = {x!r}
pcf_analytic = {pcf_analytic!r}
pcf_sim = {pcf_sim!r}
crpcf_analytic = {crpcf_analytic!r}
crpcf_sim = {crpcf_sim!r}
crpcf_sim_std = {crpcf_sim_std!r}
switch_analytic = {switch_analytic!r}
switch_sim = {switch_sim!r}
optimum = {optimum!r}

fig, (ax_s, ax_o) = plt.subplots(1, 2, figsize=(11, 4))
ax_s.plot(x, pcf_analytic, "b-", label="PCF (analytic)")
ax_s.plot(x, pcf_sim, "bs", mfc="none", label="PCF (simulation)")
ax_s.plot(x, crpcf_analytic, "r-", label="CR-PCF (analytic)")
ax_s.errorbar(x, crpcf_sim, yerr=crpcf_sim_std, fmt="ro", mfc="none", capsize=3, label="CR-PCF (simulation)")
if optimum is not None:
    ax_s.axvline(optimum[0], color="gray", ls=":")
    ax_s.plot([optimum[0]], [optimum[1]], "k*", ms=12, label="optimal X = %d" % optimum[0])
ax_s.set_xlabel({xlabel!r})
ax_s.set_ylabel("Throughput S")
ax_s.legend()
ax_s.grid(True, alpha=0.3)

ax_o.plot(x, switch_analytic, "r-", label="analytic")
ax_o.plot(x, switch_sim, "ro", mfc="none", label="simulation")
ax_o.set_xlabel({xlabel!r})
ax_o.set_ylabel("Number of channel switches")
ax_o.legend()
ax_o.grid(True, alpha=0.3)
{xlim}{xscale}
fig.tight_layout()
fig.savefig(os.path.join(os.path.dirname(os.path.abspath(__file__)), {png!r}), dpi=150)
'''


def _clean(values):
    return [float(format_value(v)) if not math.isnan(v) else math.nan for v in values]


def emit_plot_script(table: SweepTable, figure: int, path) -> Path:
    """Write a standalone matplotlib script reproducing ``figure`` from ``table``."""
    if figure not in FIGURE_VARIABLE:
        raise ValueError(f"figure must be one of {sorted(FIGURE_VARIABLE)}, got {figure!r}")
    if FIGURE_VARIABLE[figure] != table.spec.variable:
        raise ValueError(
            f"figure {figure} plots a sweep over {FIGURE_VARIABLE[figure]}, "
            f"table sweeps {table.spec.variable}")
    path = Path(path)
    optimum = None
    if figure == 11:
        base = table.spec.base
        lo, hi = table.spec.values[0], table.spec.values[-1]
        best = optimal_payload(base.params, base.pu, (lo, hi))
        optimum = (best.payload_len, float(format_value(best.throughput)))

    script = _TEMPLATE.format(
        xlabel=X_LABELS[figure],
        x=[float(v) if figure == 12 else int(v) for v in table.spec.values],
        pcf_analytic=_clean(table.column("pcf_S_analytic")),
        pcf_sim=_clean(table.column("pcf_S_sim")),
        crpcf_analytic=_clean(table.column("crpcf_S_analytic")),
        crpcf_sim=_clean(table.column("crpcf_S_sim_mean")),
        crpcf_sim_std=_clean(table.column("crpcf_S_sim_std")),
        switch_analytic=_clean(table.column("switch_analytic")),
        switch_sim=_clean(table.column("switch_sim_mean")),
        optimum=optimum,
        xlim='for ax in (ax_s, ax_o):\n    ax.set_xlim(0, 1)\n' if figure == 12 else "",
        xscale='for ax in (ax_s, ax_o):\n    ax.set_xscale("log", base=2)\n' if figure == 11 else "",
        png=str(path.with_suffix(".png").name),
    )
    path.write_text(script, encoding="utf-8")
    return path
