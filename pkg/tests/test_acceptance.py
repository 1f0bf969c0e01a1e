"""Exit criteria for the package; each test prints one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary of verdicts
is printed at the end of the session.
"""

import math
import subprocess
import sys

import numpy as np
import pytest

from crpcf.analytic import crpcf_throughput, optimal_payload, pcf_throughput
from crpcf.core import ProtocolParams, PuTrafficModel
from crpcf.harness import SweepSpec, preset_sweep, run_sweep
from crpcf.harness.config import format_config
from crpcf.puchannel import ChannelProcess, Phase, sample_phase
from crpcf.sim import Protocol, SimConfig, run_replications, simulate_crpcf, simulate_pcf

# golden values, computed by hand from the closed forms at the reference point
PCF_T_TOTAL = 81_235_216
PCF_S = 0.907587
CR_GAMMA = 0.757576
CR_SURVIVAL = 0.69451
CR_ROUNDS = 1012.1
CR_SWITCHES = 23_000
CR_S = 7.74
WINDOW = 9114
SEEDS = 20


def r_squared(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    return 1 - resid.var() / y.var()


def flat_within(values, tol):
    values = np.asarray(values, float)
    return (values.max() - values.min()) / values.mean() <= tol


def random_params(rng, **fixed):
    tau_switch = float(rng.uniform(0, 400))
    kw = dict(
        beacon_len=float(rng.uniform(1, 300)), poll_len=float(rng.uniform(1, 200)),
        payload_len=float(rng.uniform(1, 4000)), header_len=float(rng.uniform(1, 100)),
        sifs=float(rng.uniform(1, 50)), prop_delay=float(rng.uniform(0.1, 5)),
        tau_sense=tau_switch + float(rng.uniform(1, 400)), tau_switch=tau_switch,
        rate=float(rng.choice([0.25, 1.0, 2.0, 6.0, 11.0])),
        num_sm=int(rng.integers(1, 800)), packets_per_sm=int(rng.integers(1, 30)),
        num_supp_channels=int(rng.integers(0, 25)),
    )
    kw.update(fixed)
    return ProtocolParams(**kw)


def test_1_pcf_baseline(criterion):
    r = pcf_throughput(ProtocolParams())
    ok = r.t_total == PCF_T_TOTAL and abs(r.throughput - PCF_S) <= 1e-6
    criterion("1 analytic PCF baseline", ok, f"T2={r.t_total:.0f} us, S={r.throughput:.7f}")


def test_2_crpcf_baseline(criterion):
    r = crpcf_throughput(ProtocolParams(), PuTrafficModel())
    ok = (abs(r.gamma - CR_GAMMA) <= 1e-6 and abs(r.survival_prob - CR_SURVIVAL) <= 1e-4
          and abs(r.expected_rounds - CR_ROUNDS) <= 0.5 and abs(r.switch_count - CR_SWITCHES) <= 50
          and abs(r.throughput - CR_S) <= 0.02)
    criterion("2 analytic CR-PCF baseline", ok,
              f"gamma={r.gamma:.6f} survival={r.survival_prob:.5f} rounds={r.expected_rounds:.2f} "
              f"O={r.switch_count:.1f} S={r.throughput:.4f}")


def test_3_deterministic_oracle_equality(criterion):
    rng = np.random.default_rng(3)
    pcf_ok = cr_ok = 0
    for i in range(50):
        p = random_params(rng)
        pcf_ok += simulate_pcf(SimConfig(p, protocol=Protocol.PCF)).total_time == pcf_throughput(p).t_total
        p0 = p.replace(num_supp_channels=0)
        pu = PuTrafficModel(z_on=float(rng.uniform(100, 1e5)), z_off=float(rng.uniform(100, 1e5)))
        cr_ok += simulate_crpcf(SimConfig(p0, pu, seed=i)).total_time == crpcf_throughput(p0, pu).t_total
    criterion("3 deterministic oracle equality", pcf_ok == 50 and cr_ok == 50,
              f"PCF exact {pcf_ok}/50, CR-PCF N=0 exact {cr_ok}/50")


def test_4_stochastic_agreement(criterion):
    analytic = crpcf_throughput(ProtocolParams(), PuTrafficModel())
    summary = run_replications(SimConfig(seed=0), SEEDS)
    s_err = summary["throughput"].mean / analytic.throughput - 1
    o_err = summary["switch_count"].mean / analytic.switch_count - 1
    criterion("4 simulation vs analytic at reference point", abs(s_err) <= 0.05 and abs(o_err) <= 0.05,
              f"S sim={summary['throughput'].mean:.4f} ({s_err:+.2%}), "
              f"O sim={summary['switch_count'].mean:.0f} ({o_err:+.2%})")


@pytest.fixture(scope="module")
def sweeps():
    return {fig: run_sweep(preset_sweep(fig, num_seeds=SEEDS)) for fig in (8, 9, 12)}


def test_5a_flat_in_m_and_l(criterion, sweeps):
    checks = {}
    for fig, var in ((8, "M"), (9, "L")):
        t = sweeps[fig]
        for col in ("pcf_S_analytic", "pcf_S_sim", "crpcf_S_analytic", "crpcf_S_sim_mean"):
            checks[f"{var}:{col}"] = flat_within(t.column(col), 0.02)
    t8 = sweeps[8]
    r2_sim = r_squared(t8.spec.values, t8.column("switch_sim_mean"))
    r2_an = r_squared(t8.spec.values, t8.column("switch_analytic"))
    spread = {var: np.ptp(sweeps[f].column("crpcf_S_sim_mean")) / sweeps[f].column("crpcf_S_sim_mean").mean()
              for f, var in ((8, "M"), (9, "L"))}
    ok = all(checks.values()) and r2_sim > 0.99 and r2_an > 0.99
    criterion("5a throughput flat in M and L, switches linear in M", ok,
              f"sim S spread M={spread['M']:.2%} L={spread['L']:.2%}; switch R2 sim={r2_sim:.5f} "
              f"analytic={r2_an:.5f}; failing={[k for k, v in checks.items() if not v]}")


def test_5b_increasing_in_channels(criterion):
    t = run_sweep(SweepSpec("N", preset_sweep(10).values, SimConfig(), 1,
                            outputs=frozenset({"crpcf_S_analytic"})))
    s = t.column("crpcf_S_analytic")
    r2 = r_squared(t.spec.values, s)
    ok = bool(np.all(np.diff(s) > 0)) and r2 > 0.98
    criterion("5b CR-PCF throughput increasing and near-linear in N", ok, f"R2={r2:.5f}")


def test_5c_payload_shape(criterion):
    spec = SweepSpec("X", preset_sweep(11).values, SimConfig(), 1,
                     outputs=frozenset({"pcf_S_analytic", "crpcf_S_analytic"}))
    t = run_sweep(spec)
    cr, pcf = t.column("crpcf_S_analytic"), t.column("pcf_S_analytic")
    peaks = [spec.values[i] for i in range(1, len(cr) - 1) if cr[i] > cr[i - 1] and cr[i] > cr[i + 1]]
    ok = len(peaks) == 1 and bool(np.all(np.diff(pcf) > 0))
    criterion("5c one interior CR-PCF maximum in X, PCF increasing in X", ok, f"interior maxima at X={peaks}")


def test_5d_gamma_throughput_and_rounds(criterion, sweeps):
    t = sweeps[12]
    s_up = bool(np.all(np.diff(t.column("crpcf_S_analytic")) > 0))
    rounds_down = bool(np.all(np.diff(t.column("rounds_sim_mean")) < 0))
    criterion("5d(i) CR-PCF throughput increasing, simulated rounds decreasing in gamma",
              s_up and rounds_down, f"rounds={t.column('rounds_sim_mean').round(1).tolist()}")


def test_5d_gamma_switch_counts(criterion, sweeps):
    t = sweeps[12]
    switches = t.column("switch_sim_mean")
    ok = bool(np.all(np.diff(switches) < 0))
    criterion("5d(ii) simulated switch counts decreasing in gamma", ok,
              f"switch_sim_mean={switches.round(0).tolist()} "
              f"(analytic O={t.column('switch_analytic').round(0).tolist()})")


def test_6_channel_statistics(criterion):
    pu = PuTrafficModel()
    rng = np.random.default_rng(6)
    mean_off = np.mean([sample_phase(pu, Phase.OFF, rng) for _ in range(100_000)])

    ch = ChannelProcess(1, pu, seed=61)
    t, trials, ok = 0.0, 0, 0
    while trials < 100_000:
        if ch.is_free_at(t):
            trials += 1
            ok += ch.off_survives(t, WINDOW)
        t += 100_000.0
    survival = ok / trials

    ch = ChannelProcess(2, pu, seed=62)
    probes = np.sort(rng.uniform(0, 1e5 * 50_000, 100_000))
    free = np.mean([ch.is_free_at(x) for x in probes])

    expect = math.exp(-WINDOW / pu.z_off)
    passed = (abs(mean_off / pu.z_off - 1) <= 0.02 and abs(survival - expect) <= 0.01
              and abs(free - pu.gamma()) <= 0.01)
    criterion("6 channel model statistics", passed,
              f"mean OFF={mean_off:.0f} us, survival={survival:.4f} vs {expect:.4f}, "
              f"free fraction={free:.4f} vs {pu.gamma():.4f}")


def _brute_force_argmax(p, pu, lo, hi):
    xs = np.arange(lo, hi + 1, dtype=float)
    bits = lambda b: 8.0 * b / p.rate
    t_round = p.tau_sense + bits(p.poll_len) + p.prop_delay + p.tau_switch + bits(xs + p.header_len) + p.prop_delay
    n = p.num_supp_channels * pu.z_off / (pu.z_off + pu.z_on)
    rounds = p.num_sm * p.packets_per_sm / (n * np.exp(-(t_round - p.tau_sense) / pu.z_off) + 1)
    s = p.num_sm * p.packets_per_sm * bits(xs) / (bits(p.beacon_len) + p.tau_sense + rounds * t_round
                                                  + bits(p.poll_len))
    return int(xs[np.argmax(s)])


def test_7_scheduler_properties(criterion):
    rng = np.random.default_rng(7)
    dominance_ok = conservation_ok = 0
    for run in range(100):
        p = ProtocolParams(num_sm=int(rng.integers(1, 80)), packets_per_sm=int(rng.integers(1, 10)),
                           num_supp_channels=int(rng.integers(0, 16)))
        pu = PuTrafficModel().with_gamma(float(rng.uniform(0.05, 0.95)))
        report = simulate_crpcf(SimConfig(p, pu, seed=run), record_trace=True)
        good = True
        for rt in report.trace:
            chosen = set(rt.allocation.sm_ids)
            rest = [c for i, c in enumerate(rt.completed_before) if c < p.packets_per_sm and i not in chosen]
            if rest and max(rt.completed_before[i] for i in chosen) > min(rest):
                good = False
        dominance_ok += good
        conservation_ok += report.packets_delivered == p.num_sm * p.packets_per_sm

    xbar_ok = 0
    for _ in range(10):
        p = random_params(rng, num_supp_channels=int(rng.integers(1, 25)))
        pu = PuTrafficModel(z_on=float(rng.uniform(1000, 50_000)), z_off=float(rng.uniform(2000, 100_000)))
        lo, hi = int(rng.integers(1, 200)), int(rng.integers(2000, 65536))
        xbar_ok += optimal_payload(p, pu, (lo, hi)).payload_len == _brute_force_argmax(p, pu, lo, hi)
    ok = dominance_ok == 100 and conservation_ok == 100 and xbar_ok == 10
    criterion("7 LCFS dominance, payload conservation, optimal payload", ok,
              f"dominance {dominance_ok}/100, conservation {conservation_ok}/100, X argmax {xbar_ok}/10")


def test_8_reproducible_csv(criterion, tmp_path):
    cfg = tmp_path / "small.cfg"
    cfg.write_text(format_config(SimConfig(ProtocolParams(num_sm=100, packets_per_sm=5), seed=12345)))
    outputs = []
    for i in range(2):
        out = tmp_path / f"run{i}.csv"
        subprocess.run([sys.executable, "-m", "crpcf", "sweep", "--config", str(cfg), "--figure", "12",
                        "--seeds", "3", "--out", str(out)], check=True, capture_output=True)
        outputs.append(out.read_bytes())
    criterion("8 byte-identical CSV across invocations", outputs[0] == outputs[1],
              f"{len(outputs[0])} bytes")
