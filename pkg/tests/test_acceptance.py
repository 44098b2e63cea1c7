"""Acceptance criteria, one test each.

Every test appends a PASS/FAIL line to ``ACCEPTANCE_LINES`` before asserting,
and the lines are printed in the terminal summary.
"""

import math
import subprocess
import sys

import numpy as np
import pytest

from wireless_consensus.channel import (
    MMWAVE,
    THZ,
    NetworkConfig,
    active_distance,
    snr,
    transmission_success_probability,
)
from wireless_consensus.config import SweepSpec
from wireless_consensus.consensus import pbft_success, raft_success
from wireless_consensus import perf
from wireless_consensus.fitting import fit_gaussian, fit_gaussian_xy, gaussian, reliability_gain
from wireless_consensus.sweep import run_sweep
from wireless_consensus.validation import VALIDATION_N, concordance_grid

from conftest import ACCEPTANCE_LINES, REFERENCE_REGIMES

EPS = np.finfo(float).eps


def record(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


@pytest.fixture(scope="module")
def default_sweep():
    return run_sweep(SweepSpec())


@pytest.mark.slow
def test_criterion_1_oracle_concordance():
    results = concordance_grid(samples=1_000_000, trials=10_000_000, seed=0)
    failed = [r for r in results if not r.passed]
    worst = max(
        abs(r.analytic - r.mc_mean) / r.mc_stderr for r in results if r.mc_stderr > 0
    )
    detail = f"{len(results) - len(failed)}/{len(results)} within 3 SE, worst |z|={worst:.2f}"
    assert len(results) == 2 * len(VALIDATION_N) * 3 * 3
    assert record(1, "oracle concordance", not failed, detail), "\n".join(r.line() for r in failed)


def test_criterion_2_latency_reproduction(default_sweep):
    t2 = {"thz": [], "mmwave": []}
    for row in default_sweep:
        t2[row.signal].append(row.t2_s)
    thz_ok = all(0.038e-18 <= v <= 0.040e-18 for v in t2["thz"])
    mm_ok = all(4.380e-18 <= v <= 4.395e-18 for v in t2["mmwave"])
    detail = (
        f"THz t2 in [{min(t2['thz']):.5e}, {max(t2['thz']):.5e}] s, "
        f"mmWave t2 in [{min(t2['mmwave']):.5e}, {max(t2['mmwave']):.5e}] s over {len(default_sweep)} rows"
    )
    assert record(2, "latency reproduction", thz_ok and mm_ok, detail)


def test_criterion_3_throughput_orders(default_sweep):
    bands = {"thz": {17, 18}, "mmwave": {15, 16}}
    ranges, ok = {}, True
    for row in default_sweep:
        ok &= math.floor(math.log10(row.tps)) in bands[row.signal]
        lo, hi = ranges.get((row.signal, row.protocol), (math.inf, 0.0))
        ranges[(row.signal, row.protocol)] = (min(lo, row.tps), max(hi, row.tps))
    detail = ", ".join(f"{s}/{p} [{lo:.3g}, {hi:.3g}]" for (s, p), (lo, hi) in ranges.items())
    assert record(3, "throughput orders", ok, detail)


def test_criterion_4_structural_identities():
    worst = {"latency ratio": 0.0, "pbft energy": 0.0, "raft energy": 0.0, "tps*latency": 0.0}
    for profile in (THZ, MMWAVE):
        for p_s in (0.2, 0.5, 0.9, 0.999):
            T = perf.per_message_latency(profile, p_s)
            for n in range(2, 1001):
                tp, tr = perf.pbft_latency(n, T), perf.raft_latency(n, T)
                ratio = tp.total / tr.total
                worst["latency ratio"] = max(worst["latency ratio"], abs(ratio / ((3 * n - 2) / n) - 1))
                pt = profile.transmit_power
                ep = perf.pbft_energy(n, tp.t1, tp.t2, pt).total
                er = perf.raft_energy(n, tr.t1, tr.t2, pt).total
                worst["pbft energy"] = max(
                    worst["pbft energy"], abs(ep / perf.pbft_energy_closed_form(n, tp.t1, tp.t2, pt) - 1)
                )
                worst["raft energy"] = max(
                    worst["raft energy"], abs(er / perf.raft_energy_closed_form(n, tr.t1, tr.t2, pt) - 1)
                )
                for total in (tp.total, tr.total):
                    worst["tps*latency"] = max(worst["tps*latency"], abs(perf.throughput(total) * total - 1))
    # ulp-scale: a handful of roundings in the closed forms
    ok = (
        worst["latency ratio"] <= 4 * EPS
        and worst["pbft energy"] <= 8 * EPS
        and worst["raft energy"] <= 8 * EPS
        and worst["tps*latency"] <= 1e-12
    )
    detail = ", ".join(f"{k} rel err {v:.2e}" for k, v in worst.items())
    assert record(4, "structural identities", ok, detail)


def test_criterion_5_ordering_properties():
    checks = {}
    raft_ge = True
    for profile in (THZ, MMWAVE):
        for z, g in REFERENCE_REGIMES:
            for n in VALIDATION_N:
                p_s = transmission_success_probability(profile, NetworkConfig(n, g, z))
                raft_ge &= raft_success(n, p_s).total >= pbft_success(n, p_s).total
    checks["P_R >= P_p"] = raft_ge

    energy_ge = True
    for profile in (THZ, MMWAVE):
        for p_s in np.linspace(0.05, 0.95, 10):
            T = perf.per_message_latency(profile, p_s)
            for n in range(2, 200):
                t1 = (n - 1) * T
                energy_ge &= (
                    perf.pbft_energy(n, t1, T, profile.transmit_power).total
                    >= perf.raft_energy(n, t1, T, profile.transmit_power).total
                )
    checks["E_P >= E_R"] = energy_ge

    def strictly(values, decreasing):
        pairs = zip(values, values[1:])
        return all(a > b for a, b in pairs) if decreasing else all(a < b for a, b in pairs)

    mono = True
    for profile in (THZ, MMWAVE):
        ps = lambda n, g, z: transmission_success_probability(profile, NetworkConfig(n, g, z))
        mono &= strictly([ps(n, 5.0, 4.0) for n in range(2, 62, 2)], True)
        mono &= strictly([ps(10, 5.0, z) for z in np.linspace(-10, 20, 31)], True)
        mono &= strictly([ps(10, g, 4.0) for g in np.linspace(0.5, 15, 30)], False)
    checks["P_s monotone in n, z, gamma"] = mono

    detail = ", ".join(f"{k}: {'ok' if v else 'violated'}" for k, v in checks.items())
    assert record(5, "ordering properties", all(checks.values()), detail)


def test_criterion_6_reliability_gain_fit():
    r2 = {}
    for profile in (THZ, MMWAVE):
        for protocol, fn, ns in (("pbft", pbft_success, range(4, 53, 3)), ("raft", raft_success, range(3, 52, 2))):
            points = [
                (n, fn(n, transmission_success_probability(profile, NetworkConfig(n, 5.0, 4.0))).total)
                for n in ns
            ]
            r2[f"{profile.name}/{protocol}"] = fit_gaussian(reliability_gain(points)).r_squared
    x = np.arange(4.0, 53.0)
    exact = fit_gaussian_xy(x, gaussian(x, -5.0, 20.0, 8.0)).r_squared
    ok = all(v >= 0.95 for v in r2.values()) and abs(exact - 1.0) <= 1e-9
    detail = ", ".join(f"{k} R2={v:.6f}" for k, v in r2.items()) + f", self-test |R2-1|={abs(exact - 1):.1e}"
    assert record(6, "reliability-gain fit", ok, detail)


def test_criterion_7_active_distance_guarantee():
    rng = np.random.default_rng(20240607)
    worst, inside = 0.0, True
    for _ in range(100):
        profile = (THZ, MMWAVE)[rng.integers(2)]
        z = 10 ** (rng.uniform(-10, 20) / 10)
        h = rng.exponential(1.0) + 1e-6
        r = active_distance(profile, z, h)
        worst = max(worst, abs(snr(profile, h, r) / z - 1))
        inside &= snr(profile, h, 0.999 * r) > z
    ok = worst <= 1e-9 and inside
    detail = f"100 tuples, max relative SNR residual {worst:.2e}, SNR(0.999 r) > z: {inside}"
    assert record(7, "active-distance guarantee", ok, detail)


def test_criterion_8_determinism(tmp_path):
    outputs = []
    for extra in ([], ["--samples", "100000"]):
        pair = []
        for run in ("a", "b"):
            out = tmp_path / f"{run}{len(extra)}.csv"
            subprocess.run(
                [sys.executable, "-m", "wireless_consensus", "sweep", "--seed", "42", "--out", str(out), *extra],
                check=True, capture_output=True,
            )
            pair.append(out.read_bytes())
        outputs.append(pair)
    ok = all(a == b for a, b in outputs)
    detail = f"analytic sweep {len(outputs[0][0])} bytes, Monte Carlo sweep {len(outputs[1][0])} bytes, identical: {ok}"
    assert record(8, "determinism", ok, detail)
