"""Acceptance gate AC1-AC6.

Each test records a one-line PASS/FAIL verdict; the lines are printed at the
end of the pytest run (see conftest.py) and when this file is run directly.
"""

import os
import subprocess
import sys
import time
from pathlib import Path

import pytest

from replitool.calibration import TWO_TRIALS_ANY_DIRECTION, SimScenario, simulate_error_rates
from replitool.criteria import AnalysisConfig, Criterion, evaluate_pair, success_rates
from replitool.dataio import NAMED_PAIRS, load_fixture
from replitool.display import format_bf, format_p
from replitool.evidence import bayes_factor_01, tost_p
from replitool.models import EquivalenceMargin
from replitool.sensitivity import margin_sweep, prior_sd_sweep

RESULTS: dict[str, tuple[bool, str]] = {}
C = Criterion


def record(key: str, ok: bool, detail: str) -> None:
    RESULTS[key] = (ok, detail)
    assert ok, f"{key}: {detail}"


def test_ac1_rpcb_counts():
    start = time.perf_counter()
    rates = success_rates(load_fixture("rpcb"), AnalysisConfig())
    elapsed = time.perf_counter() - start
    expected = {C.NON_SIGNIFICANCE: 11, C.EQUIVALENCE_TOST: 4, C.BAYES_FACTOR_THRESHOLD: 1,
                C.ORIG_IN_REPL_CI: 11, C.REPL_IN_ORIG_CI: 12, C.REPL_IN_PREDICTION_INTERVAL: 12,
                C.META_NON_SIGNIFICANCE: 10}
    got = {c: rates[c].successes for c in expected}
    ok = got == expected and all(rates[c].total == 15 for c in expected) and elapsed < 1.0
    record("AC1", ok, ", ".join(f"{c.value} {got[c]}/15" for c in expected) + f"; {elapsed:.3f} s")


def test_ac2_named_pairs():
    pairs = {p.id: p for p in load_fixture("rpcb")}
    margin = EquivalenceMargin(0.74)
    shown = {}
    for name in ("Goetz2011", "Dawson2011"):
        pair = pairs[NAMED_PAIRS[name]]
        studies = (pair.original, pair.replications[0])
        shown[name] = (tuple(format_p(tost_p(s, margin)) for s in studies),
                       tuple(format_bf(bayes_factor_01(s)) for s in studies))
    expected = {"Goetz2011": (("0.06", "0.04"), ("5", "4.1")),
                "Dawson2011": (("0.75", "0.88"), ("1/1.1", "1/1.8"))}
    record("AC2", shown == expected, "; ".join(f"{k} p_TOST {v[0]} BF01 {v[1]}" for k, v in shown.items()))


def test_ac3_sensitivity():
    pairs = load_fixture("rpcb")
    cfg = AnalysisConfig()
    delta = margin_sweep(pairs, cfg).first_reaching(11, 0.05)
    sweep = prior_sd_sweep(pairs, cfg)
    s11 = sweep.first_reaching(11, 3.0)
    at5 = sweep.count_at(5.0, 3.0)
    ok = delta is not None and delta > 2 and s11 is not None and 15 <= s11 <= 25 and at5 / 15 >= 0.5
    record("AC3", ok, f"smallest margin for 11/15 = {delta:.3f}; smallest s for 11/15 = {s11:.2f}; "
                      f"count at s = 5: {at5}/15")


def test_ac4_rpp_eprp():
    pairs = load_fixture("rpp_eprp")
    cfg = AnalysisConfig(margin=0.2)
    reports = {p.id: evaluate_pair(p, cfg) for p in pairs}
    ran = NAMED_PAIRS["Ranganath2008"]
    ns = sum(r.success(C.NON_SIGNIFICANCE) for r in reports.values())
    tost = sorted(pid for pid, r in reports.items() if r.success(C.EQUIVALENCE_TOST))
    bf_ran = reports[ran].outcomes[C.BAYES_FACTOR_THRESHOLD].detail["bf01_replication"]
    others_bf = [min(r.outcomes[C.BAYES_FACTOR_THRESHOLD].detail.values())
                 for pid, r in reports.items() if pid != ran]
    ok = ns == 3 and tost == [ran] and bf_ran < 0.1 / 10 and all(b > 3 for b in others_bf)
    record("AC4", ok, f"non-significance {ns}/4; TOST successes {tost}; Ranganath replication BF01 "
                      f"{bf_ran:.2g}; other pairs min BF01 {min(others_bf):.2f}")


def test_ac5_property_suites(tmp_path):
    empty = tmp_path / "no_fixtures"
    empty.mkdir()
    env = {**os.environ, "REPLITOOL_DATA_DIR": str(empty)}
    tests_dir = Path(__file__).resolve().parent
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-m", "property", "-p", "no:cacheprovider",
                           str(tests_dir)], capture_output=True, text=True, env=env, cwd=tmp_path)
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()
    record("AC5", proc.returncode == 0, f"property suites without fixtures: {summary}")


def test_ac6_calibration():
    start = time.perf_counter()
    null = simulate_error_rates(SimScenario(0.0, 1.0, 1.0, 1_000_000, seed=1))
    edge = simulate_error_rates(SimScenario(1.0, 0.3, 0.3, 1_000_000, seed=2, config=AnalysisConfig(margin=1.0)))
    elapsed = time.perf_counter() - start
    ns = null.estimates[C.NON_SIGNIFICANCE.value]
    tost = edge.estimates[C.EQUIVALENCE_TOST.value]
    tt = null.estimates[C.TWO_TRIALS.value]
    any_dir = null.estimates[TWO_TRIALS_ANY_DIRECTION]
    ok = (abs(ns.probability - 0.9025) <= 0.002 and tost.probability <= 0.0025 + 3 * tost.mcse
          and tt.probability <= 0.0025 and elapsed < 60)
    record("AC6", ok, f"non-significance {ns.probability:.5f}; TOST at boundary {tost.probability:.5f} "
                      f"(MCse {tost.mcse:.5f}); two-trials {tt.probability:.5f} "
                      f"(any direction {any_dir.probability:.5f}); {elapsed:.1f} s")


def summary_lines() -> list[str]:
    lines = []
    for key in ("AC1", "AC2", "AC3", "AC4", "AC5", "AC6"):
        if key in RESULTS:
            ok, detail = RESULTS[key]
            lines.append(f"{key} {'PASS' if ok else 'FAIL'}: {detail}")
        else:
            lines.append(f"{key} FAIL: not run")
    return lines


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
