"""End-to-end acceptance criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line; ``conftest.py`` prints them in the
terminal summary.
"""

import io
import math
import statistics
import time

from compositionality import (
    AnalysisConfig,
    GroundTruth,
    Verdict,
    aggregate,
    classify,
    jdc,
    marginal_diffs,
    parse_norms,
    parse_trials,
    selectivity_test,
    sense_probability,
)
from compositionality.cli import main
from compositionality.synth import random_per_condition_table

from .conftest import FIXTURES, load_fixture

RESULTS = []

ROUND_TRIP_SEEDS = range(100)
ROUND_TRIP_N = 100


def record(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _timed_ms(fn, repeats=20):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1e3)
    return statistics.median(times), max(times)


def test_criterion_1_toast_gag():
    table = load_fixture("toastgag.json")
    config = AnalysisConfig(overrides=frozenset({table.name}))
    c = classify(table, config)
    median_ms, worst_ms = _timed_ms(lambda: classify(table, config))
    ok = (1.22 <= c.max_abs_chsh <= 1.26
          and c.verdict is Verdict.COMPOSITIONAL
          and c.jdc_result.feasible
          and median_ms < 10.0)
    record(1, ok, f"toast gag max|CHSH|={c.max_abs_chsh:.4f}, verdict={c.verdict}, "
                  f"JDC on projection={c.jdc_result.status}, "
                  f"runtime median {median_ms:.2f} ms (max {worst_ms:.2f} ms)")


def test_criterion_2_apple_chip():
    table = load_fixture("applechip.json")
    ms = selectivity_test(table)
    c = classify(table)
    exact = jdc(table)
    ok = (all(b.n == 16 for b in table)
          and abs(ms.diffs["A1"] - 0.250) <= 0.001
          and len(ms.failing) >= 1
          and c.verdict is Verdict.MS_FAILURE
          and not exact.feasible)
    record(2, ok, f"apple chip diff(A1)={ms.diffs['A1']:.4f}, failing={list(ms.failing)}, "
                  f"verdict={c.verdict}, exact JDC={exact.status}")


def test_criterion_3_hypothetical_violation():
    table = load_fixture("violation.json")
    c = classify(table)
    diffs = marginal_diffs(table)
    chis = c.ms_report.chi_squares
    ok = (all(b.n == 100 for b in table)
          and abs(c.max_abs_chsh - 2.06) <= 0.005
          and max(diffs.values()) <= 0.02 + 1e-12
          and not c.ms_report.failing
          and c.verdict is Verdict.VIOLATION
          and not c.jdc_result.feasible
          and not jdc(table).feasible)
    record(3, ok, f"max|CHSH|={c.max_abs_chsh:.4f}, max diff={max(diffs.values()):.3f}, "
                  f"max chi2={max(chis.values()):.3f} (crit {c.ms_report.critical_value}), "
                  f"verdict={c.verdict}, JDC={c.jdc_result.status}")


def test_criterion_4_bat_sense_probability():
    bat = parse_norms((FIXTURES / "usf_norms.csv").read_text())["bat"]
    p = sense_probability(bat, {"ball", "baseball"})
    record(4, p == 0.3, f"sense_probability(BAT, {{ball, baseball}}) = {p!r}")


def test_criterion_5_fine_oracle():
    out = io.StringIO()
    t0 = time.perf_counter()
    code = main(["oracle", "--trials", "1000", "--seed", "1", "--lp-tolerance", "1e-7"],
                stdout=out, stderr=io.StringIO())
    elapsed = time.perf_counter() - t0
    lines = out.getvalue().splitlines()
    ok = code == 0 and lines[-1] == "0 counterexamples" and elapsed < 5.0
    record(5, ok, f"oracle --trials 1000: {'; '.join(lines)}; exit {code}; {elapsed:.2f} s")


def test_criterion_6_ms_necessity():
    checked = infeasible = 0
    seed = 0
    while checked < 200:
        table = random_per_condition_table(seed, name=f"pc-{seed}")
        seed += 1
        if max(marginal_diffs(table).values()) <= 0.05:
            continue
        checked += 1
        infeasible += not jdc(table).feasible
    record(6, infeasible == checked,
           f"{infeasible}/{checked} per-condition tables with a diff > 0.05 are JDC-infeasible "
           f"({seed} seeds drawn)")


def test_criterion_7_round_trip():
    truth_table = load_fixture("violation.json")
    truth = GroundTruth(truth_table, name=truth_table.name)
    recovered = reproduced = 0
    tallies = {}
    for seed in ROUND_TRIP_SEEDS:
        buf = io.StringIO()
        code = main(["synth", "--truth", str(FIXTURES / "violation.json"),
                     "--n", str(ROUND_TRIP_N), "--seed", str(seed)], stdout=buf)
        assert code == 0
        table = aggregate(parse_trials(buf.getvalue()))[truth.name]
        within = all(
            abs(ph - p) <= 3 * math.sqrt(p * (1 - p) / ROUND_TRIP_N) + 1e-12
            for b0, b1 in zip(truth_table, table) for p, ph in zip(b0.cells, b1.cells)
        )
        recovered += within
        verdict = classify(table).verdict
        tallies[str(verdict)] = tallies.get(str(verdict), 0) + 1
        reproduced += verdict is Verdict.VIOLATION
    total = len(ROUND_TRIP_SEEDS)
    # both halves of the criterion are required at the 95% level
    ok = recovered >= 0.95 * total and reproduced >= 0.95 * total
    record(7, ok, f"cells within 3 SE in {recovered}/{total} seeds; "
                  f"violation verdict in {reproduced}/{total} seeds (need >= 95); "
                  f"verdicts {tallies}")


def test_criterion_8_out_of_scope():
    # nothing to compute: the unpublished rows and analyses are replaced by criteria 5-7
    RESULTS.append("NOTE criterion 8: combinations without published matrices, the exact "
                   "published chi-square statistics and the response-time analyses are not "
                   "reproducible; covered by criteria 5-7")
