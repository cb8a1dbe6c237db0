"""Sample experiments from a known table and see how often the analysis recovers it.

At 100 trials per condition the recovered cells are close, but the verdict
is fragile: chance marginal differences trip the selectivity test and
noise can pull |CHSH| back under 2.
"""

import io
from collections import Counter
from pathlib import Path

from compositionality import AnalysisConfig, GroundTruth, aggregate, classify, parse_table, parse_trials
from compositionality.ingest import write_trials
from compositionality.synth import sample_trials

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
truth_table = parse_table((FIXTURES / "violation.json").read_text())
truth = GroundTruth(truth_table, name=truth_table.name)

buf = io.StringIO()
write_trials(sample_trials(truth, 100, seed=7), buf)
print(buf.getvalue().splitlines()[:3], "...")

table = aggregate(parse_trials(buf.getvalue()))[truth.name]
for b0, b1 in zip(truth_table, table):
    print(f"  {b0.condition.label}  truth {b0.cells}  sampled {b1.cells}")

for label, config in [("default", AnalysisConfig()),
                      ("Yates", AnalysisConfig(yates=True)),
                      ("selectivity assumed", AnalysisConfig(overrides=frozenset({truth.name})))]:
    for n in (100, 1000):
        tally = Counter()
        for seed in range(100):
            t = aggregate(sample_trials(truth, n, seed))[truth.name]
            tally[str(classify(t, config).verdict)] += 1
        print(f"{label:>20}, n={n:<5} {dict(tally)}")
