"""Three ways to ask the same question, checked against each other on random tables.

With exact marginal selectivity, satisfying the Bell/CH inequalities, keeping
every CHSH variant within 2, and the existence of a 16-cell joint
distribution are the same statement.
"""

import numpy as np

from compositionality import bell_ch, chsh, jdc, marginal_diffs, marginalize, random_joint
from compositionality.oracle import run_oracle
from compositionality.synth import perturb_correlations, random_per_condition_table, rng_for

q = random_joint(5)
table = marginalize(q, name="from a joint")
print("a joint distribution always gives a consistent table")
print("  max |CHSH|", round(chsh(table).max_abs, 4), " Bell/CH", bell_ch(table).satisfied,
      " LP", jdc(table).status)

# push correlations around without touching marginals until something breaks
rng = rng_for(5)
for step in range(6):
    table = perturb_correlations(table, rng)
    r = chsh(table)
    print(f"  push {step}: max |CHSH| {r.max_abs:.3f}  Bell/CH {bell_ch(table).satisfied!s:5}"
          f"  LP {jdc(table).status}")

# independent blocks usually disagree on marginals, and then no joint exists
loose = random_per_condition_table(9)
print("\nindependent blocks: largest marginal diff",
      round(max(marginal_diffs(loose).values()), 3), " LP", jdc(loose).status)

summary = run_oracle(trials=300, seed=2)
print("\nrandomized check")
for line in summary.lines():
    print(" ", line)

# the witness the LP returns is itself a distribution over the 16 sign patterns
w = jdc(marginalize(q)).witness
print("\nwitness mass", round(sum(w.q), 12), " min cell", round(float(np.min(w.q)), 12))
