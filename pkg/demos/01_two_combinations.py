"""Walk through the decision for TOAST GAG and APPLE CHIP, then a table that breaks CHSH."""

from pathlib import Path

from compositionality import (
    AnalysisConfig,
    bell_ch,
    chsh,
    classify,
    jdc,
    parse_table,
    project_to_ms,
    selectivity_test,
)

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def load(name):
    return parse_table((FIXTURES / name).read_text())


toast = load("toastgag.json")
print(f"{toast.name}: primes {toast.primes}")
for block in toast:
    print(f"  {block.condition.label}  {block.cells}")

# step 1: does each concept's sense ignore the other prime?
ms = selectivity_test(toast)
for v in ms.diffs:
    print(f"  diff({v}) = {ms.diffs[v]:.4f}   chi2 = {ms.chi_squares[v]:.3f}")
print("  marginal selectivity holds:", ms.holds)

# step 2: the inequalities, on the observed numbers
r = chsh(toast)
print("  CHSH variants:", [round(s, 3) for s in r.variant_values], "max", round(r.max_abs, 3))
print("  Bell/CH satisfied:", bell_ch(toast).satisfied)

# the LP view needs exact selectivity, so nudge the table onto it first
proj = project_to_ms(toast)
print(f"  projection moved cells by at most {proj.max_shift:.4f};",
      "joint distribution:", jdc(proj.table).status)
print("  verdict:", classify(toast).verdict)
print()

apple = load("applechip.json")
c = classify(apple)
print(f"{apple.name}: verdict {c.verdict}")
print("  failing variables:", c.ms_report.failing,
      {v: round(x, 3) for v, x in c.ms_report.chi_squares.items()})
print("  (no inequality is evaluated once selectivity fails)")
# forcing selectivity shows what the inequalities would have said
forced = classify(apple, AnalysisConfig(overrides=frozenset({apple.name})))
print("  with selectivity assumed:", forced.verdict, f"max |CHSH| {forced.max_abs_chsh:.3f}")
print()

hyp = load("violation.json")
c = classify(hyp)
print(f"{hyp.name}: verdict {c.verdict}, max |CHSH| {c.max_abs_chsh:.3f}")
print("  joint distribution on the projected table:", c.jdc_result.status,
      f"(residual {c.jdc_result.residual:.3f})")
for note in c.notes:
    print("  note:", note)
