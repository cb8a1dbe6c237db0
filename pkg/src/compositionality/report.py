"""Rendering classifications as JSON-ready dicts and as plain text."""

from __future__ import annotations

import json

from .classify import BatchError, Classification
from .ingest import table_to_json
from .selectivity import VARIABLES

SCHEMA_VERSION = 1


def _num(x):
    return None if x is None else float(x)


def classification_to_dict(c: Classification, table=None) -> dict:
    ms = c.ms_report
    out = {
        "name": c.name,
        "verdict": str(c.verdict),
        "compositional": c.verdict.compositional,
        "table": None if table is None else table_to_json(table),
        "marginal_selectivity": {
            "mode": ms.mode,
            "holds": ms.holds,
            "overridden": ms.overridden,
            "alpha": ms.alpha,
            "critical_value": ms.critical_value,
            "diffs": {v: ms.diffs[v] for v in VARIABLES},
            "chi_squares": None if ms.chi_squares is None
            else {v: ms.chi_squares[v] for v in VARIABLES},
            "failing": list(ms.failing),
        },
        "chsh": None,
        "bell_ch": None,
        "projection": None,
        "jdc": None,
        "max_abs_chsh": _num(c.max_abs_chsh),
        "borderline": c.borderline,
        "agreement": c.agreement,
        "notes": list(c.notes),
    }
    if c.chsh_report is not None:
        r = c.chsh_report
        out["chsh"] = {
            "e_values": {k.label: v for k, v in r.e_values.items()},
            "variants": list(r.variant_values),
            "max_abs": r.max_abs,
            "violated": r.violated,
            "projected_max_abs": c.projected_chsh.max_abs,
            "projected_violated": c.projected_chsh.violated,
        }
        b = c.bellch_report
        out["bell_ch"] = {
            "policy": b.policy,
            "expressions": list(b.expressions),
            "satisfied": b.satisfied,
            "marginals_used": dict(b.marginals_used),
            "projected_expressions": list(c.projected_bellch.expressions),
            "projected_satisfied": c.projected_bellch.satisfied,
        }
        p = c.projection
        out["projection"] = {
            "method": p.method,
            "max_shift": p.max_shift,
            "clamps": [
                {"block": k.condition.label, "requested": k.requested, "applied": k.applied}
                for k in p.clamps
            ],
            "table": table_to_json(p.table),
        }
        lp = c.jdc_result
        out["jdc"] = {
            "status": str(lp.status),
            "residual": lp.residual,
            "tolerance": lp.tolerance,
            "pivots": lp.pivots,
            "witness": None if lp.witness is None else list(lp.witness.q),
        }
    return out


def build_report(results: dict, tables: dict) -> dict:
    combos, errors = [], []
    for name, res in results.items():
        if isinstance(res, BatchError):
            errors.append({"name": name, "error": f"{type(res.error).__name__}: {res.error}"})
        else:
            t = tables.get(name)
            combos.append(classification_to_dict(res, None if isinstance(t, Exception) else t))
    return {"schema_version": SCHEMA_VERSION, "combinations": combos, "errors": errors}


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2)


def _g(x) -> str:
    return "-" if x is None else f"{x:.6g}"


def render_text(report: dict) -> str:
    lines = []
    for c in report["combinations"]:
        lines.append(f"== {c['name']} ==")
        lines.append(f"verdict: {c['verdict']}")
        ms = c["marginal_selectivity"]
        lines.append(f"marginal selectivity ({ms['mode']}): "
                     + ("holds" if ms["holds"] else "fails")
                     + (" [override]" if ms["overridden"] else ""))
        for v in VARIABLES:
            chi = "" if ms["chi_squares"] is None else f"  chi2 {_g(ms['chi_squares'][v])}"
            lines.append(f"  diff({v}) {_g(ms['diffs'][v])}{chi}")
        if c["chsh"] is not None:
            ch = c["chsh"]
            lines.append("CHSH variants: " + " ".join(_g(s) for s in ch["variants"])
                         + f"  max |S| {_g(ch['max_abs'])}"
                         + (" VIOLATED" if ch["violated"] else ""))
            lines.append(f"  after projection: max |S| {_g(ch['projected_max_abs'])}")
            bc = c["bell_ch"]
            lines.append(f"Bell/CH ({bc['policy']}): "
                         + " ".join(_g(x) for x in bc["expressions"])
                         + ("  satisfied" if bc["satisfied"] else "  VIOLATED"))
            lp = c["jdc"]
            lines.append(f"joint distribution: {lp['status']} (residual {_g(lp['residual'])})")
            lines.append(f"projection max shift {_g(c['projection']['max_shift'])}")
        for note in c["notes"]:
            lines.append(f"note: {note}")
        lines.append("")
    for e in report["errors"]:
        lines.append(f"error: {e['name']}: {e['error']}")
    return "\n".join(lines).rstrip("\n") + "\n"


def classify_line(c: Classification) -> str:
    chsh_text = "-" if c.max_abs_chsh is None else f"{c.max_abs_chsh:.2f}"
    return f"{c.name}\t{c.verdict}\t{chsh_text}"
