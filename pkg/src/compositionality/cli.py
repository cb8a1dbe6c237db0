"""Command line entry point: ``compositionality {analyze,classify,synth,oracle}``.

Exit codes: 0 success, 1 oracle counterexamples found, 2 input or usage
error, 3 internal failure (simplex pivot budget exhausted).  Verdicts never
change the exit code.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from pathlib import Path

from . import ingest, report
from .classify import AnalysisConfig, BatchError, classify_batch
from .errors import CompositionalityError, IncompleteTable, IterationLimit
from .inequalities import parse_policy
from .model import CombinationTable, normalize
from .oracle import run_oracle
from .synth import GENERATOR, load_truth, sample_trials

CONFIG_ENV = "CONTEXTUALITY_CONFIG"

# config-file key -> AnalysisConfig field
_CONFIG_KEYS = {
    "alpha": "alpha",
    "critical_value": "critical_value",
    "yates": "yates",
    "ms": "ms_mode",
    "strict_tolerance": "strict_tolerance",
    "marginal_policy": "marginal_policy",
    "chsh_tolerance": "chsh_tolerance",
    "bellch_tolerance": "bellch_tolerance",
    "lp_tolerance": "lp_tolerance",
    "pivot_budget": "pivot_budget",
    "projection": "projection",
}


class InputError(Exception):
    pass


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _analysis_args(p):
    p.add_argument("input", help="trials CSV, table JSON, or directory of table JSON files")
    p.add_argument("--format", choices=("trials", "table", "tabledir"),
                   help="input format (default: guessed from the path)")
    p.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    p.add_argument("--alpha", type=float)
    p.add_argument("--critical-value", type=float)
    p.add_argument("--yates", action="store_true", default=None)
    p.add_argument("--ms", choices=("strict", "statistical"))
    p.add_argument("--strict-tolerance", type=float)
    p.add_argument("--override-ms", nargs="*", metavar="NAME",
                   help="treat these combinations (all, if no names) as passing selectivity")
    p.add_argument("--marginal-policy", help="average (default) or condition:i,j")
    p.add_argument("--chsh-tolerance", type=float)
    p.add_argument("--bellch-tolerance", type=float)
    p.add_argument("--lp-tolerance", type=float)
    p.add_argument("--pivot-budget", type=_positive_int)
    p.add_argument("--projection", choices=("least_squares", "average"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compositionality",
        description="Decide whether conceptual combinations are compositional.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full report per combination")
    _analysis_args(p)
    out = p.add_mutually_exclusive_group()
    out.add_argument("--json", dest="output", action="store_const", const="json")
    out.add_argument("--text", dest="output", action="store_const", const="text")
    p.set_defaults(output="json")

    p = sub.add_parser("classify", help="one line per combination: name, verdict, max |CHSH|")
    _analysis_args(p)

    p = sub.add_parser("synth", help="sample a trials CSV from ground truth")
    p.add_argument("--truth", required=True, help="ground truth JSON (joint or four blocks)")
    p.add_argument("--n", type=_positive_int, required=True, help="trials per condition")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output CSV path (default: stdout)")

    p = sub.add_parser("oracle", help="randomized Fine-theorem cross-checks")
    p.add_argument("--trials", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lp-tolerance", type=float, default=1e-7)
    p.add_argument("--dump", help="directory for counterexample tables (default: stderr)")
    return parser


def load_config(args) -> AnalysisConfig:
    values = {}
    path = args.config or os.environ.get(CONFIG_ENV)
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}") from None
        for key, value in data.items():
            key = key.replace("-", "_")
            if key in ("overrides", "override_ms"):
                values["overrides"] = frozenset(value)
            elif key in _CONFIG_KEYS:
                values[_CONFIG_KEYS[key]] = value
            else:
                raise InputError(f"unknown config key {key!r} in {path}")
    for key, field_name in _CONFIG_KEYS.items():
        v = getattr(args, key, None)
        if v is not None:
            values[field_name] = v
    if args.alpha is not None and args.critical_value is None:
        from scipy.stats import chi2

        values["critical_value"] = float(chi2.ppf(1 - args.alpha, 1))
    if isinstance(values.get("marginal_policy"), str):
        try:
            values["marginal_policy"] = parse_policy(values["marginal_policy"])
        except ValueError as exc:
            raise InputError(str(exc)) from None
    return AnalysisConfig(**values)


def _guess_format(path: Path) -> str:
    if path.is_dir():
        return "tabledir"
    return "table" if path.suffix.lower() == ".json" else "trials"


def load_tables(path: Path, fmt: str) -> dict:
    """name -> CombinationTable, or the exception that stopped one entry from loading."""
    if fmt == "tabledir":
        if not path.is_dir():
            raise InputError(f"{path} is not a directory")
        out = {}
        for f in sorted(path.glob("*.json")):
            try:
                t = ingest.parse_table(f.read_text(encoding="utf-8"), default_name=f.stem)
            except CompositionalityError as exc:
                out[f.stem] = exc
                continue
            out[t.name or f.stem] = t
        return out
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    if fmt == "table":
        t = ingest.parse_table(text, default_name=path.stem)
        return {t.name or path.stem: t}
    out = {}
    for name, counts in ingest.count_blocks(ingest.parse_trials(text)).items():
        missing = [c for c, cb in counts.items() if cb.n == 0]
        if missing:
            out[name] = IncompleteTable(name, missing)
        else:
            out[name] = CombinationTable({c: normalize(cb) for c, cb in counts.items()},
                                         name=name)
    return out


def _run_analysis(args):
    config = load_config(args)
    path = Path(args.input)
    if not path.exists():
        raise InputError(f"{path}: no such file or directory")
    tables = load_tables(path, args.format or _guess_format(path))
    overrides = ()
    if args.override_ms is not None:
        overrides = args.override_ms or list(tables)
    results = classify_batch(tables, config, overrides)
    return tables, results


def _status(results) -> int:
    errors = [r for r in results.values() if isinstance(r, BatchError)]
    if any(isinstance(e.error, IterationLimit) for e in errors):
        return 3
    return 2 if errors else 0


def cmd_analyze(args, stdout, stderr) -> int:
    tables, results = _run_analysis(args)
    rep = report.build_report(results, tables)
    stdout.write(report.dumps(rep) + "\n" if args.output == "json" else report.render_text(rep))
    for e in rep["errors"]:
        stderr.write(f"error: {e['name']}: {e['error']}\n")
    return _status(results)


def cmd_classify(args, stdout, stderr) -> int:
    _, results = _run_analysis(args)
    for res in results.values():
        if isinstance(res, BatchError):
            stderr.write(f"error: {res}\n")
        else:
            stdout.write(report.classify_line(res) + "\n")
    return _status(results)


def cmd_synth(args, stdout, stderr) -> int:
    try:
        text = Path(args.truth).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {args.truth}: {exc.strerror or exc}") from None
    try:
        truth = load_truth(text, seed=args.seed)
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.truth}: invalid JSON: {exc.msg}") from None
    records = sample_trials(truth, args.n, args.seed)
    meta = {"generator": GENERATOR, "seed": args.seed, "n_per_condition": args.n,
            "truth_kind": truth.kind, "truth": args.truth, "rows": len(records)}
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            ingest.write_trials(records, fh)
        Path(args.out + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    else:
        ingest.write_trials(records, stdout)
    return 0


def cmd_oracle(args, stdout, stderr, solver=None) -> int:
    summary = run_oracle(args.trials, args.seed, solver=solver, tolerance=args.lp_tolerance)
    for line in summary.lines():
        stdout.write(line + "\n")
    if summary.counterexamples:
        dump_dir = Path(args.dump) if args.dump else None
        if dump_dir:
            dump_dir.mkdir(parents=True, exist_ok=True)
        for k, c in enumerate(summary.counterexamples):
            obj = dict(ingest.table_to_json(c.table), suite=c.suite, detail=c.detail)
            if dump_dir:
                (dump_dir / f"counterexample-{k:04d}.json").write_text(json.dumps(obj, indent=2))
            else:
                stderr.write(json.dumps(obj) + "\n")
    return 0 if summary.ok else 1


def main(argv=None, stdout=None, stderr=None, oracle_solver=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "analyze":
            return cmd_analyze(args, stdout, stderr)
        if args.command == "classify":
            return cmd_classify(args, stdout, stderr)
        if args.command == "synth":
            return cmd_synth(args, stdout, stderr)
        return cmd_oracle(args, stdout, stderr, solver=oracle_solver)
    except (InputError, CompositionalityError, ValueError) as exc:
        if isinstance(exc, IterationLimit):
            stderr.write(f"internal error: {exc}\n")
            return 3
        stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
