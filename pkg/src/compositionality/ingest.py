"""Reading trial CSVs, table JSON and free-association norms."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Optional, TextIO

from .errors import IncompleteTable, ParseError, ValidationError
from .model import (
    CELL_NAMES,
    CELL_SIGNS,
    CONDITIONS,
    CombinationTable,
    ConditionBlock,
    CountBlock,
    PrimingCondition,
    SenseOutcome,
    normalize,
)

TRIAL_COLUMNS = ("combination", "a_index", "b_index", "a_outcome", "b_outcome")
TABLE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class TrialRecord:
    combination: str
    condition: PrimingCondition
    a_outcome: SenseOutcome
    b_outcome: SenseOutcome
    subject_id: Optional[str] = None


@dataclass(frozen=True)
class AssociationNorm:
    cue: str
    associates: tuple  # (word, probability) pairs

    def __post_init__(self):
        assoc = tuple((str(w), float(p)) for w, p in self.associates)
        for w, p in assoc:
            if not math.isfinite(p) or p < 0:
                raise ValidationError(f"{self.cue}: associate {w!r} has probability {p!r}")
        total = math.fsum(p for _, p in assoc)
        if total > 1 + 1e-9:
            raise ValidationError(f"{self.cue}: associate probabilities sum to {total:.6g} > 1")
        object.__setattr__(self, "associates", assoc)


def _text(source) -> TextIO:
    return io.StringIO(source) if isinstance(source, str) else source


def parse_trials(source) -> list:
    """Parse a trials CSV (text or an open file) into TrialRecord objects.

    The header must start with ``combination,a_index,b_index,a_outcome,b_outcome``
    and may add ``subject_id``.  Any malformed row raises ParseError.
    """
    reader = csv.reader(_text(source))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("empty input, header row required", line=1) from None
    expected = list(TRIAL_COLUMNS)
    if header[:5] != expected or header[5:] not in ([], ["subject_id"]):
        raise ParseError(
            "header must be " + ",".join(expected) + "[,subject_id], got " + ",".join(header),
            line=1,
        )
    records = []
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", line=line)
        fields = dict(zip(header, (cell.strip() for cell in row)))
        if not fields["combination"]:
            raise ParseError("empty combination name", line=line, column="combination")
        idx = {}
        for col in ("a_index", "b_index"):
            try:
                idx[col] = int(fields[col])
            except ValueError:
                raise ParseError(f"{col} is not an integer", line=line, column=col) from None
            if idx[col] not in (1, 2):
                raise ParseError(f"{col} out of range", line=line, column=col)
        outcomes = {}
        for col in ("a_outcome", "b_outcome"):
            try:
                outcomes[col] = SenseOutcome.parse(fields[col])
            except ValueError:
                raise ParseError(f"{col} must be +1, 1 or -1", line=line, column=col) from None
        records.append(
            TrialRecord(
                combination=fields["combination"],
                condition=PrimingCondition(idx["a_index"], idx["b_index"]),
                a_outcome=outcomes["a_outcome"],
                b_outcome=outcomes["b_outcome"],
                subject_id=fields.get("subject_id") or None,
            )
        )
    return records


def write_trials(records: Iterable[TrialRecord], out: TextIO) -> None:
    records = list(records)
    with_subject = any(r.subject_id is not None for r in records)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TRIAL_COLUMNS + (("subject_id",) if with_subject else ()))
    for r in records:
        row = [r.combination, r.condition.a_index, r.condition.b_index,
               str(r.a_outcome), str(r.b_outcome)]
        if with_subject:
            row.append(r.subject_id or "")
        writer.writerow(row)


def count_blocks(records: Iterable[TrialRecord]) -> dict:
    """Per combination, the CountBlock of every condition (zero blocks included)."""
    tallies = defaultdict(Counter)
    order = []
    for r in records:
        if r.combination not in tallies:
            order.append(r.combination)
        tallies[r.combination][(r.condition, int(r.a_outcome), int(r.b_outcome))] += 1
    out = {}
    for name in order:
        t = tallies[name]
        out[name] = {
            cond: CountBlock(*(t[(cond, sa, sb)] for sa, sb in CELL_SIGNS), condition=cond)
            for cond in CONDITIONS
        }
    return out


def aggregate(records: Iterable[TrialRecord]) -> dict:
    """Group trials by combination into CombinationTables (in first-seen order)."""
    tables = {}
    for name, counts in count_blocks(records).items():
        missing = [c for c, cb in counts.items() if cb.n == 0]
        if missing:
            raise IncompleteTable(name, missing)
        tables[name] = CombinationTable({c: normalize(cb) for c, cb in counts.items()}, name=name)
    return tables


def table_from_json(obj: dict, default_name: str = "") -> CombinationTable:
    """Validate a decoded table object (see ``parse_table``)."""
    if not isinstance(obj, dict):
        raise ValidationError("table JSON must be an object")
    sizes = obj.get("n")
    blocks = {}
    for cond in CONDITIONS:
        key = cond.key
        if key not in obj:
            raise ValidationError(f"block {key} missing")
        raw = obj[key]
        n = sizes.get(key) if isinstance(sizes, dict) else sizes
        if isinstance(raw, dict):
            n = raw.get("n", n)
            raw = raw.get("p")
        if not isinstance(raw, list) or len(raw) != 4:
            raise ValidationError(f"block {key} must be a list of 4 numbers")
        cells = []
        for name, v in zip(CELL_NAMES, raw):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValidationError(f"block {key} cell {name}: not a number ({v!r})")
            if v < 0:
                raise ValidationError(f"block {key} cell {name}: negative probability {v!r}")
            cells.append(float(v))
        total = math.fsum(cells)
        if abs(total - 1.0) > TABLE_TOLERANCE:
            raise ValidationError(f"block {key} sums to {total:.6g}, not 1")
        if n is not None and (isinstance(n, bool) or not isinstance(n, int) or n <= 0):
            raise ValidationError(f"block {key}: n must be a positive integer, got {n!r}")
        blocks[cond] = ConditionBlock(*(c / total for c in cells), condition=cond, n=n)
    primes = obj.get("primes")
    if isinstance(primes, dict):
        primes = tuple(primes.get(k) for k in ("A1", "A2", "B1", "B2"))
    return CombinationTable(blocks, name=str(obj.get("name", default_name)), primes=primes)


def parse_table(source, default_name: str = "") -> CombinationTable:
    """Parse table JSON with blocks ``a1b1, a1b2, a2b1, a2b2`` in canonical cell order.

    Optional ``n`` is either one integer for all blocks or an object keyed by
    block.  A block may also be written ``{"p": [...], "n": 16}``.
    """
    text = source if isinstance(source, str) else source.read()
    try:
        obj = json.loads(text, parse_float=float)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    return table_from_json(obj, default_name)


def table_to_json(table: CombinationTable) -> dict:
    obj = {"name": table.name}
    if table.primes is not None:
        obj["primes"] = dict(zip(("A1", "A2", "B1", "B2"), table.primes))
    for cond, block in table.blocks.items():
        obj[cond.key] = list(block.cells)
    if any(b.n is not None for b in table):
        obj["n"] = {c.key: b.n for c, b in table.blocks.items()}
    return obj


def dump_table(table: CombinationTable) -> str:
    return json.dumps(table_to_json(table), indent=2)


def parse_norms(source) -> dict:
    """Read a ``cue,word,probability`` CSV into AssociationNorm objects keyed by cue."""
    reader = csv.reader(_text(source))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("empty norms file", line=1) from None
    if header != ["cue", "word", "probability"]:
        raise ParseError("header must be cue,word,probability", line=1)
    grouped = defaultdict(list)
    for row in reader:
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", line=reader.line_num)
        cue, word, prob = (c.strip() for c in row)
        try:
            p = float(prob)
        except ValueError:
            raise ParseError("probability is not a number", line=reader.line_num,
                             column="probability") from None
        grouped[cue].append((word, p))
    return {cue: AssociationNorm(cue, tuple(a)) for cue, a in grouped.items()}


def sense_probability(norm: AssociationNorm, sense_words) -> float:
    """Total recall probability of the associates that belong to one sense."""
    words = {w.lower() for w in sense_words}
    if not words:
        raise ValueError("sense_words must be nonempty")
    return math.fsum(p for w, p in norm.associates if w.lower() in words)
