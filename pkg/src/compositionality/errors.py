"""Exception hierarchy shared by every module."""


class CompositionalityError(Exception):
    """Base class for all errors raised by this package."""


class ZeroTrials(CompositionalityError, ValueError):
    pass


class ValidationError(CompositionalityError, ValueError):
    pass


class ParseError(CompositionalityError, ValueError):
    """Malformed input row.  Carries the 1-based line number and column name."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.reason = message


class IncompleteTable(CompositionalityError, ValueError):
    def __init__(self, combination, missing):
        self.combination = combination
        self.missing = tuple(missing)
        names = ", ".join(f"A{c.a_index}B{c.b_index}" for c in self.missing)
        super().__init__(f"{combination!r}: no trials for condition(s) {names}")


class InvalidSampleSize(CompositionalityError, ValueError):
    pass


class MissingSampleSizes(CompositionalityError, ValueError):
    pass


class IterationLimit(CompositionalityError, RuntimeError):
    """Simplex exceeded its pivot budget."""

    def __init__(self, pivots, best_residual):
        self.pivots = pivots
        self.best_residual = best_residual
        super().__init__(
            f"pivot budget exhausted after {pivots} pivots "
            f"(best residual {best_residual:.3g})"
        )
