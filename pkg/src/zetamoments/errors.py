"""Exception hierarchy shared across the toolkit.

The CLI maps these onto distinct exit codes, so keeping them in one
place avoids circular imports between the numerical modules.
"""


class ZetamomentsError(Exception):
    """Base class for all toolkit errors."""


class SieveSizeError(ZetamomentsError):
    """Requested table does not fit the configured memory budget (or limit < 2)."""


class EvaluationRangeError(ZetamomentsError):
    """Argument outside the region where the evaluator meets its accuracy target."""


class ZeroImportError(ZetamomentsError):
    """Malformed or non-monotone zero table; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class CacheInvalidError(ZetamomentsError):
    """Cached zero file failed checksum, count, or format validation."""


class MissedZerosError(ZetamomentsError):
    """Zero scan could not reach the expected count; names the suspect interval."""

    def __init__(self, message: str, interval: tuple[float, float]):
        super().__init__(f"{message} in interval [{interval[0]:.6f}, {interval[1]:.6f}]")
        self.interval = interval


class InconsistentZeroError(ZetamomentsError):
    """The two zeta'(rho) evaluation paths disagree at this ordinate."""

    def __init__(self, gamma: float, rel_diff: float):
        super().__init__(
            f"zeta' cross-check failed at gamma={gamma!r} (relative difference {rel_diff:.3e}); "
            "zero flagged for re-refinement"
        )
        self.gamma = gamma
        self.rel_diff = rel_diff


class NumericalInconsistencyError(ZetamomentsError):
    """An exact invariant (e.g. the Hoelder inequality) failed on computed data."""
