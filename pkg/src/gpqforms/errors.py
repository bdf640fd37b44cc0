"""Exception hierarchy with stable machine-readable codes."""

from __future__ import annotations


class GPQError(Exception):
    """Base class; every subclass carries a stable ``code`` string."""

    code = "error"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.code)
        self.details = details

    def to_dict(self) -> dict:
        out = {"code": self.code, "message": str(self)}
        if self.details:
            out["details"] = {k: str(v) for k, v in sorted(self.details.items())}
        return out


class DivisionByZeroError(GPQError, ZeroDivisionError):
    code = "division-by-zero"


class RingMismatchError(GPQError, TypeError):
    code = "ring-mismatch"


class DegreeOverflowError(GPQError, OverflowError):
    code = "degree-overflow"


class IncompatibleAutomorphismError(GPQError, ValueError):
    code = "incompatible-automorphism"


class NotAdmissibleError(GPQError, ValueError):
    code = "not-admissible"


class PairMismatchError(GPQError, ValueError):
    code = "pair-mismatch"


class ZeroScalarError(GPQError, ValueError):
    code = "zero-scalar"


class DimensionMismatchError(GPQError, ValueError):
    code = "dimension-mismatch"


class NotReflexiveError(GPQError, ValueError):
    code = "not-reflexive"


class NotTraceValuedError(GPQError, ValueError):
    code = "not-trace-valued"


class FullCodefectError(GPQError, ValueError):
    code = "full-codefect"


class Q2ViolationError(GPQError, ValueError):
    code = "q2-violation"


class NotSingularError(GPQError, ValueError):
    code = "basis-not-singular"


class NotSpanningError(GPQError, ValueError):
    code = "basis-not-spanning"


class UnsupportedError(GPQError, NotImplementedError):
    code = "unsupported"


class InfiniteRingError(GPQError, ValueError):
    code = "infinite-ring"


class SizeCapError(GPQError, ValueError):
    code = "size-cap-exceeded"


class AmbientMismatchError(GPQError, ValueError):
    code = "ambient-mismatch"


class QuotientNotDefinedError(GPQError, ValueError):
    code = "quotient-not-defined"


class NotDirectSumError(GPQError, ValueError):
    code = "not-a-direct-sum"


class TrivialFormError(GPQError, ValueError):
    code = "trivial-form"


class InvalidGeometryError(GPQError, ValueError):
    code = "invalid-geometry"


class GridGeometryError(InvalidGeometryError):
    code = "grid-geometry"


class NoFormFoundError(GPQError, ValueError):
    code = "no-form-found"


class AmbiguousFormError(GPQError, ValueError):
    code = "ambiguous"


class VerificationFailedError(GPQError, AssertionError):
    code = "verification-failed"


class ParseError(GPQError, ValueError):
    """Malformed input text; ``line`` and ``column`` are 1-based when known."""

    code = "parse-error"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


ERROR_CODES = sorted(
    {cls.code for cls in [GPQError, *GPQError.__subclasses__()]}
    | {GridGeometryError.code}
)
