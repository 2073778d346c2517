"""Exception types shared across the package."""


class NbqcError(Exception):
    """Base class for all domain errors."""


class ParseError(NbqcError):
    """Malformed circuit source."""

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class UnsupportedGate(ParseError):
    """Gate outside the supported Clifford+T subset (e.g. rotation gates)."""

    def __init__(self, name: str, line: int):
        self.name = name
        super().__init__(line, f"unsupported gate '{name}'")


class InvalidDegree(NbqcError):
    """Channel count per node too small for the requested structure."""


class NonBlockingViolation(NbqcError):
    """Clos parameters violate the strict-sense non-blocking condition t >= 2s-1."""


class Unroutable(NbqcError):
    """The network topologically lacks any path for an operation.

    Distinct from waiting: no amount of Bell regeneration makes the
    operation executable.
    """

    def __init__(self, op_index: int, detail: str):
        self.op_index = op_index
        self.detail = detail
        super().__init__(f"op {op_index}: {detail}")


class BudgetTooSmall(NbqcError):
    """Node budget below the minimal (all links = 1) network size."""
