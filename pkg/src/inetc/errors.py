"""Exception types and validation-violation records shared across the engine."""

from __future__ import annotations

from dataclasses import dataclass, field


class InetError(Exception):
    """Base class for all engine errors."""


class UnknownSymbol(InetError):
    pass


class UnknownAgent(InetError):
    pass


class InvalidPortRef(InetError):
    pass


class PortOccupied(InetError):
    pass


class SelfEndpoint(InetError):
    pass


class UnknownEdge(InetError):
    pass


class RedexStale(InetError):
    pass


class RuleMismatch(InetError):
    pass


class UnknownSelection(InetError):
    pass


class UnknownRule(InetError):
    pass


class UnlocatedRule(InetError):
    pass


class StepLimitExceeded(InetError):
    pass


class UnknownNode(InetError):
    pass


class UnknownStrategy(InetError):
    pass


@dataclass(frozen=True)
class Violation:
    """One validation finding. Violations are data, not exceptions."""

    code: str
    message: str
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


@dataclass
class Report:
    """Outcome of a validate_* call: ok iff no violations were collected."""

    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str, line: int = 0, col: int = 0) -> None:
        self.violations.append(Violation(code, message, line, col))

    def extend(self, other: "Report") -> None:
        self.violations.extend(other.violations)

    def __bool__(self) -> bool:
        return self.ok


class ParseError(InetError):
    """Syntax error with position and the token set that was expected."""

    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.expected = expected

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


class ResolveError(InetError):
    """A cross-reference in otherwise well-formed syntax failed to resolve."""

    def __init__(self, code: str, message: str, line: int = 0, col: int = 0):
        super().__init__(message)
        self.code = code
        self.message = message
        self.line = line
        self.col = col

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.code}: {self.message}"


class DocumentError(InetError):
    """Raised when a document fails validation; carries the full report."""

    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(str(v) for v in violations) or "invalid document")
        self.violations = violations
