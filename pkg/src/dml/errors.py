"""Exception hierarchy shared by the engine, the parser and the CLI."""
from __future__ import annotations


class DMLError(Exception):
    """Base class for every domain error raised by this package."""


class UnknownEntity(DMLError):
    pass


class NonComposable(DMLError):
    pass


class NonParallelPaths(DMLError):
    pass


class InvalidSpan(DMLError):
    pass


class CompositeLegTarget(DMLError):
    pass


class KindClash(DMLError):
    pass


class NameTaken(DMLError):
    pass


class NonCommutingCone(DMLError):
    pass


class BaseMismatch(DMLError):
    pass


class IllFormedGraphMorphism(DMLError):
    pass


class NoSharedApex(DMLError):
    pass


class NotAPushout(DMLError):
    pass


class MissingInterfaceMember(DMLError):
    def __init__(self, member: str, actual: str = ""):
        self.member = member
        super().__init__(f"{actual or 'actual parameter'} lacks required member {member!r}")


class NotGeneric(DMLError):
    pass


class NotInstantiable(DMLError):
    pass


class NotAbstract(DMLError):
    pass


class ExtensionMismatch(DMLError):
    pass


class UnimplementedVirtual(DMLError):
    def __init__(self, member: str, derived: str = ""):
        self.member = member
        super().__init__(f"{derived or 'derived class'} leaves {member!r} pure virtual")


class UnsupportedConstruct(DMLError):
    pass


class InvalidDiagram(DMLError):
    """Raised when an operation needs a well-formed diagram and gets violations."""

    def __init__(self, violations, message: str | None = None):
        self.violations = list(violations)
        if message is None:
            head = "; ".join(str(v) for v in self.violations[:3])
            more = len(self.violations) - 3
            message = head + (f" (+{more} more)" if more > 0 else "")
        super().__init__(message)


class ValidationError(InvalidDiagram):
    """Well-formed source text describing an ill-formed diagram."""


class ParseError(DMLError):
    def __init__(self, message: str, location, expected=()):
        self.message = message
        self.location = location
        self.expected = list(expected)
        where = f"{location.line}:{location.column}"
        hint = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}: {message}{hint}")
