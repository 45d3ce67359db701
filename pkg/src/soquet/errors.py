"""Exception hierarchy shared by all soquet components."""

from __future__ import annotations


class SoquetError(Exception):
    """Base class for all errors raised by this package."""


class UserError(SoquetError):
    """Errors caused by bad input (CLI exit code 1)."""


# --- fact store ---------------------------------------------------------

class StoreSealed(UserError):
    pass


class DuplicateConflict(UserError):
    pass


class DanglingParent(UserError):
    pass


class EndpointMissing(UserError):
    pass


class KindMismatch(UserError):
    pass


class CycleDetected(UserError):
    def __init__(self, message: str, cycle: list[str] | None = None):
        super().__init__(message)
        self.cycle = cycle or []


class ForestViolation(UserError):
    pass


class ParseError(UserError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class SchemaVersionMismatch(UserError):
    pass


# --- oosl frontend ------------------------------------------------------

class OoslSyntaxError(UserError):
    def __init__(self, file: str, line: int, column: int, message: str,
                 expected: tuple[str, ...] = ()):
        detail = f"{file}:{line}:{column}: {message}"
        if expected:
            detail += " (expected " + " or ".join(expected) + ")"
        super().__init__(detail)
        self.file = file
        self.line = line
        self.column = column
        self.expected = expected


# --- query language -----------------------------------------------------

class QuerySyntaxError(UserError):
    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None else f"at offset {position}: {message}")
        self.position = position


class UnknownRelation(UserError):
    pass


class UnboundVariable(UserError):
    pass


class PatternError(UserError):
    pass


class ArityMismatch(UserError):
    pass


class ClosureOnEntitySet(UserError):
    pass


# --- sort builders ------------------------------------------------------

class SortParamError(UserError):
    pass


class TargetUnresolved(SortParamError):
    pass


class ReferenceUnresolved(SortParamError):
    pass


class NotAMemberOfType(SortParamError):
    pass


class TypeUnresolved(SortParamError):
    pass


class CallerUnresolved(SortParamError):
    pass


class RoleUnresolved(SortParamError):
    pass


class SeedUnresolved(SortParamError):
    pass


class ExceptionUnresolved(SortParamError):
    pass


class EmptyContext(SortParamError):
    pass


class FieldUnresolved(SortParamError):
    pass


class UnknownPattern(SortParamError):
    pass


class MissingBinding(SortParamError):
    def __init__(self, name: str):
        super().__init__(f"missing binding: {name}")
        self.name = name


# --- concern model ------------------------------------------------------

class NotAComposite(UserError):
    pass


class NameClash(UserError):
    pass


class CycleAttempt(UserError):
    pass


class NoMatchingMember(UserError):
    pass


class EmptyMemberSet(UserError):
    pass


class SchemaError(UserError):
    pass


class DanglingEntityRef(UserError):
    pass
