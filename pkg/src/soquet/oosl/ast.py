"""Syntax tree for the OOSL subset language."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class Name:
    """A possibly dotted type or value name as written in source."""
    text: str
    line: int

    @property
    def simple(self) -> str:
        return self.text.rsplit(".", 1)[-1]


# --- expressions ----------------------------------------------------------

@dataclass
class Literal:
    value: str
    line: int


@dataclass
class VarRead:
    name: str
    line: int


@dataclass
class FieldAccess:
    receiver: str | None  # identifier, "this", or None for bare reads
    name: str
    line: int


@dataclass
class Call:
    receiver: str | None  # identifier, dotted type name, "this", or None
    name: str
    args: list["Expr"]
    line: int


@dataclass
class New:
    type_name: Name
    args: list["Expr"]
    body: "list[Member] | None"  # anonymous class body
    line: int


@dataclass
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    line: int


@dataclass
class Unary:
    op: str
    operand: "Expr"
    line: int


Expr = Literal | VarRead | FieldAccess | Call | New | Binary | Unary


# --- statements ------------------------------------------------------------

@dataclass
class LocalDecl:
    type_name: Name
    name: str
    init: Expr | None
    line: int


@dataclass
class Assign:
    receiver: str | None  # identifier, "this", or None
    name: str
    value: Expr
    line: int


@dataclass
class ExprStmt:
    expr: Expr
    line: int


@dataclass
class Return:
    value: Expr | None
    line: int


@dataclass
class Throw:
    value: Expr
    line: int


@dataclass
class If:
    cond: Expr
    then: list["Stmt"]
    orelse: list["Stmt"]
    line: int


@dataclass
class While:
    cond: Expr
    body: list["Stmt"]
    line: int


@dataclass
class For:
    init: "Stmt | None"
    cond: Expr | None
    update: "Stmt | None"
    body: list["Stmt"]
    line: int


@dataclass
class Block:
    body: list["Stmt"]
    line: int


Stmt = LocalDecl | Assign | ExprStmt | Return | Throw | If | While | For | Block


# --- declarations ------------------------------------------------------------

@dataclass
class Param:
    type_name: Name
    name: str
    line: int


@dataclass
class FieldDecl:
    modifiers: list[str]
    type_name: Name
    name: str
    line: int


@dataclass
class MethodDecl:
    modifiers: list[str]
    return_type: Name | None  # None marks a constructor
    name: str
    params: list[Param]
    throws: list[Name]
    body: list[Stmt] | None  # None for abstract/interface methods
    line: int
    end_line: int


@dataclass
class TypeDecl:
    modifiers: list[str]
    kind: str  # "class" | "interface"
    name: str
    extends: list[Name]
    implements: list[Name]
    members: "list[Member]"
    line: int
    end_line: int


Member = FieldDecl | MethodDecl | TypeDecl


@dataclass
class SourceUnit:
    path: str
    package: str
    types: list[TypeDecl]
