"""Recursive-descent parser for OOSL source files.

OOSL is a conventional curly-brace object-oriented subset: one package
declaration per file, class/interface declarations with extends and
implements clauses, typed fields, methods with throws clauses, nested and
anonymous types, and a statement language of locals, assignments, calls,
creations, throws, returns and if/while/for.
"""

from __future__ import annotations

import re

from ..errors import OoslSyntaxError
from .ast import (
    Assign, Binary, Block, Call, Expr, ExprStmt, FieldAccess, FieldDecl, For,
    If, Literal, LocalDecl, MethodDecl, Name, New, Param, Return, SourceUnit,
    Stmt, Throw, TypeDecl, Unary, VarRead, While,
)

KEYWORDS = frozenset({
    "package", "class", "interface", "extends", "implements", "throws",
    "new", "return", "throw", "if", "else", "while", "for", "this",
    "true", "false", "null",
})

MODIFIERS = ("public", "private", "protected", "static", "abstract", "final")

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>[0-9]+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<op>==|!=|<=|>=|&&|\|\||[{}();,.=<>!+\-*/%])
""", re.VERBOSE | re.DOTALL)


class _Tok:
    __slots__ = ("type", "value", "line", "col")

    def __init__(self, type_: str, value: str, line: int, col: int):
        self.type = type_
        self.value = value
        self.line = line
        self.col = col

    def __repr__(self) -> str:
        return f"{self.type}({self.value!r})@{self.line}"


def _tokenize(text: str, path: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i = 0
    line = 1
    line_start = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            col = i - line_start + 1
            raise OoslSyntaxError(path, line, col,
                                  f"unexpected character {text[i]!r}")
        kind = m.lastgroup
        value = m.group()
        col = i - line_start + 1
        if kind == "ident":
            ttype = value if value in KEYWORDS else "IDENT"
            toks.append(_Tok(ttype, value, line, col))
        elif kind == "number":
            toks.append(_Tok("NUMBER", value, line, col))
        elif kind == "string":
            toks.append(_Tok("STRING", value, line, col))
        elif kind == "op":
            toks.append(_Tok(value, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + value.rindex("\n") + 1
        i = m.end()
    toks.append(_Tok("EOF", "", line, 1))
    return toks


class Parser:
    def __init__(self, text: str, path: str):
        self.path = path
        self.toks = _tokenize(text, path)
        self.i = 0

    def peek(self, ahead: int = 0) -> _Tok:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        if tok.type != "EOF":
            self.i += 1
        return tok

    def expect(self, ttype: str) -> _Tok:
        tok = self.peek()
        if tok.type != ttype:
            raise OoslSyntaxError(
                self.path, tok.line, tok.col,
                f"found {tok.value or 'end of file'!r}", (ttype,))
        return self.next()

    def error(self, message: str, expected: tuple[str, ...] = ()) -> OoslSyntaxError:
        tok = self.peek()
        return OoslSyntaxError(self.path, tok.line, tok.col, message, expected)

    # --- unit ---------------------------------------------------------------

    def parse_unit(self) -> SourceUnit:
        self.expect("package")
        package = self.dotted_name().text
        self.expect(";")
        types = []
        while self.peek().type != "EOF":
            types.append(self.type_decl())
        return SourceUnit(self.path, package, types)

    def dotted_name(self) -> Name:
        tok = self.expect("IDENT")
        parts = [tok.value]
        while self.peek().type == "." and self.peek(1).type == "IDENT":
            self.next()
            parts.append(self.next().value)
        return Name(".".join(parts), tok.line)

    def modifiers(self) -> list[str]:
        mods = []
        while self.peek().type == "IDENT" and self.peek().value in MODIFIERS:
            mods.append(self.next().value)
        return mods

    # --- declarations ---------------------------------------------------------

    def type_decl(self) -> TypeDecl:
        mods = self.modifiers()
        tok = self.peek()
        if tok.type not in ("class", "interface"):
            raise self.error("expected a type declaration",
                             ("class", "interface"))
        kind = self.next().type
        name_tok = self.expect("IDENT")
        extends: list[Name] = []
        implements: list[Name] = []
        if self.peek().type == "extends":
            self.next()
            extends.append(self.dotted_name())
            while kind == "interface" and self.peek().type == ",":
                self.next()
                extends.append(self.dotted_name())
        if kind == "class" and self.peek().type == "implements":
            self.next()
            implements.append(self.dotted_name())
            while self.peek().type == ",":
                self.next()
                implements.append(self.dotted_name())
        self.expect("{")
        members = []
        while self.peek().type != "}":
            members.append(self.member(name_tok.value))
        end = self.expect("}")
        return TypeDecl(mods, kind, name_tok.value, extends, implements,
                        members, name_tok.line, end.line)

    def member(self, enclosing_name: str):
        mods = self.modifiers()
        tok = self.peek()
        if tok.type in ("class", "interface"):
            decl = self.type_decl()
            decl.modifiers = mods + decl.modifiers
            return decl
        if tok.type == "IDENT" and tok.value == enclosing_name and \
                self.peek(1).type == "(":
            name_tok = self.next()
            params = self.param_list()
            throws = self.throws_clause()
            body, end_line = self.method_body()
            return MethodDecl(mods, None, name_tok.value, params, throws,
                              body, name_tok.line, end_line)
        rtype = self.type_ref()
        name_tok = self.expect("IDENT")
        if self.peek().type == "(":
            params = self.param_list()
            throws = self.throws_clause()
            body, end_line = self.method_body()
            return MethodDecl(mods, rtype, name_tok.value, params, throws,
                              body, name_tok.line, end_line)
        self.expect(";")
        return FieldDecl(mods, rtype, name_tok.value, name_tok.line)

    def type_ref(self) -> Name:
        if self.peek().type != "IDENT":
            raise self.error("expected a type name", ("IDENT",))
        return self.dotted_name()

    def param_list(self) -> list[Param]:
        self.expect("(")
        params = []
        if self.peek().type != ")":
            while True:
                ptype = self.type_ref()
                pname = self.expect("IDENT")
                params.append(Param(ptype, pname.value, pname.line))
                if self.peek().type != ",":
                    break
                self.next()
        self.expect(")")
        return params

    def throws_clause(self) -> list[Name]:
        names = []
        if self.peek().type == "throws":
            self.next()
            names.append(self.dotted_name())
            while self.peek().type == ",":
                self.next()
                names.append(self.dotted_name())
        return names

    def method_body(self) -> tuple[list[Stmt] | None, int]:
        if self.peek().type == ";":
            end = self.next()
            return None, end.line
        self.expect("{")
        body = []
        while self.peek().type != "}":
            body.append(self.statement())
        end = self.expect("}")
        return body, end.line

    # --- statements ------------------------------------------------------------

    def statement(self) -> Stmt:
        tok = self.peek()
        if tok.type == "{":
            self.next()
            body = []
            while self.peek().type != "}":
                body.append(self.statement())
            self.expect("}")
            return Block(body, tok.line)
        if tok.type == "return":
            self.next()
            value = None if self.peek().type == ";" else self.expression()
            self.expect(";")
            return Return(value, tok.line)
        if tok.type == "throw":
            self.next()
            value = self.expression()
            self.expect(";")
            return Throw(value, tok.line)
        if tok.type == "if":
            self.next()
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            then = self.branch_body()
            orelse: list[Stmt] = []
            if self.peek().type == "else":
                self.next()
                orelse = self.branch_body()
            return If(cond, then, orelse, tok.line)
        if tok.type == "while":
            self.next()
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            return While(cond, self.branch_body(), tok.line)
        if tok.type == "for":
            self.next()
            self.expect("(")
            init = None
            if self.peek().type != ";":
                init = self.simple_statement(consume_semi=False)
            self.expect(";")
            cond = None if self.peek().type == ";" else self.expression()
            self.expect(";")
            update = None if self.peek().type == ")" else \
                self.simple_statement(consume_semi=False)
            self.expect(")")
            return For(init, cond, update, self.branch_body(), tok.line)
        return self.simple_statement(consume_semi=True)

    def branch_body(self) -> list[Stmt]:
        stmt = self.statement()
        if isinstance(stmt, Block):
            return stmt.body
        return [stmt]

    def simple_statement(self, consume_semi: bool) -> Stmt:
        tok = self.peek()
        # Local declaration: two identifier paths in a row.
        if tok.type == "IDENT":
            mark = self.i
            try:
                tname = self.dotted_name()
            except OoslSyntaxError:
                self.i = mark
                tname = None
            if tname is not None and self.peek().type == "IDENT":
                name_tok = self.next()
                init = None
                if self.peek().type == "=":
                    self.next()
                    init = self.expression()
                if consume_semi:
                    self.expect(";")
                return LocalDecl(tname, name_tok.value, init, name_tok.line)
            self.i = mark
        # Assignment: [recv.]name = expr
        if tok.type in ("IDENT", "this"):
            mark = self.i
            recv = None
            name = None
            if tok.type == "this" and self.peek(1).type == "." and \
                    self.peek(2).type == "IDENT" and self.peek(3).type == "=" \
                    and self.peek(4).type != "=":
                self.next()
                self.next()
                recv = "this"
                name = self.next().value
            elif tok.type == "IDENT" and self.peek(1).type == "." and \
                    self.peek(2).type == "IDENT" and self.peek(3).type == "=" \
                    and self.peek(4).type != "=":
                recv = self.next().value
                self.next()
                name = self.next().value
            elif tok.type == "IDENT" and self.peek(1).type == "=" and \
                    self.peek(2).type != "=":
                name = self.next().value
            if name is not None:
                self.expect("=")
                value = self.expression()
                if consume_semi:
                    self.expect(";")
                return Assign(recv, name, value, tok.line)
            self.i = mark
        expr = self.expression()
        if consume_semi:
            self.expect(";")
        return ExprStmt(expr, tok.line)

    # --- expressions -----------------------------------------------------------

    def expression(self) -> Expr:
        return self.or_expr()

    def _binary_level(self, ops: tuple[str, ...], sub) -> Expr:
        left = sub()
        while self.peek().type in ops:
            op = self.next()
            left = Binary(op.value, left, sub(), op.line)
        return left

    def or_expr(self) -> Expr:
        return self._binary_level(("||",), self.and_expr)

    def and_expr(self) -> Expr:
        return self._binary_level(("&&",), self.eq_expr)

    def eq_expr(self) -> Expr:
        return self._binary_level(("==", "!="), self.rel_expr)

    def rel_expr(self) -> Expr:
        return self._binary_level(("<", ">", "<=", ">="), self.add_expr)

    def add_expr(self) -> Expr:
        return self._binary_level(("+", "-"), self.mul_expr)

    def mul_expr(self) -> Expr:
        return self._binary_level(("*", "/", "%"), self.unary_expr)

    def unary_expr(self) -> Expr:
        tok = self.peek()
        if tok.type in ("!", "-"):
            self.next()
            return Unary(tok.value, self.unary_expr(), tok.line)
        return self.primary()

    def primary(self) -> Expr:
        tok = self.peek()
        if tok.type == "(":
            self.next()
            inner = self.expression()
            self.expect(")")
            return inner
        if tok.type in ("NUMBER", "STRING", "true", "false", "null"):
            self.next()
            return Literal(tok.value, tok.line)
        if tok.type == "new":
            self.next()
            tname = self.dotted_name()
            args = self.call_args()
            body = None
            if self.peek().type == "{":
                self.next()
                body = []
                while self.peek().type != "}":
                    body.append(self.member(""))
                self.expect("}")
            return New(tname, args, body, tok.line)
        if tok.type == "this":
            self.next()
            if self.peek().type == "." and self.peek(1).type == "IDENT":
                self.next()
                name_tok = self.next()
                if self.peek().type == "(":
                    return Call("this", name_tok.value, self.call_args(),
                                name_tok.line)
                return FieldAccess("this", name_tok.value, name_tok.line)
            return VarRead("this", tok.line)
        if tok.type == "IDENT":
            path = [self.next().value]
            while self.peek().type == "." and self.peek(1).type == "IDENT":
                self.next()
                path.append(self.next().value)
            if self.peek().type == "(":
                receiver = ".".join(path[:-1]) if len(path) > 1 else None
                return Call(receiver, path[-1], self.call_args(), tok.line)
            if len(path) == 1:
                return VarRead(path[0], tok.line)
            return FieldAccess(".".join(path[:-1]), path[-1], tok.line)
        raise self.error("expected an expression")

    def call_args(self) -> list[Expr]:
        self.expect("(")
        args = []
        if self.peek().type != ")":
            while True:
                args.append(self.expression())
                if self.peek().type != ",":
                    break
                self.next()
        self.expect(")")
        return args


def parse_file(text: str, path: str) -> SourceUnit:
    return Parser(text, path).parse_unit()


def parse_files(files: list[tuple[str, str]]) -> tuple[list[SourceUnit], list[OoslSyntaxError]]:
    """Parse (path, text) pairs; returns units and per-file diagnostics."""
    units: list[SourceUnit] = []
    diagnostics: list[OoslSyntaxError] = []
    for path, text in files:
        try:
            units.append(parse_file(text, path))
        except OoslSyntaxError as exc:
            diagnostics.append(exc)
    return units, diagnostics
