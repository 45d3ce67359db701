"""Recursive-descent parser for the relational query language.

Statement form: `<var> = expr;` bindings followed by one result
expression (optionally written as a named header `NAME(args) = expr;`).
The `relationship` keyword before a relation primitive is accepted and
ignored for compatibility with pattern-matching query dialects.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import PatternError, QuerySyntaxError, UnboundVariable, UnknownRelation
from .model import (
    And, Binding, Closure, ContextExpr, CtxAtom, CtxEnum, CtxHierarchy,
    CtxImplementors, CtxPackage, CtxProject, CtxTypeMembers, CtxUnion,
    EntityTerm, MatchSet, MODIFIER_WORDS, NamePattern, Or, Primitive, Query,
    QueryExpr, RELATIONS, SELECTOR_KINDS, SourceOf, TargetOf, Term, VarRef,
    VarTerm, VirtualTerm,
)

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|//[^\n]*)
  | (?P<var><[A-Za-z_][A-Za-z0-9_]*>)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>[0-9]+)
  | (?P<andand>&&)
  | (?P<oror>\|\|)
  | (?P<punct>[()=;,.+*$:#])
""", re.VERBOSE)

_FUNC_WORDS = frozenset({"sourceof", "targetof", "closure", "relationship",
                         "entity", "virtual", "enum", "implementors"})


@dataclass(frozen=True)
class _Tok:
    type: str
    value: str
    pos: int

    @property
    def end(self) -> int:
        return self.pos + len(self.value)


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise QuerySyntaxError(f"unexpected character {text[i]!r}", i)
        i = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        value = m.group()
        if kind == "var":
            toks.append(_Tok("VAR", value[1:-1], m.start()))
        elif kind == "ident":
            toks.append(_Tok("IDENT", value, m.start()))
        elif kind == "number":
            toks.append(_Tok("NUMBER", value, m.start()))
        elif kind == "andand":
            toks.append(_Tok("ANDAND", value, m.start()))
        elif kind == "oror":
            toks.append(_Tok("OROR", value, m.start()))
        else:
            toks.append(_Tok(value, value, m.start()))
    toks.append(_Tok("EOF", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.defined: set[str] = set()

    # --- token helpers ----------------------------------------------------

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
            raise QuerySyntaxError(
                f"expected {ttype!r}, found {tok.value or 'end of input'!r}",
                tok.pos)
        return self.next()

    def at_ident(self, *values: str) -> bool:
        tok = self.peek()
        return tok.type == "IDENT" and tok.value in values

    # --- program ------------------------------------------------------------

    def parse_query(self) -> Query:
        bindings: list[Binding] = []
        while self.peek().type != "EOF":
            bindings.append(self.statement())
        if not bindings:
            raise QuerySyntaxError("empty query", 0)
        return Query(tuple(bindings), bindings[-1].expr)

    def statement(self) -> Binding:
        tok = self.peek()
        if tok.type == "VAR" and self.peek(1).type == "=":
            self.next()
            self.next()
            expr = self.expr()
            self.expect(";")
            self.defined.add(tok.value)
            return Binding(tok.value, None, expr)
        if tok.type == "IDENT" and self.peek(1).type == "(":
            j = self._matching_paren(self.i + 1)
            if j is not None and self.toks[j + 1].type == "=":
                header = self.text[tok.pos:self.toks[j].end]
                self.i = j + 2
                expr = self.expr()
                self.expect(";")
                return Binding(None, re.sub(r"\s+", " ", header), expr)
        expr = self.expr()
        self.expect(";")
        return Binding(None, None, expr)

    def _matching_paren(self, open_idx: int) -> int | None:
        depth = 0
        for j in range(open_idx, len(self.toks)):
            t = self.toks[j].type
            if t == "(":
                depth += 1
            elif t == ")":
                depth -= 1
                if depth == 0:
                    return j
            elif t == "EOF":
                return None
        return None

    # --- expressions ---------------------------------------------------------

    def expr(self) -> QueryExpr:
        left = self.and_expr()
        while self.peek().type == "OROR":
            self.next()
            left = Or(left, self.and_expr())
        return left

    def and_expr(self) -> QueryExpr:
        left = self.atom()
        while self.peek().type == "ANDAND":
            self.next()
            left = And(left, self.atom())
        return left

    def atom(self) -> QueryExpr:
        tok = self.peek()
        if tok.type == "VAR":
            self.next()
            if tok.value not in self.defined:
                raise UnboundVariable(tok.value)
            return VarRef(tok.value)
        if tok.type == "(":
            if self.peek(1).type == "IDENT" and self.peek(1).value == "project":
                self.next()
                self.next()
                name = self.expect("IDENT").value
                self.expect(")")
                return CtxAtom(CtxProject(name))
            self.next()
            inner = self.expr()
            self.expect(")")
            return inner
        if tok.type in ("*", "NUMBER"):
            return MatchSet(self.term())
        if tok.type != "IDENT":
            raise QuerySyntaxError(f"unexpected token {tok.value!r}", tok.pos)

        word = tok.value
        if word == "relationship":
            self.next()
            return self.atom()
        if word in ("sourceof", "targetof") and self.peek(1).type == "(":
            self.next()
            self.next()
            inner = self.expr()
            self.expect(")")
            return SourceOf(inner) if word == "sourceof" else TargetOf(inner)
        if word == "closure" and self.peek(1).type == "(":
            self.next()
            self.next()
            inner = self.expr()
            direction = None
            seeds = None
            if self.at_ident("from", "to"):
                direction = self.next().value
                seeds = self.expr()
            self.expect(")")
            return Closure(inner, seeds, direction)
        if word in RELATIONS and self.peek(1).type == "(":
            self.next()
            self.next()
            left = self.term()
            self.expect(",")
            right = self.term()
            self.expect(")")
            return Primitive(word, left, right)
        if word == "project":
            self.next()
            name = self.expect("IDENT").value
            return CtxAtom(CtxProject(name))
        if word == "package":
            self.next()
            return CtxAtom(CtxPackage(self.dotted_name()))
        if word == "implementors" and self.peek(1).type == "(":
            self.next()
            self.next()
            pat = self.pattern(selector=None)
            self.expect(")")
            return CtxAtom(CtxImplementors(pat))
        if word == "enum" and self.peek(1).type == "(":
            self.next()
            self.next()
            ids = self.raw_id_list()
            self.expect(")")
            return CtxAtom(CtxEnum(ids))
        if word == "type" and self.peek(1).type == "(":
            self.next()
            self.next()
            pat = self.pattern(selector="type")
            self.expect(")")
            return CtxAtom(CtxTypeMembers(pat))
        if self.peek(1).type == "(" and word not in _FUNC_WORDS:
            self._check_misspelled_relation(word)
        # Fall through: a bare term in expression position denotes the
        # set of entities it matches.
        return MatchSet(self.term())

    def _check_misspelled_relation(self, word: str) -> None:
        """A name(...) whose arguments look like relation terms (variables,
        kind selectors) cannot be a pattern; flag it as an unknown relation."""
        close = self._matching_paren(self.i + 1)
        if close is None:
            return
        termish = frozenset(SELECTOR_KINDS) | {"name", "entity", "virtual"}
        depth = 0
        for j in range(self.i + 1, close):
            t = self.toks[j]
            if t.type == "(":
                depth += 1
            elif t.type == ")":
                depth -= 1
            elif depth == 1 and (t.type == "VAR" or
                                 (t.type == "IDENT" and t.value in termish)):
                raise UnknownRelation(
                    f"unknown relation {word!r} (known: "
                    f"{', '.join(RELATIONS)})")

    # --- terms -----------------------------------------------------------

    def term(self) -> Term:
        tok = self.peek()
        if tok.type == "VAR":
            self.next()
            if tok.value not in self.defined:
                raise UnboundVariable(tok.value)
            hierarchy = False
            if self.peek().type == "+":
                self.next()
                hierarchy = True
            return VarTerm(tok.value, hierarchy)
        if tok.type == "IDENT" and tok.value == "entity" and self.peek(1).type == "(":
            self.next()
            self.next()
            raw = self.raw_until_close()
            return EntityTerm(raw)
        if tok.type == "IDENT" and tok.value == "virtual":
            self.next()
            return VirtualTerm(self.expect("IDENT").value)

        selector = None
        if tok.type == "IDENT" and tok.value in SELECTOR_KINDS or \
                (tok.type == "IDENT" and tok.value == "name"):
            nxt = self.peek(1)
            if nxt.type in ("IDENT", "NUMBER", "*") or \
                    (nxt.type == "(" and tok.value == "type"):
                selector = tok.value
                self.next()
        return self.pattern(selector)

    def pattern(self, selector: str | None) -> NamePattern:
        modifiers: set[str] = set()
        while self.peek().type == "IDENT" and self.peek().value in MODIFIER_WORDS \
                and self.peek(1).type in ("IDENT", "NUMBER", "*"):
            modifiers.add(self.next().value)

        parenthesized = False
        if self.peek().type == "(" and selector == "type":
            parenthesized = True
            self.next()

        return_wild = False
        if self.peek().type == "*":
            nxt = self.peek(1)
            # A star followed by a separate pattern is a return-type
            # wildcard; gluing is detected by source adjacency.
            if nxt.type in ("IDENT", "NUMBER") and nxt.pos > self.peek().end:
                return_wild = True
                self.next()

        segments = [self.segment()]
        while self.peek().type in (".", "$") and \
                self.peek(1).type in ("IDENT", "NUMBER", "*"):
            self.next()
            segments.append(self.segment())

        hierarchy = False
        if self.peek().type == "+":
            self.next()
            hierarchy = True

        params = None
        if self.peek().type == "(" and not parenthesized:
            params = self.param_list()
        if parenthesized:
            self.expect(")")

        if hierarchy and selector not in (None, "type", "class", "interface"):
            raise PatternError(
                f"hierarchy suffix '+' not allowed with selector {selector!r}")
        if params is not None and selector not in (None, "method", "member"):
            raise PatternError(
                f"parameter list not allowed with selector {selector!r}")
        return NamePattern(tuple(segments), selector, params, hierarchy,
                           frozenset(modifiers), return_wild)

    def segment(self) -> str:
        tok = self.peek()
        if tok.type not in ("IDENT", "NUMBER", "*"):
            raise QuerySyntaxError(
                f"expected name segment, found {tok.value or 'end of input'!r}",
                tok.pos)
        parts = [self.next()]
        while self.peek().type in ("IDENT", "NUMBER", "*") and \
                self.peek().pos == parts[-1].end:
            parts.append(self.next())
        return "".join(p.value for p in parts)

    def param_list(self) -> tuple[str, ...]:
        self.expect("(")
        if self.peek().type == ")":
            self.next()
            return ()
        if self.peek().type == ".":
            while self.peek().type == ".":
                self.next()
            self.expect(")")
            return ("..",)
        slots = [self.param_slot()]
        while self.peek().type == ",":
            self.next()
            slots.append(self.param_slot())
        self.expect(")")
        return tuple(slots)

    def param_slot(self) -> str:
        if self.peek().type == ".":
            while self.peek().type == ".":
                self.next()
            return ".."
        parts = [self.segment()]
        while self.peek().type == ".":
            self.next()
            parts.append(self.segment())
        return ".".join(parts)

    def dotted_name(self) -> str:
        parts = [self.expect("IDENT").value]
        while self.peek().type == "." and self.peek(1).type == "IDENT":
            self.next()
            parts.append(self.next().value)
        return ".".join(parts)

    def raw_until_close(self) -> str:
        """Consume tokens up to the matching ')' and return their raw text."""
        depth = 1
        start = self.peek().pos
        end = start
        while True:
            tok = self.next()
            if tok.type == "EOF":
                raise QuerySyntaxError("unterminated entity literal", start)
            if tok.type == "(":
                depth += 1
            elif tok.type == ")":
                depth -= 1
                if depth == 0:
                    return self.text[start:end].strip()
            end = tok.end

    def raw_id_list(self) -> tuple[str, ...]:
        ids: list[str] = []
        start = self.peek().pos
        end = start
        depth = 1
        while True:
            tok = self.peek()
            if tok.type == "EOF":
                raise QuerySyntaxError("unterminated enum(...)", start)
            if tok.type == "(":
                depth += 1
            elif tok.type == ")":
                depth -= 1
                if depth == 0:
                    chunk = self.text[start:end].strip()
                    if chunk:
                        ids.append(chunk)
                    return tuple(ids)
            elif tok.type == "," and depth == 1:
                chunk = self.text[start:end].strip()
                if chunk:
                    ids.append(chunk)
                self.next()
                start = self.peek().pos
                end = start
                continue
            self.next()
            end = tok.end


def parse_query(text: str) -> Query:
    """Parse a query program; raises QuerySyntaxError / UnboundVariable."""
    return _Parser(text).parse_query()


def parse_expr(text: str) -> QueryExpr:
    parser = _Parser(text.rstrip().rstrip(";"))
    expr = parser.expr()
    if parser.peek().type != "EOF":
        tok = parser.peek()
        raise QuerySyntaxError(f"trailing input {tok.value!r}", tok.pos)
    return expr


def parse_context(text: str) -> ContextExpr:
    """Parse a context expression (the restricted entity-set sub-language)."""
    expr = parse_expr(text)
    return _to_context(expr)


def _to_context(expr: QueryExpr) -> ContextExpr:
    if isinstance(expr, CtxAtom):
        return expr.ctx
    if isinstance(expr, Or):
        parts: list[ContextExpr] = []
        for side in (expr.left, expr.right):
            ctx = _to_context(side)
            if isinstance(ctx, CtxUnion):
                parts.extend(ctx.parts)
            else:
                parts.append(ctx)
        return CtxUnion(tuple(parts))
    if isinstance(expr, MatchSet):
        term = expr.term
        if isinstance(term, NamePattern):
            if term.hierarchy:
                return CtxHierarchy(term)
            if term.selector in (None, "type", "class", "interface"):
                return CtxTypeMembers(term)
    raise PatternError(f"not a context expression: {expr.pretty()}")


def context_to_expr(ctx: ContextExpr) -> QueryExpr:
    """Lift a context expression into the query expression space."""
    if isinstance(ctx, CtxUnion):
        parts = [context_to_expr(p) for p in ctx.parts]
        out = parts[0]
        for p in parts[1:]:
            out = Or(out, p)
        return out
    if isinstance(ctx, CtxHierarchy):
        return MatchSet(ctx.pattern)
    return CtxAtom(ctx)
