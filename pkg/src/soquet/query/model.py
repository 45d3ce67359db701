"""Query syntax trees: name patterns, terms, context expressions, results.

Every node pretty-prints to the concrete query syntax; parse(pretty(x))
reconstructs an equal tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..facts import Location

# Relations backed directly by stored facts.
DIRECT_RELATIONS = {
    "invokes": "Invokes",
    "declares": "Declares",
    "contains": "Contains",
    "implements": "Implements",
    "extends": "Extends",
    "throws": "Throws",
    "args": "ArgPass",
    "get": "Get",
    "set": "Set",
    "creates": "Creates",
    "fieldtype": "FieldType",
    "returntype": "ReturnType",
}

# Derived relations computed by the evaluator.
DERIVED_RELATIONS = ("references", "compares", "params")

RELATIONS = tuple(DIRECT_RELATIONS) + DERIVED_RELATIONS

SELECTOR_KINDS = {
    "type": ("Class", "Interface"),
    "class": ("Class",),
    "interface": ("Interface",),
    "method": ("Method", "Constructor"),
    "field": ("Field",),
    "package": ("Package",),
    "member": ("Method", "Constructor", "Field"),
    "var": ("LocalVariable",),
    "param": ("Parameter",),
    "project": ("Project",),
}

MODIFIER_WORDS = ("public", "private", "protected", "static", "abstract", "final")

_SEG_BOUNDARY = re.compile(r"[.$]")


def split_path(qname: str) -> list[str]:
    """Split a qualified name on dots and nested-type separators.

    Dots inside a parenthesized stretch (parameter/local owner paths)
    do not split.
    """
    parts: list[str] = []
    buf: list[str] = []
    depth = 0
    for ch in qname:
        if ch == "(":
            depth += 1
            buf.append(ch)
        elif ch == ")":
            depth -= 1
            buf.append(ch)
        elif depth == 0 and (ch == "." or ch == "$"):
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    parts.append("".join(buf))
    return parts


def _seg_regex(seg: str) -> re.Pattern[str]:
    out = []
    for ch in seg:
        if ch == "*":
            out.append("[^.$]*")
        else:
            out.append(re.escape(ch))
    return re.compile("^" + "".join(out) + "$")


@dataclass(frozen=True)
class NamePattern:
    """A wildcard pattern over qualified names with optional kind selector,
    modifier filter, parameter-list pattern and hierarchy suffix."""

    segments: tuple[str, ...]
    selector: str | None = None
    params: tuple[str, ...] | None = None  # ("..",) matches any list
    hierarchy: bool = False
    modifiers: frozenset[str] = frozenset()
    return_wild: bool = False  # leading bare * before the pattern, ignored

    def base(self) -> "NamePattern":
        """The same pattern without the hierarchy suffix."""
        if not self.hierarchy:
            return self
        return NamePattern(self.segments, self.selector, self.params,
                           False, self.modifiers, self.return_wild)

    def kinds(self) -> tuple[str, ...] | None:
        if self.selector is None or self.selector == "name":
            return None
        return SELECTOR_KINDS[self.selector]

    def matches_entity(self, entity) -> bool:
        """Pure name/kind/signature match; hierarchy handled by the evaluator."""
        kinds = self.kinds()
        if kinds is not None and entity.kind not in kinds:
            return False
        if self.modifiers and not self.modifiers <= entity.modifiers:
            return False
        if self.selector == "name":
            return _seg_regex(self.segments[-1]).match(entity.simple_name) is not None
        if not self._match_segments(entity.qualified_name):
            return False
        if self.params is not None:
            if not entity.signature:
                return False
            if self.params == ("..",):
                return True
            actual = entity.sig_param_types()
            if len(actual) != len(self.params):
                return False
            for pat, typ in zip(self.params, actual):
                if pat == "*" or pat == "..":
                    continue
                if not _pattern_suffix_match(pat, typ):
                    return False
        return True

    def _match_segments(self, qname: str) -> bool:
        if self.segments == ("*",) and self.params is None:
            return True
        path = split_path(qname)
        if len(self.segments) > len(path):
            return False
        tail = path[len(path) - len(self.segments):]
        return all(_seg_regex(p).match(s) for p, s in zip(self.segments, tail))

    def pretty_body(self) -> str:
        """The pattern text without its kind selector."""
        parts = list(sorted(self.modifiers))
        if self.return_wild:
            parts.append("*")
        body = ".".join(self.segments)
        if self.hierarchy:
            body += "+"
        if self.params is not None:
            body += "(" + ",".join(self.params) + ")"
        parts.append(body)
        return " ".join(parts)

    def pretty(self) -> str:
        body = self.pretty_body()
        return f"{self.selector} {body}" if self.selector else body


def _pattern_suffix_match(pattern_text: str, qname: str) -> bool:
    psegs = pattern_text.split(".")
    path = split_path(qname)
    if len(psegs) > len(path):
        return False
    tail = path[len(path) - len(psegs):]
    return all(_seg_regex(p).match(s) for p, s in zip(psegs, tail))


# --- terms ---------------------------------------------------------------

@dataclass(frozen=True)
class VarTerm:
    name: str
    hierarchy: bool = False

    def pretty(self) -> str:
        return f"<{self.name}>+" if self.hierarchy else f"<{self.name}>"


@dataclass(frozen=True)
class EntityTerm:
    entity_id: str

    def pretty(self) -> str:
        return f"entity({self.entity_id})"


@dataclass(frozen=True)
class VirtualTerm:
    role_name: str

    def pretty(self) -> str:
        return f"virtual {self.role_name}"


Term = VarTerm | EntityTerm | VirtualTerm | NamePattern


# --- context expressions --------------------------------------------------

@dataclass(frozen=True)
class CtxHierarchy:
    pattern: NamePattern  # hierarchy=True

    def pretty(self) -> str:
        return self.pattern.pretty()


@dataclass(frozen=True)
class CtxProject:
    name: str = "Proj"

    def pretty(self) -> str:
        return f"(project {self.name})"


@dataclass(frozen=True)
class CtxTypeMembers:
    pattern: NamePattern

    def pretty(self) -> str:
        return f"type ({self.pattern.pretty_body()})"


@dataclass(frozen=True)
class CtxPackage:
    name: str

    def pretty(self) -> str:
        return f"package {self.name}"


@dataclass(frozen=True)
class CtxImplementors:
    pattern: NamePattern

    def pretty(self) -> str:
        return f"implementors({self.pattern.pretty()})"


@dataclass(frozen=True)
class CtxEnum:
    ids: tuple[str, ...]

    def pretty(self) -> str:
        return "enum(" + ", ".join(self.ids) + ")"


@dataclass(frozen=True)
class CtxUnion:
    parts: tuple["ContextExpr", ...]

    def pretty(self) -> str:
        return " || ".join(p.pretty() for p in self.parts)


ContextExpr = (CtxHierarchy | CtxProject | CtxTypeMembers | CtxPackage |
               CtxImplementors | CtxEnum | CtxUnion)


# --- query expressions ------------------------------------------------------

@dataclass(frozen=True)
class Primitive:
    relation: str
    left: Term
    right: Term

    def pretty(self) -> str:
        return f"{self.relation}({_term_pretty(self.left)}, {_term_pretty(self.right)})"


@dataclass(frozen=True)
class VarRef:
    name: str

    def pretty(self) -> str:
        return f"<{self.name}>"


@dataclass(frozen=True)
class SourceOf:
    expr: "QueryExpr"

    def pretty(self) -> str:
        return f"sourceof({self.expr.pretty()})"


@dataclass(frozen=True)
class TargetOf:
    expr: "QueryExpr"

    def pretty(self) -> str:
        return f"targetof({self.expr.pretty()})"


@dataclass(frozen=True)
class And:
    left: "QueryExpr"
    right: "QueryExpr"

    def pretty(self) -> str:
        lp = self.left.pretty()
        rp = self.right.pretty()
        if isinstance(self.left, Or):
            lp = f"({lp})"
        if isinstance(self.right, Or):
            rp = f"({rp})"
        return f"{lp} && {rp}"


@dataclass(frozen=True)
class Or:
    left: "QueryExpr"
    right: "QueryExpr"

    def pretty(self) -> str:
        lp = self.left.pretty()
        rp = self.right.pretty()
        if isinstance(self.left, And):
            lp = f"({lp})"
        if isinstance(self.right, And):
            rp = f"({rp})"
        return f"{lp} || {rp}"


@dataclass(frozen=True)
class Closure:
    expr: "QueryExpr"
    seeds: "QueryExpr | None" = None
    direction: str | None = None  # "from" | "to"

    def pretty(self) -> str:
        if self.seeds is None:
            return f"closure({self.expr.pretty()})"
        return f"closure({self.expr.pretty()} {self.direction} {self.seeds.pretty()})"


@dataclass(frozen=True)
class MatchSet:
    term: Term

    def pretty(self) -> str:
        return f"({_term_pretty(self.term)})"


@dataclass(frozen=True)
class CtxAtom:
    ctx: ContextExpr

    def pretty(self) -> str:
        return self.ctx.pretty()


QueryExpr = (Primitive | VarRef | SourceOf | TargetOf | And | Or | Closure |
             MatchSet | CtxAtom)


def _term_pretty(t: Term) -> str:
    return t.pretty()


@dataclass(frozen=True)
class Binding:
    name: str | None      # variable name, None for the named-result header
    header: str | None    # e.g. "CB(contextElem, m)" for the final line
    expr: QueryExpr

    def pretty(self) -> str:
        if self.header is not None:
            lhs = self.header
        elif self.name is not None:
            lhs = f"<{self.name}>"
        else:
            return f"{self.expr.pretty()};"
        return f"{lhs} = {self.expr.pretty()};"


@dataclass(frozen=True)
class Query:
    bindings: tuple[Binding, ...]
    final: QueryExpr  # expression of the last statement

    def pretty(self) -> str:
        lines = [b.pretty() for b in self.bindings]
        if not self.bindings or self.bindings[-1].expr is not self.final:
            lines.append(f"{self.final.pretty()};")
        return "\n".join(lines)


# --- results ---------------------------------------------------------------

@dataclass(frozen=True)
class RelTuple:
    source: str
    target: str
    kind: str
    sites: tuple[Location, ...]

    def key(self) -> tuple[str, str, str]:
        return (self.source, self.target, self.kind)


def merge_tuples(rows) -> tuple[RelTuple, ...]:
    """Deduplicate rows on (source, target, kind), merging site lists."""
    merged: dict[tuple[str, str, str], set[Location]] = {}
    for row in rows:
        merged.setdefault(row.key(), set()).update(row.sites)
    return tuple(
        RelTuple(src, tgt, kind, tuple(sorted(sites)))
        for (src, tgt, kind), sites in sorted(merged.items())
    )


@dataclass
class ResultSet:
    """Evaluation output: either relation tuples or a projected entity set."""

    arity: str  # "tuples" | "entities"
    tuples: tuple[RelTuple, ...] = ()
    entities: tuple[str, ...] = ()
    query_text: str = ""
    store_hash: str = ""

    @classmethod
    def of_tuples(cls, rows, query_text: str = "", store_hash: str = "") -> "ResultSet":
        return cls("tuples", tuples=merge_tuples(rows),
                   query_text=query_text, store_hash=store_hash)

    @classmethod
    def of_entities(cls, ids, query_text: str = "", store_hash: str = "") -> "ResultSet":
        return cls("entities", entities=tuple(sorted(set(ids))),
                   query_text=query_text, store_hash=store_hash)

    def is_empty(self) -> bool:
        return not self.tuples and not self.entities

    def endpoint_ids(self) -> set[str]:
        if self.arity == "entities":
            return set(self.entities)
        out: set[str] = set()
        for t in self.tuples:
            out.add(t.source)
            out.add(t.target)
        return out
