"""Query evaluation over a sealed fact store.

Evaluation is pure: the same store hash and query yield identical results,
including site lists.  Values are either entity sets or relation tuple
sets; mixing the two arities in set algebra is an error.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ArityMismatch, ClosureOnEntitySet, PatternError
from ..facts import TYPE_KINDS, FactStore, entity_id
from ..virtuals import VirtualInterface, satisfying_classes
from .model import (
    And, Closure, ContextExpr, CtxAtom, CtxEnum, CtxHierarchy,
    CtxImplementors, CtxPackage, CtxProject, CtxTypeMembers, CtxUnion,
    DIRECT_RELATIONS, EntityTerm, MatchSet, NamePattern, Or, Primitive,
    Query, QueryExpr, RelTuple, ResultSet, SourceOf, TargetOf, Term, VarRef,
    VarTerm, VirtualTerm, merge_tuples,
)

# Edge kinds participating in the derived `references` relation.
REFERENCE_KINDS = ("ParamType", "VarType", "FieldType", "Creates", "Get",
                   "Set", "Invokes", "Extends", "Implements")


@dataclass(frozen=True)
class Value:
    arity: str  # "entities" | "tuples"
    entities: frozenset[str] = frozenset()
    tuples: tuple[RelTuple, ...] = ()

    @classmethod
    def of_entities(cls, ids) -> "Value":
        return cls("entities", entities=frozenset(ids))

    @classmethod
    def of_tuples(cls, rows) -> "Value":
        return cls("tuples", tuples=merge_tuples(rows))


class Evaluator:
    def __init__(self, store: FactStore,
                 virtuals: dict[str, VirtualInterface] | None = None):
        self.store = store
        self.virtuals = virtuals or {}
        self._hier_cache: dict[frozenset[str], frozenset[str]] = {}
        self._scope_cache: dict[str, frozenset[str]] = {}

    # --- public API -------------------------------------------------------

    def eval_query(self, query: Query, query_text: str | None = None) -> ResultSet:
        env: dict[str, Value] = {}
        value = Value.of_entities(())
        for binding in query.bindings:
            value = self.eval_expr(binding.expr, env)
            if binding.name is not None:
                env[binding.name] = value
        text = query_text if query_text is not None else query.pretty()
        if value.arity == "entities":
            return ResultSet.of_entities(value.entities, text, self.store.hash)
        return ResultSet.of_tuples(value.tuples, text, self.store.hash)

    def context_set(self, ctx: ContextExpr) -> frozenset[str]:
        store = self.store
        if isinstance(ctx, CtxUnion):
            out: set[str] = set()
            for part in ctx.parts:
                out |= self.context_set(part)
            return frozenset(out)
        if isinstance(ctx, CtxProject):
            root = store.project()
            return frozenset(eid for eid in store.entities
                             if root is None or eid != root.id)
        if isinstance(ctx, CtxHierarchy):
            base = self._match_types(ctx.pattern.base())
            return self._expand_hierarchy(frozenset(base))
        if isinstance(ctx, CtxTypeMembers):
            types = self._match_types(ctx.pattern)
            return frozenset(self._with_members(types))
        if isinstance(ctx, CtxPackage):
            return frozenset(self._package_members(ctx.name))
        if isinstance(ctx, CtxImplementors):
            role_ids = self._match_types(ctx.pattern)
            impls: set[str] = set()
            for rid in role_ids:
                for kind in ("Implements", "Extends"):
                    for f in self.store.facts_to(kind, rid):
                        impls.add(f.source)
            return frozenset(self._with_members(impls))
        if isinstance(ctx, CtxEnum):
            return frozenset(eid for eid in ctx.ids if eid in store)
        raise PatternError(f"unknown context form {ctx!r}")

    # --- expression evaluation ---------------------------------------------

    def eval_expr(self, expr: QueryExpr, env: dict[str, Value]) -> Value:
        if isinstance(expr, VarRef):
            return env[expr.name]
        if isinstance(expr, CtxAtom):
            return Value.of_entities(self.context_set(expr.ctx))
        if isinstance(expr, MatchSet):
            return Value.of_entities(self.term_entities(expr.term, env))
        if isinstance(expr, Primitive):
            return Value.of_tuples(self.eval_primitive(expr, env))
        if isinstance(expr, SourceOf):
            inner = self.eval_expr(expr.expr, env)
            if inner.arity != "tuples":
                raise ArityMismatch("sourceof needs a relation, not an entity set")
            return Value.of_entities(t.source for t in inner.tuples)
        if isinstance(expr, TargetOf):
            inner = self.eval_expr(expr.expr, env)
            if inner.arity != "tuples":
                raise ArityMismatch("targetof needs a relation, not an entity set")
            return Value.of_entities(t.target for t in inner.tuples)
        if isinstance(expr, And):
            return self._set_op(expr, env, intersect=True)
        if isinstance(expr, Or):
            return self._set_op(expr, env, intersect=False)
        if isinstance(expr, Closure):
            return self._closure(expr, env)
        raise PatternError(f"cannot evaluate {expr!r}")

    def _set_op(self, expr, env, intersect: bool) -> Value:
        left = self.eval_expr(expr.left, env)
        right = self.eval_expr(expr.right, env)
        if left.arity != right.arity:
            raise ArityMismatch(
                "cannot combine a relation with an entity set; project first")
        if left.arity == "entities":
            if intersect:
                return Value.of_entities(left.entities & right.entities)
            return Value.of_entities(left.entities | right.entities)
        if intersect:
            pairs = {(t.source, t.target) for t in right.tuples}
            return Value.of_tuples(
                t for t in left.tuples if (t.source, t.target) in pairs)
        return Value.of_tuples(left.tuples + right.tuples)

    def _closure(self, expr: Closure, env) -> Value:
        inner = self.eval_expr(expr.expr, env)
        if inner.arity != "tuples":
            raise ClosureOnEntitySet("closure needs a relation, not an entity set")
        edges = inner.tuples
        if expr.seeds is not None:
            seeds = self.eval_expr(expr.seeds, env)
            if seeds.arity != "entities":
                raise ArityMismatch("closure seeds must be an entity set")
            edges = self._restrict_edges(edges, seeds.entities,
                                         forward=(expr.direction == "from"))
        kinds = {t.kind for t in edges}
        kind = kinds.pop() if len(kinds) == 1 else "Closure"
        direct: dict[tuple[str, str], set] = {}
        adj: dict[str, set[str]] = {}
        for t in edges:
            direct.setdefault((t.source, t.target), set()).update(t.sites)
            adj.setdefault(t.source, set()).add(t.target)
        rows = []
        for start in adj:
            reach: set[str] = set()
            frontier = [start]
            while frontier:
                cur = frontier.pop()
                for nxt in adj.get(cur, ()):
                    if nxt not in reach:
                        reach.add(nxt)
                        frontier.append(nxt)
            for tgt in reach:
                sites = tuple(sorted(direct.get((start, tgt), ())))
                rows.append(RelTuple(start, tgt, kind, sites))
        return Value.of_tuples(rows)

    @staticmethod
    def _restrict_edges(edges, seeds, forward: bool):
        """Keep only edges on paths growing out of (or into) the seed set."""
        reach = set(seeds)
        kept: set[RelTuple] = set()
        changed = True
        while changed:
            changed = False
            for t in edges:
                if t in kept:
                    continue
                anchor, other = (t.source, t.target) if forward else (t.target, t.source)
                if anchor in reach:
                    kept.add(t)
                    if other not in reach:
                        reach.add(other)
                    changed = True
        return tuple(kept)

    # --- primitives -------------------------------------------------------

    def eval_primitive(self, prim: Primitive, env) -> list[RelTuple]:
        rel = prim.relation
        if rel == "references":
            return self._references(prim.left, prim.right, env)
        if rel == "compares":
            return self._compares(prim.left, prim.right, env)
        if rel == "params":
            return self._params_lift(prim.left, prim.right, env)
        if rel == "implements" and isinstance(prim.right, VirtualTerm):
            return self._virtual_implements(prim.left, prim.right, env)
        kind = DIRECT_RELATIONS[rel]
        left = self._matcher(prim.left, env)
        if rel == "args":
            right = self._arg_matcher(prim.right, env)
        else:
            right = self._matcher(prim.right, env)
        rows = []
        for f in self.store.facts_of_kind(kind):
            if left(f.source) and right(f.target):
                rows.append(RelTuple(f.source, f.target, kind, (f.site,)))
        return rows

    def _params_lift(self, left: Term, right: Term, env) -> list[RelTuple]:
        """params(m, T): methods declaring a parameter of type T."""
        lmatch = self._matcher(left, env)
        rmatch = self._matcher(right, env)
        rows = []
        for f in self.store.facts_of_kind("ParamType"):
            owners = self.store.facts_to("Declares", f.source)
            if not owners:
                continue
            method = owners[0].source
            if lmatch(method) and rmatch(f.target):
                rows.append(RelTuple(method, f.target, "ParamType", (f.site,)))
        return rows

    def _references(self, left: Term, right: Term, env) -> list[RelTuple]:
        lscope = self._scope_union(self.term_entities(left, env))
        rscope = self._scope_union(self.term_entities(right, env))
        rows = []
        for kind in REFERENCE_KINDS:
            for f in self.store.facts_of_kind(kind):
                if f.source in lscope and f.target in rscope:
                    src = self.store.owner_member(f.source)
                    rows.append(RelTuple(src, f.target, "References", (f.site,)))
        return rows

    def _compares(self, left: Term, right: Term, env) -> list[RelTuple]:
        lids = self.term_entities(left, env)
        rids = self.term_entities(right, env)
        by_name: dict[str, list[str]] = {}
        for rid in rids:
            ent = self.store.entity(rid)
            if ent is not None:
                by_name.setdefault(ent.simple_name, []).append(rid)
        rows = []
        for lid in lids:
            ent = self.store.entity(lid)
            if ent is None:
                continue
            for rid in by_name.get(ent.simple_name, ()):
                rows.append(RelTuple(lid, rid, "Compares", ()))
        return rows

    def _virtual_implements(self, left: Term, right: VirtualTerm, env) -> list[RelTuple]:
        vi = self.virtuals.get(right.role_name)
        if vi is None:
            raise PatternError(f"unknown virtual interface {right.role_name!r}")
        lmatch = self._matcher(left, env)
        vid = entity_id("VirtualInterface", right.role_name)
        rows = []
        for cid, sites in satisfying_classes(self.store, vi).items():
            if lmatch(cid):
                rows.append(RelTuple(cid, vid, "Implements", tuple(sites)))
        return rows

    # --- term matching ----------------------------------------------------

    def _matcher(self, term: Term, env):
        if isinstance(term, VarTerm):
            value = env[term.name]
            if value.arity != "entities":
                raise ArityMismatch(
                    f"variable <{term.name}> holds a relation, not an entity set")
            ids = value.entities
            if term.hierarchy:
                ids = self._expand_hierarchy(
                    frozenset(i for i in ids
                              if self._kind_of(i) in TYPE_KINDS)) | ids
            return lambda eid: eid in ids
        if isinstance(term, EntityTerm):
            return lambda eid: eid == term.entity_id
        if isinstance(term, VirtualTerm):
            raise PatternError(
                "virtual interfaces may only appear as the implements target")
        pattern = term
        if pattern.hierarchy:
            ids = self._expand_hierarchy(frozenset(self._match_types(pattern.base())))
            return lambda eid: eid in ids
        return lambda eid: pattern.matches_entity(self.store.entity(eid))

    def _arg_matcher(self, term: Term, env):
        """args(...) right terms may select by declared type or simple name."""
        if isinstance(term, NamePattern) and term.selector in (
                "type", "class", "interface"):
            type_match = self._matcher(term, env)

            def match(eid: str) -> bool:
                tid = self.store.declared_type_of(eid)
                return tid is not None and type_match(tid)
            return match
        return self._matcher(term, env)

    def term_entities(self, term: Term, env) -> frozenset[str]:
        if isinstance(term, VarTerm) and not term.hierarchy:
            value = env[term.name]
            if value.arity != "entities":
                raise ArityMismatch(
                    f"variable <{term.name}> holds a relation, not an entity set")
            return value.entities
        match = self._matcher(term, env)
        return frozenset(eid for eid in self.store.entities if match(eid))

    # --- helpers ------------------------------------------------------------

    def _kind_of(self, eid: str) -> str:
        ent = self.store.entity(eid)
        return ent.kind if ent is not None else ""

    def _match_types(self, pattern: NamePattern) -> set[str]:
        out = set()
        for e in self.store.entities_of_kind("Class", "Interface"):
            if pattern.matches_entity(e):
                out.add(e.id)
        return out

    def _with_members(self, type_ids) -> set[str]:
        out = set(type_ids)
        for tid in list(type_ids):
            out.update(m.id for m in self.store.declared_members(tid))
        return out

    def _expand_hierarchy(self, type_ids: frozenset[str]) -> frozenset[str]:
        """Types, their transitive subtypes, and all their declared members."""
        cached = self._hier_cache.get(type_ids)
        if cached is not None:
            return cached
        types = set(type_ids)
        for tid in type_ids:
            types |= self.store.subtypes(tid)
        result = frozenset(self._with_members(types))
        self._hier_cache[type_ids] = result
        return result

    def _scope_union(self, ids) -> frozenset[str]:
        out: set[str] = set()
        for eid in ids:
            cached = self._scope_cache.get(eid)
            if cached is None:
                cached = frozenset(self.store.scope_of(eid))
                self._scope_cache[eid] = cached
            out |= cached
        return frozenset(out)

    def _package_members(self, name: str) -> set[str]:
        pkg_ids = [e.id for e in self.store.entities_of_kind("Package")
                   if e.qualified_name == name]
        types: set[str] = set()
        frontier: list[str] = list(pkg_ids)
        while frontier:
            cur = frontier.pop()
            for f in self.store.facts_from("Contains", cur):
                if self._kind_of(f.target) in TYPE_KINDS:
                    types.add(f.target)
                    frontier.append(f.target)
        return self._with_members(types)


def evaluate(store: FactStore, query, virtuals=None,
             query_text: str | None = None) -> ResultSet:
    """Evaluate a Query tree or query text against a sealed store."""
    from .parser import parse_query
    if isinstance(query, str):
        text = query
        query = parse_query(query)
        if query_text is None:
            query_text = text
    return Evaluator(store, virtuals).eval_query(query, query_text)


def eval_context(ctx: ContextExpr, store: FactStore) -> frozenset[str]:
    return Evaluator(store).context_set(ctx)
