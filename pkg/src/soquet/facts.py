"""Program fact model: entities, relation facts, and the sealed indexed store.

Entities and facts form the substrate every query runs over.  A store is
built single-writer, then sealed; sealed stores are immutable, hashed over
their canonical serialization, and safe to share across readers.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from .errors import (
    CycleDetected,
    DanglingParent,
    DuplicateConflict,
    EndpointMissing,
    ForestViolation,
    KindMismatch,
    ParseError,
    SchemaVersionMismatch,
    StoreSealed,
)

SCHEMA = "soquet-facts/1"

ENTITY_KINDS = (
    "Project", "Package", "Class", "Interface", "VirtualInterface",
    "Method", "Constructor", "Field", "Parameter", "LocalVariable",
)

TYPE_KINDS = frozenset({"Class", "Interface"})
MEMBER_KINDS = frozenset({"Method", "Constructor", "Field"})
CALLABLE_KINDS = frozenset({"Method", "Constructor"})

# Endpoint kind constraints, checked when a fact is added.
# FieldType and ReturnType carry declared-type edges that the derived
# `references` relation and the interfacing-layer sorts need; no base
# relation in the core twelve can represent them.
FACT_RULES: dict[str, tuple[frozenset[str], frozenset[str]]] = {
    "Declares": (frozenset({"Class", "Interface", "Method", "Constructor"}),
                 frozenset({"Method", "Constructor", "Field", "Parameter", "LocalVariable"})),
    "Contains": (frozenset({"Project", "Package", "Class", "Interface"}),
                 frozenset({"Package", "Class", "Interface"})),
    "Extends": (TYPE_KINDS, TYPE_KINDS),
    "Implements": (TYPE_KINDS, frozenset({"Interface", "VirtualInterface"})),
    "Invokes": (CALLABLE_KINDS, CALLABLE_KINDS),
    "Creates": (CALLABLE_KINDS, TYPE_KINDS),
    "Get": (CALLABLE_KINDS, frozenset({"Field"})),
    "Set": (CALLABLE_KINDS, frozenset({"Field"})),
    "Throws": (CALLABLE_KINDS, frozenset({"Class"})),
    "ParamType": (frozenset({"Parameter"}), TYPE_KINDS),
    "ArgPass": (CALLABLE_KINDS, frozenset({"LocalVariable", "Parameter", "Field"})),
    "VarType": (frozenset({"LocalVariable"}), TYPE_KINDS),
    "FieldType": (frozenset({"Field"}), TYPE_KINDS),
    "ReturnType": (frozenset({"Method"}), TYPE_KINDS),
}

FACT_KINDS = tuple(FACT_RULES)

MODIFIERS = frozenset({"public", "private", "protected", "static", "abstract", "final"})


@dataclass(frozen=True, order=True)
class Location:
    file: str
    start: int
    end: int

    def to_json(self) -> dict:
        return {"file": self.file, "start": self.start, "end": self.end}

    @classmethod
    def from_json(cls, obj: dict) -> "Location":
        return cls(obj["file"], obj["start"], obj["end"])


NOWHERE = Location("", 0, 0)


def entity_id(kind: str, qname: str, signature: str = "") -> str:
    """Derive the stable id for an entity from its identity triple."""
    base = f"{kind.lower()}:{qname}"
    return f"{base}#{signature}" if signature else base


def parse_entity_id(eid: str) -> tuple[str, str, str]:
    """Split an id back into its (kind, qname, signature) triple."""
    head, _, sig = eid.partition("#")
    kind, _, qname = head.partition(":")
    for k in ENTITY_KINDS:
        if k.lower() == kind:
            kind = k
            break
    return kind, qname, sig


@dataclass(frozen=True)
class Entity:
    id: str
    kind: str
    simple_name: str
    qualified_name: str
    signature: str
    declared_in: str | None
    modifiers: frozenset[str]
    location: Location

    @classmethod
    def make(cls, kind: str, simple_name: str, qualified_name: str,
             signature: str = "", declared_in: str | None = None,
             modifiers: Iterable[str] = (), location: Location = NOWHERE) -> "Entity":
        return cls(
            id=entity_id(kind, qualified_name, signature),
            kind=kind,
            simple_name=simple_name,
            qualified_name=qualified_name,
            signature=signature,
            declared_in=declared_in,
            modifiers=frozenset(modifiers),
            location=location,
        )

    def sig_param_types(self) -> list[str]:
        """Parameter type names from the signature, e.g. m(a.B,c.D) -> [a.B, c.D]."""
        if not self.signature:
            return []
        inner = self.signature[self.signature.index("(") + 1:self.signature.rindex(")")]
        return [p for p in inner.split(",") if p]

    def triple(self) -> tuple[str, str, str]:
        return (self.kind, self.qualified_name, self.signature)


@dataclass(frozen=True, order=True)
class Fact:
    kind: str
    source: str
    target: str
    site: Location


def _entity_record(e: Entity) -> str:
    obj = {
        "rec": "entity",
        "id": e.id,
        "kind": e.kind,
        "name": e.simple_name,
        "qname": e.qualified_name,
        "sig": e.signature,
        "declared_in": e.declared_in,
        "mods": sorted(e.modifiers),
        "loc": e.location.to_json(),
    }
    return json.dumps(obj, separators=(",", ":"))


def _fact_record(f: Fact) -> str:
    obj = {"rec": "fact", "kind": f.kind, "src": f.source, "tgt": f.target,
           "loc": f.site.to_json()}
    return json.dumps(obj, separators=(",", ":"))


class FactStoreBuilder:
    """Single-writer accumulation of entities and facts before sealing."""

    def __init__(self) -> None:
        self._entities: dict[str, Entity] = {}
        self._facts: dict[tuple[str, str, str, Location], Fact] = {}
        self._sealed = False

    def _check_open(self) -> None:
        if self._sealed:
            raise StoreSealed("store is sealed")

    def add_entity(self, e: Entity) -> str:
        self._check_open()
        if e.kind not in ENTITY_KINDS:
            raise KindMismatch(f"unknown entity kind {e.kind!r}")
        existing = self._entities.get(e.id)
        if existing is not None:
            if existing != e:
                raise DuplicateConflict(
                    f"entity {e.id} re-added with different attributes")
            return e.id
        if e.declared_in is not None and e.declared_in not in self._entities:
            raise DanglingParent(
                f"declared_in {e.declared_in} unknown for {e.id}")
        self._entities[e.id] = e
        return e.id

    def has_entity(self, eid: str) -> bool:
        return eid in self._entities

    def add_fact(self, kind: str, source: str, target: str,
                 site: Location = NOWHERE) -> None:
        self._check_open()
        rule = FACT_RULES.get(kind)
        if rule is None:
            raise KindMismatch(f"unknown fact kind {kind!r}")
        src = self._entities.get(source)
        tgt = self._entities.get(target)
        if src is None or tgt is None:
            missing = source if src is None else target
            raise EndpointMissing(f"fact {kind} references unknown id {missing}")
        src_kinds, tgt_kinds = rule
        if src.kind not in src_kinds:
            raise KindMismatch(f"{kind} cannot originate from a {src.kind}")
        if tgt.kind not in tgt_kinds:
            raise KindMismatch(f"{kind} cannot target a {tgt.kind}")
        key = (kind, source, target, site)
        self._facts.setdefault(key, Fact(kind, source, target, site))

    def seal(self) -> "FactStore":
        self._check_open()
        self._check_forest()
        self._check_hierarchy_acyclic()
        self._sealed = True
        return FactStore(self._entities, tuple(self._facts.values()))

    # Containment (Contains/Declares) must form a forest rooted at the
    # single Project entity; Extends/Implements must be acyclic.
    def _check_forest(self) -> None:
        if not self._entities:
            return
        projects = [e for e in self._entities.values() if e.kind == "Project"]
        if len(projects) != 1:
            raise ForestViolation(
                f"store must hold exactly one Project entity, found {len(projects)}")
        root = projects[0]
        parents: dict[str, str] = {}
        for f in self._facts.values():
            if f.kind not in ("Contains", "Declares"):
                continue
            if f.target in parents and parents[f.target] != f.source:
                raise ForestViolation(
                    f"{f.target} has more than one containment parent")
            parents[f.target] = f.source
        for e in self._entities.values():
            if e.id == root.id:
                if e.id in parents:
                    raise ForestViolation("Project entity cannot have a parent")
                continue
            if e.id not in parents:
                raise ForestViolation(f"{e.id} has no containment parent")
            if e.declared_in is not None and parents[e.id] != e.declared_in:
                raise ForestViolation(
                    f"{e.id} containment fact disagrees with declared_in")
        for eid in self._entities:
            seen = set()
            cur: str | None = eid
            while cur is not None:
                if cur in seen:
                    raise CycleDetected(f"containment cycle through {cur}", [cur])
                seen.add(cur)
                cur = parents.get(cur)

    def _check_hierarchy_acyclic(self) -> None:
        edges: dict[str, set[str]] = {}
        for f in self._facts.values():
            if f.kind in ("Extends", "Implements"):
                edges.setdefault(f.source, set()).add(f.target)
        state: dict[str, int] = {}
        stack: list[str] = []

        def visit(node: str) -> None:
            state[node] = 1
            stack.append(node)
            for nxt in edges.get(node, ()):
                if state.get(nxt) == 1:
                    cycle = stack[stack.index(nxt):] + [nxt]
                    raise CycleDetected(
                        "inheritance cycle: " + " -> ".join(cycle), cycle)
                if state.get(nxt, 0) == 0:
                    visit(nxt)
            stack.pop()
            state[node] = 2

        for node in edges:
            if state.get(node, 0) == 0:
                visit(node)


class FactStore:
    """Sealed, immutable, indexed store of entities and facts."""

    def __init__(self, entities: dict[str, Entity], facts: tuple[Fact, ...]):
        self._entities = dict(entities)
        self._facts = tuple(sorted(facts))
        self._by_source: dict[tuple[str, str], list[Fact]] = {}
        self._by_target: dict[tuple[str, str], list[Fact]] = {}
        self._by_kind: dict[str, list[Fact]] = {}
        self._by_qname: dict[str, list[str]] = {}
        for f in self._facts:
            self._by_source.setdefault((f.kind, f.source), []).append(f)
            self._by_target.setdefault((f.kind, f.target), []).append(f)
            self._by_kind.setdefault(f.kind, []).append(f)
        for e in self._entities.values():
            self._by_qname.setdefault(e.qualified_name, []).append(e.id)
        for ids in self._by_qname.values():
            ids.sort()
        self.hash = hashlib.sha256(self.export_str().encode("utf-8")).hexdigest()

    # --- lookups --------------------------------------------------------

    @property
    def entities(self) -> dict[str, Entity]:
        return self._entities

    @property
    def facts(self) -> tuple[Fact, ...]:
        return self._facts

    def entity(self, eid: str) -> Entity | None:
        return self._entities.get(eid)

    def __contains__(self, eid: str) -> bool:
        return eid in self._entities

    def facts_of_kind(self, kind: str) -> tuple[Fact, ...]:
        return tuple(self._by_kind.get(kind, ()))

    def facts_from(self, kind: str, source: str) -> tuple[Fact, ...]:
        return tuple(self._by_source.get((kind, source), ()))

    def facts_to(self, kind: str, target: str) -> tuple[Fact, ...]:
        return tuple(self._by_target.get((kind, target), ()))

    def ids_by_qname(self, qname: str) -> tuple[str, ...]:
        return tuple(self._by_qname.get(qname, ()))

    def entities_of_kind(self, *kinds: str) -> Iterator[Entity]:
        wanted = frozenset(kinds)
        for eid in sorted(self._entities):
            e = self._entities[eid]
            if e.kind in wanted:
                yield e

    def project(self) -> Entity | None:
        for e in self._entities.values():
            if e.kind == "Project":
                return e
        return None

    def incident_facts(self, eid: str) -> tuple[list[Fact], list[Fact]]:
        out = [f for f in self._facts if f.source == eid]
        inc = [f for f in self._facts if f.target == eid]
        return out, inc

    # --- hierarchy helpers ----------------------------------------------

    def subtypes(self, type_id: str) -> set[str]:
        """Transitive Extends/Implements descendants, excluding the seed."""
        result: set[str] = set()
        frontier = [type_id]
        while frontier:
            cur = frontier.pop()
            for kind in ("Extends", "Implements"):
                for f in self._by_target.get((kind, cur), ()):
                    if f.source not in result:
                        result.add(f.source)
                        frontier.append(f.source)
        return result

    def supertypes(self, type_id: str) -> set[str]:
        """Transitive Extends/Implements ancestors, excluding the seed."""
        result: set[str] = set()
        frontier = [type_id]
        while frontier:
            cur = frontier.pop()
            for kind in ("Extends", "Implements"):
                for f in self._by_source.get((kind, cur), ()):
                    if f.target not in result:
                        result.add(f.target)
                        frontier.append(f.target)
        return result

    def declared_members(self, type_id: str) -> list[Entity]:
        out = []
        for f in self._by_source.get(("Declares", type_id), ()):
            e = self._entities[f.target]
            if e.kind in MEMBER_KINDS:
                out.append(e)
        return out

    def declared_type_of(self, eid: str) -> str | None:
        """Declared type of a field, parameter or local, if recorded."""
        for kind in ("FieldType", "ParamType", "VarType"):
            for f in self._by_source.get((kind, eid), ()):
                return f.target
        return None

    def scope_of(self, eid: str) -> set[str]:
        """The entity plus everything transitively declared/contained in it."""
        result = {eid}
        frontier = [eid]
        while frontier:
            cur = frontier.pop()
            for kind in ("Declares", "Contains"):
                for f in self._by_source.get((kind, cur), ()):
                    if f.target not in result:
                        result.add(f.target)
                        frontier.append(f.target)
        return result

    def owner_member(self, eid: str) -> str:
        """Lift an entity to its closest enclosing member or type."""
        e = self._entities[eid]
        while e is not None and e.kind in ("Parameter", "LocalVariable"):
            if e.declared_in is None:
                break
            e = self._entities[e.declared_in]
        return e.id

    # --- serialization ----------------------------------------------------

    def export_str(self) -> str:
        lines = [json.dumps({"rec": "header", "schema": SCHEMA},
                            separators=(",", ":"))]
        for eid in sorted(self._entities):
            lines.append(_entity_record(self._entities[eid]))
        for f in self._facts:
            lines.append(_fact_record(f))
        return "\n".join(lines) + "\n"

    def export(self, sink: IO[str]) -> None:
        sink.write(self.export_str())


def import_facts(source: IO[str] | str) -> FactStore:
    """Rebuild a sealed store from interchange text; order-insensitive."""
    text = source if isinstance(source, str) else source.read()
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty stream", 1)
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad header: {exc.msg}", 1) from exc
    if not isinstance(header, dict) or header.get("rec") != "header":
        raise ParseError("first record must be the header", 1)
    if header.get("schema") != SCHEMA:
        raise SchemaVersionMismatch(
            f"unsupported schema {header.get('schema')!r}, expected {SCHEMA!r}")

    entities: list[tuple[int, Entity]] = []
    fact_rows: list[tuple[int, dict]] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad record: {exc.msg}", lineno) from exc
        rec = obj.get("rec")
        try:
            if rec == "entity":
                entities.append((lineno, Entity(
                    id=obj["id"], kind=obj["kind"], simple_name=obj["name"],
                    qualified_name=obj["qname"], signature=obj["sig"],
                    declared_in=obj["declared_in"],
                    modifiers=frozenset(obj["mods"]),
                    location=Location.from_json(obj["loc"]))))
            elif rec == "fact":
                fact_rows.append((lineno, obj))
            else:
                raise ParseError(f"unknown record type {rec!r}", lineno)
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]!r}", lineno) from exc

    builder = FactStoreBuilder()
    # declared_in may point forward in the stream; insert parents first.
    pending = list(entities)
    known: set[str] = set()
    while pending:
        progressed = False
        rest: list[tuple[int, Entity]] = []
        for lineno, e in pending:
            if e.declared_in is None or e.declared_in in known:
                try:
                    builder.add_entity(e)
                except (DanglingParent, DuplicateConflict, KindMismatch) as exc:
                    raise ParseError(str(exc), lineno) from exc
                known.add(e.id)
                progressed = True
            else:
                rest.append((lineno, e))
        if not progressed:
            lineno, e = rest[0]
            raise ParseError(
                f"entity {e.id} references unknown id {e.declared_in}", lineno)
        pending = rest
    for lineno, obj in fact_rows:
        try:
            builder.add_fact(obj["kind"], obj["src"], obj["tgt"],
                             Location.from_json(obj["loc"]))
        except (EndpointMissing, KindMismatch) as exc:
            raise ParseError(str(exc), lineno) from exc
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]!r}", lineno) from exc
    return builder.seal()
