"""Hierarchical concern models: composite trees whose leaves are sort
instances, plus virtual interfaces, persistence and staleness tracking.

Only leaves carry sort instances; composites group and name them.  Models
persist with their cached results so they stay inspectable without the
source; a result computed against a different store hash is stale, never
silently refreshed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO

from .errors import (
    CycleAttempt, NameClash, NotAComposite, SchemaError, SortParamError,
)
from .facts import FactStore, Location, entity_id, parse_entity_id
from .query import ResultSet, RelTuple
from .sorts import SortInstance, SortKind, build_sort
from .virtuals import VirtualInterface

MODEL_SCHEMA = "soquet-model/1"


@dataclass
class ConcernNode:
    name: str
    kind: str  # "composite" | "leaf"
    children: list["ConcernNode"] = field(default_factory=list)
    instance: SortInstance | None = None
    parent: "ConcernNode | None" = None
    stale: bool = False
    broken: str | None = None

    def path(self) -> str:
        parts = []
        node: ConcernNode | None = self
        while node is not None and node.parent is not None:
            parts.append(node.name)
            node = node.parent
        return "/".join(reversed(parts))

    def walk_leaves(self):
        if self.kind == "leaf":
            yield self
        for child in self.children:
            yield from child.walk_leaves()

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


class ConcernModel:
    def __init__(self, name: str, store_hash: str = ""):
        self.name = name
        self.store_hash = store_hash
        self.root = ConcernNode(name=name, kind="composite")
        self.virtual_interfaces: dict[str, VirtualInterface] = {}

    # --- tree operations --------------------------------------------------

    def _check_insert(self, parent: ConcernNode, name: str) -> None:
        if parent.kind != "composite":
            raise NotAComposite(
                f"{parent.path() or parent.name!r} is a leaf; instances and "
                f"groups attach to composites only")
        if any(c.name == name for c in parent.children):
            raise NameClash(f"{name!r} already exists under "
                            f"{parent.path() or 'the root'}")

    def add_composite(self, parent: ConcernNode, name: str) -> ConcernNode:
        self._check_insert(parent, name)
        node = ConcernNode(name=name, kind="composite", parent=parent)
        parent.children.append(node)
        return node

    def add_instance(self, parent: ConcernNode, instance: SortInstance,
                     name: str | None = None) -> ConcernNode:
        leaf_name = name or instance.name
        self._check_insert(parent, leaf_name)
        node = ConcernNode(name=leaf_name, kind="leaf", instance=instance,
                           parent=parent)
        parent.children.append(node)
        return node

    def remove(self, node: ConcernNode) -> None:
        if node.parent is None:
            raise CycleAttempt("cannot remove the model root")
        node.parent.children.remove(node)
        node.parent = None

    def move(self, node: ConcernNode, new_parent: ConcernNode) -> None:
        if node.parent is None:
            raise CycleAttempt("cannot move the model root")
        probe: ConcernNode | None = new_parent
        while probe is not None:
            if probe is node:
                raise CycleAttempt(
                    f"cannot move {node.name!r} under its own descendant")
            probe = probe.parent
        self._check_insert(new_parent, node.name)
        node.parent.children.remove(node)
        node.parent = new_parent
        new_parent.children.append(node)

    def find(self, path: str) -> ConcernNode | None:
        if not path:
            return self.root
        node = self.root
        for part in path.split("/"):
            nxt = next((c for c in node.children if c.name == part), None)
            if nxt is None:
                return None
            node = nxt
        return node

    # --- virtual interfaces --------------------------------------------------

    def add_virtual_interface(self, vi: VirtualInterface) -> VirtualInterface:
        if vi.role_name in self.virtual_interfaces:
            raise NameClash(f"virtual interface {vi.role_name!r} already defined")
        self.virtual_interfaces[vi.role_name] = vi
        return vi

    # --- queries over the model ------------------------------------------------

    def touching(self, entity: str) -> list[ConcernNode]:
        found = []
        for leaf in self.root.walk_leaves():
            inst = leaf.instance
            if inst is None:
                continue
            if entity in inst.result.endpoint_ids():
                found.append(leaf)
        return found

    def refresh(self, store: FactStore) -> dict[str, dict]:
        """Re-evaluate stale and broken leaves; returns per-leaf diffs."""
        report: dict[str, dict] = {}
        for leaf in self.root.walk_leaves():
            inst = leaf.instance
            if inst is None:
                continue
            if not leaf.stale and leaf.broken is None and \
                    inst.store_hash == store.hash:
                continue
            report[leaf.path()] = self.refresh_leaf(leaf, store)
        self.store_hash = store.hash
        return report

    def refresh_leaf(self, leaf: ConcernNode, store: FactStore,
                     params: dict[str, str] | None = None) -> dict:
        """Rebuild one leaf against the store, in place; returns its diff."""
        inst = leaf.instance
        assert inst is not None
        effective = dict(inst.params)
        if params:
            effective.update(params)
        try:
            fresh = build_sort(store, inst.kind, effective, name=inst.name,
                               virtuals=self.virtual_interfaces)
        except SortParamError as exc:
            leaf.broken = str(exc)
            return {"added": [], "removed": [], "error": str(exc)}
        old = {t.key(): t for t in inst.result.tuples}
        new = {t.key(): t for t in fresh.result.tuples}
        added = [new[k] for k in sorted(new.keys() - old.keys())]
        removed = [old[k] for k in sorted(old.keys() - new.keys())]
        leaf.instance = fresh
        leaf.stale = False
        leaf.broken = None
        return {"added": added, "removed": removed, "error": None}


def create_model(name: str, store_hash: str = "") -> ConcernModel:
    return ConcernModel(name, store_hash)


# --- persistence ----------------------------------------------------------------

def _triple(eid: str) -> list[str]:
    return list(parse_entity_id(eid))


def _tuple_json(t: RelTuple) -> dict:
    return {
        "src": _triple(t.source),
        "tgt": _triple(t.target),
        "kind": t.kind,
        "sites": [[s.file, s.start, s.end] for s in t.sites],
    }


def _tuple_from_json(obj: dict) -> RelTuple:
    return RelTuple(
        source=entity_id(*obj["src"]),
        target=entity_id(*obj["tgt"]),
        kind=obj["kind"],
        sites=tuple(Location(f, s, e) for f, s, e in obj["sites"]),
    )


def _instance_json(inst: SortInstance) -> dict:
    return {
        "sort_kind": inst.kind.value,
        "name": inst.name,
        "params": [list(p) for p in inst.params],
        "query_text": inst.query_text,
        "result": [_tuple_json(t) for t in inst.result.tuples],
        "obligations": [_triple(e) for e in inst.obligations],
        "notes": list(inst.notes),
        "store_hash": inst.store_hash,
    }


def _instance_from_json(obj: dict) -> SortInstance:
    tuples = tuple(_tuple_from_json(t) for t in obj["result"])
    result = ResultSet.of_tuples(tuples, obj["query_text"], obj["store_hash"])
    return SortInstance(
        kind=SortKind(obj["sort_kind"]),
        name=obj["name"],
        params=tuple((k, v) for k, v in obj["params"]),
        query_text=obj["query_text"],
        result=result,
        store_hash=obj["store_hash"],
        obligations=tuple(entity_id(*t) for t in obj["obligations"]),
        notes=tuple(obj.get("notes", [])),
    )


def _node_json(node: ConcernNode) -> dict:
    if node.kind == "leaf":
        assert node.instance is not None
        return {"name": node.name, "kind": "leaf",
                "instance": _instance_json(node.instance)}
    return {"name": node.name, "kind": "composite",
            "children": [_node_json(c) for c in node.children]}


def model_to_json(model: ConcernModel) -> dict:
    return {
        "schema": MODEL_SCHEMA,
        "name": model.name,
        "store_hash": model.store_hash,
        "virtual_interfaces": [
            {"role_name": vi.role_name, "host": _triple(vi.host_type),
             "members": list(vi.member_signatures)}
            for vi in sorted(model.virtual_interfaces.values(),
                             key=lambda v: v.role_name)
        ],
        "root": _node_json(model.root),
    }


def save_model(model: ConcernModel, sink: IO[str]) -> None:
    sink.write(dumps_model(model))


def dumps_model(model: ConcernModel) -> str:
    return json.dumps(model_to_json(model), indent=1) + "\n"


@dataclass
class LoadReport:
    model: ConcernModel
    stale: list[str] = field(default_factory=list)
    broken: list[tuple[str, str]] = field(default_factory=list)  # (path, detail)


def load_model(source: IO[str] | str, store: FactStore | None = None) -> LoadReport:
    """Load a model document; mark leaves stale/broken against the store."""
    text = source if isinstance(source, str) else source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"model document is not valid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict) or doc.get("schema") != MODEL_SCHEMA:
        raise SchemaError(
            f"unsupported model schema {doc.get('schema')!r}, "
            f"expected {MODEL_SCHEMA!r}")
    try:
        model = ConcernModel(doc["name"], doc.get("store_hash", ""))
        for vi_obj in doc.get("virtual_interfaces", []):
            vi = VirtualInterface(vi_obj["role_name"],
                                  entity_id(*vi_obj["host"]),
                                  tuple(vi_obj["members"]))
            model.virtual_interfaces[vi.role_name] = vi
        root_obj = doc["root"]
        _load_children(model, model.root, root_obj.get("children", []))
        model.root.name = root_obj.get("name", model.name)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed model document: {exc}") from exc

    report = LoadReport(model)
    if store is None:
        return report
    for leaf in model.root.walk_leaves():
        inst = leaf.instance
        if inst is None:
            continue
        if inst.store_hash == store.hash:
            continue
        leaf.stale = True
        report.stale.append(leaf.path())
        detail = _probe_params(store, model, inst)
        if detail is not None:
            leaf.broken = detail
            report.broken.append((leaf.path(), detail))
    return report


def _load_children(model: ConcernModel, parent: ConcernNode,
                   objs: list[dict]) -> None:
    for obj in objs:
        if obj.get("kind") == "leaf":
            node = ConcernNode(name=obj["name"], kind="leaf",
                               instance=_instance_from_json(obj["instance"]),
                               parent=parent)
            parent.children.append(node)
        else:
            node = ConcernNode(name=obj["name"], kind="composite", parent=parent)
            parent.children.append(node)
            _load_children(model, node, obj.get("children", []))


def _probe_params(store: FactStore, model: ConcernModel,
                  inst: SortInstance) -> str | None:
    """Check whether the instance's parameters still resolve in the store."""
    try:
        build_sort(store, inst.kind, dict(inst.params), name=inst.name,
                   virtuals=model.virtual_interfaces)
    except SortParamError as exc:
        return str(exc)
    return None
