"""Virtual interfaces: user-named member subsets treated as roles.

A type satisfies a virtual interface when, for every listed member
signature, it declares a matching member or inherits one through its
superclass chain (interface declarations are obligations, not inherited
implementations, so they do not count).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyMemberSet, NoMatchingMember
from .facts import Entity, FactStore, Location


@dataclass(frozen=True)
class VirtualInterface:
    role_name: str
    host_type: str  # entity id
    member_signatures: tuple[str, ...]

    def to_json(self) -> dict:
        return {"role_name": self.role_name, "host": self.host_type,
                "members": list(self.member_signatures)}


def _member_pattern(text: str):
    from .query.parser import _Parser
    return _Parser(text).term()


def define_virtual_interface(store: FactStore, host_type: str,
                             member_signatures: list[str] | tuple[str, ...],
                             role_name: str) -> VirtualInterface:
    """Validate the signatures against the host's declared members."""
    if not member_signatures:
        raise EmptyMemberSet(f"virtual interface {role_name!r} lists no members")
    host = store.entity(host_type)
    if host is None:
        raise NoMatchingMember(f"host type {host_type} not in store")
    members = store.declared_members(host_type)
    for sig in member_signatures:
        pat = _member_pattern(sig)
        if not any(pat.matches_entity(m) for m in members):
            raise NoMatchingMember(
                f"signature {sig!r} matches no declared member of "
                f"{host.qualified_name}")
    return VirtualInterface(role_name, host_type, tuple(member_signatures))


def inherited_member_pool(store: FactStore, class_id: str) -> list[Entity]:
    """Members declared in the class or inherited via its superclass chain."""
    pool: list[Entity] = []
    seen_types: set[str] = set()
    cur = [class_id]
    while cur:
        tid = cur.pop()
        if tid in seen_types:
            continue
        seen_types.add(tid)
        pool.extend(store.declared_members(tid))
        for f in store.facts_from("Extends", tid):
            cur.append(f.target)
    return pool


def satisfying_sites(store: FactStore, class_id: str,
                     vi: VirtualInterface) -> list[Location] | None:
    """Member locations witnessing satisfaction, or None if unsatisfied."""
    pool = inherited_member_pool(store, class_id)
    sites: list[Location] = []
    for sig in vi.member_signatures:
        pat = _member_pattern(sig)
        matches = [m for m in pool if pat.matches_entity(m)]
        if not matches:
            return None
        sites.extend(m.location for m in matches)
    return sorted(set(sites))


def satisfying_classes(store: FactStore, vi: VirtualInterface,
                       candidates=None) -> dict[str, list[Location]]:
    """Map of satisfying class ids to their witnessing member locations."""
    if candidates is None:
        candidates = [e.id for e in store.entities_of_kind("Class")]
    out: dict[str, list[Location]] = {}
    for cid in candidates:
        ent = store.entity(cid)
        if ent is None or ent.kind != "Class":
            continue
        sites = satisfying_sites(store, cid, vi)
        if sites is not None:
            out[cid] = sites
    return out
