"""The twelve crosscutting-concern sort templates as query builders.

Each builder validates its parameters, expands the sort's query template
with them, evaluates the query, and returns an immutable SortInstance.
An empty result is a valid instance: it documents absence.  Parameter
patterns that match nothing raise instead, to separate typos from
genuinely empty relations.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import (
    CallerUnresolved, EmptyContext, ExceptionUnresolved, FieldUnresolved,
    MissingBinding, NotAMemberOfType, ReferenceUnresolved, RoleUnresolved,
    SeedUnresolved, SortParamError, TargetUnresolved, TypeUnresolved,
    UnknownPattern,
)
from .facts import FactStore
from .query import ContextExpr, Evaluator, NamePattern, ResultSet, parse_context
from .query.parser import _Parser, parse_query
from .virtuals import VirtualInterface


class SortKind(str, Enum):
    CB = "CB"    # consistent behavior
    CE = "CE"    # contract enforcement
    ER = "ER"    # entangled roles / interfacing layer
    RL = "RL"    # redirection layer
    AV = "AV"    # add variability (method objects)
    EC = "EC"    # expose context
    RSI = "RSI"  # role superimposition
    SC = "SC"    # support classes for role superimposition
    PE = "PE"    # policy enforcement
    EP = "EP"    # exception propagation
    DE = "DE"    # design enforcement
    DBE = "DBE"  # dynamic behavior enforcement


@dataclass(frozen=True)
class SortInstance:
    kind: SortKind
    name: str
    params: tuple[tuple[str, str], ...]  # ordered (name, value-text) pairs
    query_text: str
    result: ResultSet
    store_hash: str
    obligations: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def param(self, name: str) -> str | None:
        for key, value in self.params:
            if key == name:
                return value
        return None


def parse_pattern(text: str) -> NamePattern:
    term = _Parser(text).term()
    if not isinstance(term, NamePattern):
        raise SortParamError(f"expected a name pattern, got {text!r}")
    return term


def _as_context(ctx) -> ContextExpr:
    if isinstance(ctx, str):
        return parse_context(ctx)
    return ctx


def _matching(store: FactStore, pattern: NamePattern, kinds: tuple[str, ...]):
    return [e for e in store.entities_of_kind(*kinds)
            if pattern.matches_entity(e)]


def _evaluate(store: FactStore, text: str, virtuals=None) -> ResultSet:
    return Evaluator(store, virtuals).eval_query(parse_query(text), text)


def _instance(kind: SortKind, name: str | None, params, text: str,
              store: FactStore, virtuals=None, obligations=(),
              notes=()) -> SortInstance:
    result = _evaluate(store, text, virtuals)
    return SortInstance(
        kind=kind, name=name or kind.value, params=tuple(params),
        query_text=text, result=result, store_hash=store.hash,
        obligations=tuple(sorted(obligations)), notes=tuple(notes))


# --- CB / CE ----------------------------------------------------------------

def cb_query(store: FactStore, context, target_method, *, name=None,
             virtuals=None, _kind=SortKind.CB) -> SortInstance:
    ctx = _as_context(context)
    pattern = parse_pattern(target_method) if isinstance(target_method, str) \
        else target_method
    if not _matching(store, pattern, ("Method", "Constructor")):
        raise TargetUnresolved(
            f"target pattern {pattern.pretty()!r} matches no method")
    target = pattern.pretty()
    text = (
        f"<context> = {ctx.pretty()};\n"
        f"<selcallers> = <context> && sourceof(invokes(method *, * {target}));\n"
        f"{_kind.value}(contextElem, {target}) = invokes(<selcallers>, * {target});"
    )
    params = [("context", ctx.pretty()), ("target", target)]
    return _instance(_kind, name, params, text, store, virtuals)


def ce_query(store: FactStore, context, target_method, *, name=None,
             virtuals=None) -> SortInstance:
    return cb_query(store, context, target_method, name=name,
                    virtuals=virtuals, _kind=SortKind.CE)


# --- ER / RL -----------------------------------------------------------------

def _resolve_single_type(store: FactStore, type_pattern, error_cls):
    pattern = parse_pattern(type_pattern) if isinstance(type_pattern, str) \
        else type_pattern
    matches = _matching(store, pattern, ("Class", "Interface"))
    if not matches:
        raise error_cls(f"type pattern {pattern.pretty()!r} matches no type")
    if len(matches) > 1:
        names = ", ".join(m.qualified_name for m in matches)
        raise error_cls(f"type pattern {pattern.pretty()!r} is ambiguous: {names}")
    return matches[0]


def _resolve_reference(store: FactStore, type_entity, reference: str):
    """Resolve `field NAME` / `accessor NAME` / bare NAME on a type.

    Returns (kind, member entity, first line of the generated query) where
    the first line binds the interfaced type.
    """
    ref = reference.strip()
    explicit = None
    for prefix in ("field ", "accessor ", "method "):
        if ref.startswith(prefix):
            explicit = prefix.strip()
            ref = ref[len(prefix):].strip()
    ref = ref.rstrip("()")
    pool = {m.simple_name: m for m in store.declared_members(type_entity.id)}
    for sup in sorted(store.supertypes(type_entity.id)):
        for m in store.declared_members(sup):
            pool.setdefault(m.simple_name, m)
    member = pool.get(ref)
    if member is None:
        elsewhere = any(e.simple_name == ref
                        for e in store.entities_of_kind("Field", "Method"))
        if elsewhere:
            raise NotAMemberOfType(
                f"{ref!r} exists in the store but is not a member of "
                f"{type_entity.qualified_name}")
        raise ReferenceUnresolved(
            f"{ref!r} is not a member of {type_entity.qualified_name}")
    if member.kind == "Field" and explicit in (None, "field"):
        if not store.facts_from("FieldType", member.id):
            raise ReferenceUnresolved(
                f"field {member.qualified_name} has no resolvable declared type")
        line = (f"<interfacedtype> = targetof(fieldtype("
                f"field {member.qualified_name}, type *));")
        return "field", member, line
    if member.kind == "Method" and explicit in (None, "accessor", "method"):
        if member.sig_param_types():
            raise ReferenceUnresolved(
                f"accessor {member.qualified_name} must take no arguments")
        if not store.facts_from("ReturnType", member.id):
            raise ReferenceUnresolved(
                f"accessor {member.qualified_name} has no resolvable return type")
        line = (f"<interfacedtype> = targetof(returntype("
                f"method {member.qualified_name}({','.join(member.sig_param_types())}), type *));")
        return "accessor", member, line
    raise ReferenceUnresolved(
        f"{ref!r} on {type_entity.qualified_name} is not a field or "
        f"zero-argument accessor")


def er_query(store: FactStore, interfacing_type, reference: str, *,
             name=None, virtuals=None) -> SortInstance:
    ent = _resolve_single_type(store, interfacing_type, ReferenceUnresolved)
    ref_kind, member, first = _resolve_reference(store, ent, reference)
    text = (
        f"{first}\n"
        f"<refsources> = targetof(declares(type {ent.qualified_name}, method *));\n"
        f"ER({ent.simple_name}, {member.simple_name}) = "
        f"references(<refsources>, <interfacedtype>+);"
    )
    params = [("type", ent.qualified_name),
              ("reference", f"{ref_kind} {member.simple_name}")]
    return _instance(SortKind.ER, name, params, text, store, virtuals)


def rl_query(store: FactStore, layer_type, reference: str, *,
             name=None, virtuals=None) -> SortInstance:
    ent = _resolve_single_type(store, layer_type, ReferenceUnresolved)
    ref_kind, member, first = _resolve_reference(store, ent, reference)
    first = first.replace("<interfacedtype>", "<comptype>")
    text = (
        f"{first}\n"
        f"<compmethods> = targetof(declares(<comptype>+, method *));\n"
        f"<decormethods> = targetof(declares(type {ent.qualified_name}, method *));\n"
        f"RL({ent.simple_name}, {member.simple_name}) = "
        f"invokes(<decormethods>, <compmethods>) && "
        f"compares(<decormethods>, <compmethods>);"
    )
    params = [("type", ent.qualified_name),
              ("reference", f"{ref_kind} {member.simple_name}")]
    return _instance(SortKind.RL, name, params, text, store, virtuals)


# --- AV -----------------------------------------------------------------------

def av_query(store: FactStore, method_object_type, *, name=None,
             virtuals=None) -> SortInstance:
    ent = _resolve_single_type(store, method_object_type, TypeUnresolved)
    notes = []
    declared = [m for m in store.declared_members(ent.id) if m.kind == "Method"]
    if len(declared) != 1:
        notes.append(
            f"method-object type {ent.qualified_name} declares "
            f"{len(declared)} methods (1 is typical)")
    t = ent.qualified_name
    text = (
        f"<target> = sourceof(params(method *, type {t}));\n"
        f"<creators> = sourceof(creates(method *, type {t}+));\n"
        f"<source> = <creators> && sourceof(invokes(method *, <target>));\n"
        f"AV({ent.simple_name}) = invokes(<source>, <target>);"
    )
    params = [("type", t)]
    return _instance(SortKind.AV, name, params, text, store, virtuals,
                     notes=notes)


# --- EC ------------------------------------------------------------------------

def ec_query(store: FactStore, caller, arg_name: str, arg_type, *,
             transitive: bool = False, name=None, virtuals=None) -> SortInstance:
    pattern = parse_pattern(caller) if isinstance(caller, str) else caller
    if not _matching(store, pattern, ("Method", "Constructor")):
        raise CallerUnresolved(
            f"caller pattern {pattern.pretty()!r} matches no method")
    cp = pattern.pretty()
    tp = (parse_pattern(arg_type) if isinstance(arg_type, str) else arg_type).pretty()
    lines = [
        f"<selcallees> = sourceof(declares(method *, param {arg_name})) && "
        f"sourceof(params(method *, type {tp}));",
    ]
    if transitive:
        lines.append(
            f"EC({cp}, {arg_name}) = closure(invokes(method {cp}, <selcallees>)"
            f" || invokes(<selcallees>, <selcallees>) from (method {cp}));")
    else:
        lines.append(
            f"EC({cp}, {arg_name}) = invokes(method {cp}, <selcallees>);")
    params = [("caller", cp), ("arg_name", arg_name), ("arg_type", tp),
              ("transitive", "true" if transitive else "false")]
    return _instance(SortKind.EC, name, params, "\n".join(lines), store, virtuals)


# --- RSI / SC ---------------------------------------------------------------------

def _role_argument(store: FactStore, role, virtuals):
    """Returns (term text, role label, params value) for a role argument."""
    if isinstance(role, VirtualInterface):
        return f"virtual {role.role_name}", role.role_name, f"virtual {role.role_name}"
    if isinstance(role, str) and role.strip().startswith("virtual "):
        rname = role.strip()[len("virtual "):].strip()
        if virtuals is None or rname not in virtuals:
            raise RoleUnresolved(f"virtual interface {rname!r} is not defined")
        return f"virtual {rname}", rname, f"virtual {rname}"
    ent = _resolve_single_type(store, role, RoleUnresolved)
    return f"type {ent.qualified_name}", ent.simple_name, ent.qualified_name


def rsi_query(store: FactStore, role, context, *, name=None,
              virtuals=None) -> SortInstance:
    virtuals = dict(virtuals or {})
    if isinstance(role, VirtualInterface):
        virtuals.setdefault(role.role_name, role)
    term, label, pvalue = _role_argument(store, role, virtuals)
    ctx = _as_context(context)
    if term.startswith("virtual "):
        rel = f"implements(<selectedimpls>, {term})"
        impl = f"sourceof(implements(*, {term}))"
    else:
        ent = _resolve_single_type(store, role, RoleUnresolved)
        if ent.kind == "Class":
            # class roles are taken up by extending, not implementing
            rel = f"extends(<selectedimpls>, {term})"
            impl = f"sourceof(extends(*, {term}))"
        else:
            rel = f"implements(<selectedimpls>, {term})"
            impl = f"sourceof(implements(*, {term}))"
    text = (
        f"<implementors> = {impl};\n"
        f"<context> = {ctx.pretty()};\n"
        f"<selectedimpls> = <context> && <implementors>;\n"
        f"RSI({label}, contextElem) = {rel};"
    )
    params = [("role", pvalue), ("context", ctx.pretty())]
    return _instance(SortKind.RSI, name, params, text, store, virtuals)


def sc_query(store: FactStore, enclosing_context, role, *, name=None,
             virtuals=None) -> SortInstance:
    ent = _resolve_single_type(store, role, RoleUnresolved)
    ctx = _as_context(enclosing_context)
    r = ent.qualified_name
    text = (
        f"<enclosing> = {ctx.pretty()};\n"
        f"<nested> = targetof(contains(<enclosing>, class *));\n"
        f"<implementors> = sourceof(implements(<nested>, type {r}+));\n"
        f"SC(contextElem, {ent.simple_name}) = "
        f"implements(<implementors>, type {r}+);"
    )
    params = [("context", ctx.pretty()), ("role", r)]
    return _instance(SortKind.SC, name, params, text, store, virtuals)


# --- PE --------------------------------------------------------------------------

def pe_query(store: FactStore, src_context, tgt_context,
             polarity: str = "forbid", *, name=None, virtuals=None) -> SortInstance:
    if polarity not in ("forbid", "require"):
        raise SortParamError(f"polarity must be forbid or require, got {polarity!r}")
    src = _as_context(src_context)
    tgt = _as_context(tgt_context)
    ev = Evaluator(store, virtuals)
    src_set = ev.context_set(src)
    tgt_set = ev.context_set(tgt)
    if not src_set or not tgt_set:
        raise EmptyContext("both policy contexts must be nonempty")
    text = (
        f"<src_context> = {src.pretty()};\n"
        f"<tgt_context> = {tgt.pretty()};\n"
        f"PE(srcContextElem, targetContextElem) = "
        f"references(<src_context>, <tgt_context>);"
    )
    params = [("source", src.pretty()), ("target", tgt.pretty()),
              ("polarity", polarity)]
    inst = _instance(SortKind.PE, name, params, text, store, virtuals)
    if polarity == "require":
        met: set[str] = set()
        for t in inst.result.tuples:
            met.add(t.source)
        obligations = []
        for eid in sorted(src_set):
            ent = store.entity(eid)
            if ent is None or ent.kind not in ("Class", "Interface"):
                continue
            scope = store.scope_of(eid)
            if not (met & scope):
                obligations.append(eid)
        inst = replace(inst, obligations=tuple(obligations))
    return inst


# --- EP ---------------------------------------------------------------------------

def ep_query(store: FactStore, seed_method, exception_type, context, *,
             transitive: bool = False, name=None, virtuals=None) -> SortInstance:
    seed = parse_pattern(seed_method) if isinstance(seed_method, str) else seed_method
    if not _matching(store, seed, ("Method", "Constructor")):
        raise SeedUnresolved(f"seed pattern {seed.pretty()!r} matches no method")
    exc = parse_pattern(exception_type) if isinstance(exception_type, str) \
        else exception_type
    if not _matching(store, exc, ("Class",)):
        raise ExceptionUnresolved(
            f"exception pattern {exc.pretty()!r} matches no class")
    ctx = _as_context(context)
    sp, ep = seed.pretty(), exc.pretty()
    lines = [f"<context> = {ctx.pretty()};",
             f"<throw> = sourceof(throws(method *, type {ep}));"]
    if transitive:
        lines += [
            f"<chain> = closure(invokes(<throw>, <throw>) || "
            f"invokes(<throw>, method {sp}) to (method {sp}));",
            f"<source> = sourceof(<chain>) && <context>;",
        ]
    else:
        lines += [
            f"<callers> = sourceof(invokes(method *, method {sp}));",
            f"<source> = <throw> && <callers> && <context>;",
        ]
    lines.append(f"EP({sp}, {ep}, contextElem) = throws(<source>, type {ep});")
    params = [("seed", sp), ("exception", ep), ("context", ctx.pretty()),
              ("transitive", "true" if transitive else "false")]
    return _instance(SortKind.EP, name, params, "\n".join(lines), store, virtuals)


# --- DE ----------------------------------------------------------------------------

def de_query(store: FactStore, context, member_signature, *, name=None,
             virtuals=None) -> SortInstance:
    ctx = _as_context(context)
    ev = Evaluator(store, virtuals)
    ctx_set = ev.context_set(ctx)
    if not ctx_set:
        raise EmptyContext("design-enforcement context is empty")
    pattern = parse_pattern(member_signature) if isinstance(member_signature, str) \
        else member_signature
    body = pattern.pretty()
    if pattern.selector is None:
        body = f"member {body}"
    text = (
        f"<context> = {ctx.pretty()};\n"
        f"DE(contextElem, m) = declares(<context>, {body});"
    )
    params = [("context", ctx.pretty()), ("member", body)]
    inst = _instance(SortKind.DE, name, params, text, store, virtuals)
    conforming = {t.source for t in inst.result.tuples}
    obligations = []
    for eid in sorted(ctx_set):
        ent = store.entity(eid)
        if ent is None or ent.kind not in ("Class", "Interface"):
            continue
        if eid not in conforming:
            obligations.append(eid)
    return replace(inst, obligations=tuple(obligations))


# --- DBE -----------------------------------------------------------------------------

def dbe_query(store: FactStore, owner_type, field_name, context=None, *,
              name=None, virtuals=None) -> SortInstance:
    ent = _resolve_single_type(store, owner_type, FieldUnresolved)
    fields = [m for m in store.declared_members(ent.id)
              if m.kind == "Field" and (
                  parse_pattern(field_name).matches_entity(m)
                  if isinstance(field_name, str) else field_name.matches_entity(m))]
    if not fields:
        raise FieldUnresolved(
            f"{field_name!r} matches no field of {ent.qualified_name}")
    fq = fields[0].qualified_name
    if context is None:
        ctx_line = (f"<context> = targetof(declares("
                    f"type {ent.qualified_name}, method *));")
        ctx_value = "(default: owner methods)"
    else:
        ctx = _as_context(context)
        ctx_line = f"<context> = {ctx.pretty()};"
        ctx_value = ctx.pretty()
    text = (
        f"{ctx_line}\n"
        f"DBE({ent.simple_name}, {fields[0].simple_name}) = "
        f"set(<context>, field {fq}) || get(<context>, field {fq});"
    )
    params = [("type", ent.qualified_name), ("field", fq),
              ("context", ctx_value)]
    return _instance(SortKind.DBE, name, params, text, store, virtuals)


# --- rebuild from persisted parameters ---------------------------------------

def build_sort(store: FactStore, kind: SortKind | str, params: dict[str, str],
               *, name=None, virtuals=None) -> SortInstance:
    """Re-run a builder from its persisted (kind, params) pair."""
    kind = SortKind(kind)
    p = dict(params)
    flag = p.get("transitive", "false") == "true"
    if kind in (SortKind.CB, SortKind.CE):
        fn = cb_query if kind == SortKind.CB else ce_query
        return fn(store, p["context"], p["target"], name=name, virtuals=virtuals)
    if kind == SortKind.ER:
        return er_query(store, p["type"], p["reference"], name=name,
                        virtuals=virtuals)
    if kind == SortKind.RL:
        return rl_query(store, p["type"], p["reference"], name=name,
                        virtuals=virtuals)
    if kind == SortKind.AV:
        return av_query(store, p["type"], name=name, virtuals=virtuals)
    if kind == SortKind.EC:
        return ec_query(store, p["caller"], p["arg_name"], p["arg_type"],
                        transitive=flag, name=name, virtuals=virtuals)
    if kind == SortKind.RSI:
        return rsi_query(store, p["role"], p["context"], name=name,
                         virtuals=virtuals)
    if kind == SortKind.SC:
        return sc_query(store, p["context"], p["role"], name=name,
                        virtuals=virtuals)
    if kind == SortKind.PE:
        return pe_query(store, p["source"], p["target"],
                        p.get("polarity", "forbid"), name=name, virtuals=virtuals)
    if kind == SortKind.EP:
        return ep_query(store, p["seed"], p["exception"], p["context"],
                        transitive=flag, name=name, virtuals=virtuals)
    if kind == SortKind.DE:
        member = p["member"]
        if member.startswith("member "):
            member = member[len("member "):]
        return de_query(store, p["context"], member, name=name, virtuals=virtuals)
    if kind == SortKind.DBE:
        ctx = p.get("context")
        if ctx == "(default: owner methods)":
            ctx = None
        return dbe_query(store, p["type"], p["field"].rsplit(".", 1)[-1],
                         ctx, name=name, virtuals=virtuals)
    raise SortParamError(f"unknown sort kind {kind}")


# --- design-pattern composition -------------------------------------------------

@dataclass(frozen=True)
class _Part:
    kind: SortKind
    label: str
    params: tuple[tuple[str, str], ...]  # builder kwarg -> binding key
    required: bool = True


def _part(kind, label, required=True, **params) -> _Part:
    return _Part(kind, label, tuple(params.items()), required)


# Each design pattern is a composition of sort instances; optional parts
# are built only when their bindings are supplied.
PATTERN_TABLE: dict[str, tuple[_Part, ...]] = {
    "adapter": (
        _part(SortKind.RSI, "Adaptee role", role="adaptee_role",
              context="adaptee_context"),
        _part(SortKind.RL, "adapter redirection", type="adapter_type",
              reference="adaptee_reference"),
    ),
    "state": (
        _part(SortKind.RSI, "Context role", role="context_role",
              context="context_context"),
        _part(SortKind.CB, "state-change notification",
              context="notify_context", target="notify_target"),
        _part(SortKind.RL, "state redirection", type="context_type",
              reference="state_reference"),
    ),
    "decorator": (
        _part(SortKind.RL, "component redirection", type="decorator_type",
              reference="component_reference"),
    ),
    "proxy": (
        _part(SortKind.RL, "subject redirection", type="proxy_type",
              reference="subject_reference"),
        _part(SortKind.CB, "access check", required=False,
              context="check_context", target="check_target"),
    ),
    "visitor": (
        _part(SortKind.RSI, "Visitable role", role="visitable_role",
              context="visitable_context"),
        _part(SortKind.AV, "visitable method objects", required=False,
              type="method_object_type"),
    ),
    "command": (
        _part(SortKind.RSI, "Receiver role", role="receiver_role",
              context="receiver_context"),
        _part(SortKind.ER, "invoker interfacing", type="invoker_type",
              reference="command_reference"),
        _part(SortKind.RSI, "Invoker role", role="invoker_role",
              context="invoker_context"),
        _part(SortKind.CB, "execute calls", context="executors_context",
              target="execute_target"),
        _part(SortKind.AV, "command method objects", required=False,
              type="method_object_type"),
    ),
    "composite": (
        _part(SortKind.RSI, "Composite role", role="composite_role",
              context="composite_context"),
    ),
    "iterator": (
        _part(SortKind.RSI, "Aggregate role", role="aggregate_role",
              context="aggregate_context"),
    ),
    "flyweight": (
        _part(SortKind.RSI, "Flyweight role", role="flyweight_role",
              context="flyweight_context"),
        _part(SortKind.CB, "factory access", context="access_context",
              target="factory_target"),
    ),
    "memento": (
        _part(SortKind.RSI, "Originator role", role="originator_role",
              context="originator_context"),
        _part(SortKind.CB, "memento acquisition", context="caretaker_context",
              target="memento_target"),
    ),
    "strategy": (
        _part(SortKind.RSI, "Context role", role="context_role",
              context="context_context"),
        _part(SortKind.RSI, "Strategy role", required=False,
              role="strategy_role", context="strategy_context"),
    ),
    "mediator": (
        _part(SortKind.RSI, "Colleague role", role="colleague_role",
              context="colleague_context"),
        _part(SortKind.CB, "mediator notification", context="notify_context",
              target="notify_target"),
    ),
    "chain_of_responsibility": (
        _part(SortKind.RSI, "Handler role", role="handler_role",
              context="handler_context"),
        _part(SortKind.RL, "successor redirection", type="handler_type",
              reference="successor_reference"),
    ),
    "prototype": (
        _part(SortKind.RSI, "Prototype role", role="prototype_role",
              context="prototype_context"),
        _part(SortKind.DE, "clone obligation", context="clone_context",
              member="clone_member"),
    ),
    "singleton": (
        _part(SortKind.RSI, "Singleton role", role="singleton_role",
              context="singleton_context"),
        _part(SortKind.DE, "private constructor", context="constructor_context",
              member="constructor_member"),
        _part(SortKind.CB, "instance access", context="access_context",
              target="instance_target"),
    ),
    "observer": (
        _part(SortKind.RSI, "Observer role", role="observer_role",
              context="observer_context"),
        _part(SortKind.RSI, "Subject role", role="subject_role",
              context="subject_context"),
        _part(SortKind.CB, "notify", context="notify_context",
              target="notify_target"),
        _part(SortKind.CB, "attach", context="attach_context",
              target="attach_target"),
        _part(SortKind.CB, "detach", context="detach_context",
              target="detach_target"),
    ),
}


def compose_pattern(store: FactStore, pattern_name: str,
                    bindings: dict[str, str], *, virtuals=None) -> list[SortInstance]:
    """Build the sort-instance composition for one design pattern row."""
    key = pattern_name.strip().lower().replace(" ", "_").replace("-", "_")
    parts = PATTERN_TABLE.get(key)
    if parts is None:
        raise UnknownPattern(f"unknown design pattern {pattern_name!r}")
    instances = []
    for part in parts:
        kwargs = {}
        missing = None
        for kwarg, binding_key in part.params:
            if binding_key not in bindings:
                missing = binding_key
                break
            kwargs[kwarg] = bindings[binding_key]
        if missing is not None:
            if part.required:
                raise MissingBinding(missing)
            continue
        instances.append(build_sort(store, part.kind, kwargs,
                                    name=f"{part.kind.value} {part.label}",
                                    virtuals=virtuals))
    return instances
