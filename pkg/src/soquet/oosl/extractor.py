"""Extraction of a sealed fact store from parsed OOSL units.

Call resolution is static: the receiver's declared type is searched for a
member with matching name and arity, walking the extends chain and then
the implements chain.  Constructs that cannot be resolved degrade to
recorded warnings and never abort extraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..facts import Entity, FactStore, FactStoreBuilder, Location, entity_id
from .ast import (
    Assign, Binary, Block, Call, Expr, ExprStmt, FieldAccess, FieldDecl, For,
    If, Literal, LocalDecl, MethodDecl, Name, New, Param, Return, SourceUnit,
    Stmt, Throw, TypeDecl, Unary, VarRead, While,
)

PRIMITIVES = frozenset({"void", "int", "long", "short", "byte", "char",
                        "boolean", "float", "double"})


@dataclass(frozen=True)
class ResolutionWarning:
    file: str
    line: int
    message: str

    def render(self) -> str:
        return f"{self.file}:{self.line}: {self.message}"


@dataclass
class ExtractionResult:
    store: FactStore
    warnings: list[ResolutionWarning]

    def report(self) -> str:
        if not self.warnings:
            return "no resolution warnings\n"
        lines = [w.render() for w in sorted(
            self.warnings, key=lambda w: (w.file, w.line, w.message))]
        return "\n".join(lines) + "\n"


@dataclass
class _TypeInfo:
    qname: str
    kind: str  # "Class" | "Interface"
    package: str
    file: str
    decl: TypeDecl | None  # None for anonymous shells until filled
    enclosing: str | None  # qname of the lexically enclosing type
    simple: str
    extends: list[Name] = field(default_factory=list)
    implements: list[Name] = field(default_factory=list)
    members: list = field(default_factory=list)
    modifiers: list[str] = field(default_factory=list)
    line: int = 0
    end_line: int = 0
    anon_base: Name | None = None  # the T of `new T(...) { ... }`


class Extractor:
    def __init__(self, units: list[SourceUnit], project_name: str = "Proj"):
        self.units = sorted(units, key=lambda u: u.path)
        self.project_name = project_name
        self.builder = FactStoreBuilder()
        self.warnings: list[ResolutionWarning] = []
        self.types: dict[str, _TypeInfo] = {}
        self.by_simple: dict[str, list[str]] = {}
        self.by_package: dict[str, list[str]] = {}
        self.packages: dict[str, tuple[str, int]] = {}  # name -> (file, line)
        self.type_ids: dict[str, str] = {}  # qname -> entity id
        self.method_index: dict[str, list[tuple[MethodDecl, str]]] = {}
        self.field_index: dict[str, dict[str, str]] = {}  # type qname -> name -> field id
        self.field_types: dict[str, str] = {}  # field id -> type qname
        self.param_entities: dict[tuple[str, str], str] = {}  # (method id, name) -> id
        self.method_qnames: dict[str, str] = {}  # method id -> qname

    def warn(self, file: str, line: int, message: str) -> None:
        self.warnings.append(ResolutionWarning(file, line, message))

    # --- phase A: symbol collection ----------------------------------------

    def collect(self) -> None:
        for unit in self.units:
            if unit.package not in self.packages:
                self.packages[unit.package] = (unit.path, 1)
            for decl in unit.types:
                self._collect_type(decl, unit.package, unit.path, None)

    def _collect_type(self, decl: TypeDecl, package: str, file: str,
                      enclosing: str | None) -> None:
        qname = f"{enclosing}${decl.name}" if enclosing else f"{package}.{decl.name}"
        info = _TypeInfo(
            qname=qname, kind="Class" if decl.kind == "class" else "Interface",
            package=package, file=file, decl=decl, enclosing=enclosing,
            simple=decl.name, extends=decl.extends, implements=decl.implements,
            members=decl.members, modifiers=decl.modifiers,
            line=decl.line, end_line=decl.end_line)
        self._register(info)
        anon_counter = [0]
        for member in decl.members:
            if isinstance(member, TypeDecl):
                self._collect_type(member, package, file, qname)
            elif isinstance(member, MethodDecl) and member.body is not None:
                self._collect_anons(member.body, package, file, qname, anon_counter)

    def _collect_anons(self, stmts: list[Stmt], package: str, file: str,
                       enclosing: str, counter: list[int]) -> None:
        for stmt in stmts:
            for expr in _stmt_exprs(stmt):
                self._collect_anons_expr(expr, package, file, enclosing, counter)
            for sub in _stmt_children(stmt):
                self._collect_anons([sub], package, file, enclosing, counter)

    def _collect_anons_expr(self, expr: Expr, package: str, file: str,
                            enclosing: str, counter: list[int]) -> None:
        if isinstance(expr, New):
            if expr.body is not None:
                counter[0] += 1
                simple = str(counter[0])
                qname = f"{enclosing}${simple}"
                info = _TypeInfo(
                    qname=qname, kind="Class", package=package, file=file,
                    decl=None, enclosing=enclosing, simple=simple,
                    members=expr.body, line=expr.line, end_line=expr.line,
                    anon_base=expr.type_name)
                self._register(info)
                inner_counter = [0]
                for member in expr.body:
                    if isinstance(member, MethodDecl) and member.body is not None:
                        self._collect_anons(member.body, package, file, qname,
                                            inner_counter)
            for arg in expr.args:
                self._collect_anons_expr(arg, package, file, enclosing, counter)
        elif isinstance(expr, Call):
            for arg in expr.args:
                self._collect_anons_expr(arg, package, file, enclosing, counter)
        elif isinstance(expr, Binary):
            self._collect_anons_expr(expr.left, package, file, enclosing, counter)
            self._collect_anons_expr(expr.right, package, file, enclosing, counter)
        elif isinstance(expr, Unary):
            self._collect_anons_expr(expr.operand, package, file, enclosing, counter)

    def _register(self, info: _TypeInfo) -> None:
        self.types[info.qname] = info
        self.by_simple.setdefault(info.simple, []).append(info.qname)
        if info.enclosing is None:
            self.by_package.setdefault(info.package, []).append(info.qname)

    # --- type resolution ------------------------------------------------------

    def resolve_type(self, name: Name, ctx_type: str | None, ctx_package: str,
                     file: str, quiet: bool = False) -> str | None:
        """Resolve a source type name to a type qname, or None."""
        text = name.text
        if text in PRIMITIVES:
            return None
        if text in self.types:
            return text
        if "." not in text:
            # nested types of the enclosing chain
            cur = ctx_type
            while cur is not None:
                candidate = f"{cur}${text}"
                if candidate in self.types:
                    return candidate
                cur = self.types[cur].enclosing if cur in self.types else None
            candidate = f"{ctx_package}.{text}"
            if candidate in self.types:
                return candidate
            matches = self.by_simple.get(text, [])
            if len(matches) == 1:
                return matches[0]
        if not quiet:
            self.warn(file, name.line, f"cannot resolve type {text!r}")
        return None

    # --- phase B: entities and declaration facts ------------------------------

    def declare(self) -> None:
        project = Entity.make("Project", self.project_name, self.project_name)
        self.builder.add_entity(project)
        self.project_id = project.id
        for pkg in sorted(self.packages):
            file, line = self.packages[pkg]
            ent = Entity.make("Package", pkg.rsplit(".", 1)[-1], pkg,
                              location=Location(file, line, line))
            self.builder.add_entity(ent)
            self.builder.add_fact("Contains", project.id, ent.id,
                                  Location(file, line, line))
        for qname in sorted(self.types):
            self._declare_type_entity(self.types[qname])
        for qname in sorted(self.types):
            self._declare_type_body(self.types[qname])

    def _declare_type_entity(self, info: _TypeInfo) -> None:
        # Parent entities sort before children (qname prefix order), so a
        # single sorted pass satisfies declared_in ordering.
        if info.enclosing is not None:
            parent_id = self.type_ids[info.enclosing]
        else:
            parent_id = entity_id("Package", info.package)
        ent = Entity.make(
            info.kind, info.simple, info.qname,
            declared_in=parent_id, modifiers=info.modifiers,
            location=Location(info.file, info.line, info.end_line))
        self.builder.add_entity(ent)
        self.type_ids[info.qname] = ent.id
        self.builder.add_fact("Contains", parent_id, ent.id, ent.location)

    def _declare_type_body(self, info: _TypeInfo) -> None:
        tid = self.type_ids[info.qname]
        loc = Location(info.file, info.line, info.line)
        supers = list(info.extends)
        if info.anon_base is not None:
            supers = [info.anon_base]
        for sup in supers:
            target = self.resolve_type(sup, info.enclosing, info.package, info.file)
            if target is None:
                continue
            target_info = self.types[target]
            kind = "Implements" if (info.kind == "Class" and
                                    target_info.kind == "Interface") else "Extends"
            self.builder.add_fact(kind, tid, self.type_ids[target],
                                  Location(info.file, sup.line, sup.line))
        for sup in info.implements:
            target = self.resolve_type(sup, info.enclosing, info.package, info.file)
            if target is None:
                continue
            self.builder.add_fact("Implements", tid, self.type_ids[target],
                                  Location(info.file, sup.line, sup.line))

        self.field_index.setdefault(info.qname, {})
        for member in info.members:
            if isinstance(member, FieldDecl):
                self._declare_field(info, tid, member)
            elif isinstance(member, MethodDecl):
                self._declare_method(info, tid, member)

    def _declare_field(self, info: _TypeInfo, tid: str, decl: FieldDecl) -> None:
        loc = Location(info.file, decl.line, decl.line)
        ent = Entity.make("Field", decl.name, f"{info.qname}.{decl.name}",
                          declared_in=tid, modifiers=decl.modifiers, location=loc)
        self.builder.add_entity(ent)
        self.builder.add_fact("Declares", tid, ent.id, loc)
        self.field_index[info.qname][decl.name] = ent.id
        ftype = self.resolve_type(decl.type_name, info.qname, info.package, info.file)
        if ftype is not None:
            self.builder.add_fact("FieldType", ent.id, self.type_ids[ftype], loc)
            self.field_types[ent.id] = ftype

    def _declare_method(self, info: _TypeInfo, tid: str, decl: MethodDecl) -> None:
        loc = Location(info.file, decl.line, decl.end_line)
        is_ctor = decl.return_type is None
        name = "new" if is_ctor else decl.name
        param_types = []
        for p in decl.params:
            resolved = self.resolve_type(p.type_name, info.qname, info.package,
                                         info.file, quiet=True)
            if resolved is not None:
                param_types.append(resolved)
            else:
                param_types.append(p.type_name.text)
                if p.type_name.text not in PRIMITIVES:
                    self.warn(info.file, p.type_name.line,
                              f"cannot resolve type {p.type_name.text!r}")
        signature = f"{name}({','.join(param_types)})"
        kind = "Constructor" if is_ctor else "Method"
        ent = Entity.make(kind, name, f"{info.qname}.{name}", signature,
                          declared_in=tid, modifiers=decl.modifiers, location=loc)
        self.builder.add_entity(ent)
        self.builder.add_fact("Declares", tid, ent.id, loc)
        self.method_index.setdefault(info.qname, []).append((decl, ent.id))
        self.method_qnames[ent.id] = ent.qualified_name

        for p, ptype in zip(decl.params, param_types):
            ploc = Location(info.file, p.line, p.line)
            pent = Entity.make("Parameter", p.name, f"{ent.qualified_name}.{p.name}",
                               declared_in=ent.id, location=ploc)
            if self.builder.has_entity(pent.id):
                # same-name parameter of an overload: disambiguate the path
                pent = Entity.make("Parameter", p.name,
                                   f"{ent.qualified_name}.{p.name}$2",
                                   declared_in=ent.id, location=ploc)
            self.builder.add_entity(pent)
            self.param_entities[(ent.id, p.name)] = pent.id
            self.builder.add_fact("Declares", ent.id, pent.id, ploc)
            if ptype in self.types:
                self.builder.add_fact("ParamType", pent.id,
                                      self.type_ids[ptype], ploc)
        if not is_ctor:
            rtype = self.resolve_type(decl.return_type, info.qname, info.package,
                                      info.file, quiet=True)
            if rtype is not None:
                self.builder.add_fact("ReturnType", ent.id,
                                      self.type_ids[rtype], loc)
            elif decl.return_type.text not in PRIMITIVES:
                self.warn(info.file, decl.return_type.line,
                          f"cannot resolve type {decl.return_type.text!r}")
        for exc in decl.throws:
            etype = self.resolve_type(exc, info.qname, info.package, info.file)
            if etype is not None:
                self.builder.add_fact("Throws", ent.id, self.type_ids[etype],
                                      Location(info.file, exc.line, exc.line))

    # --- member lookup ----------------------------------------------------------

    def _super_chain(self, qname: str) -> list[str]:
        """The type, its extends closure, then its implements closure."""
        ordered: list[str] = []
        seen: set[str] = set()

        def walk_extends(q: str) -> None:
            if q in seen or q not in self.types:
                return
            seen.add(q)
            ordered.append(q)
            info = self.types[q]
            supers = [info.anon_base] if info.anon_base is not None else list(info.extends)
            for sup in supers:
                resolved = self.resolve_type(sup, info.enclosing, info.package,
                                             info.file, quiet=True)
                if resolved is not None and self.types[resolved].kind == "Class":
                    walk_extends(resolved)

        walk_extends(qname)
        frontier = list(ordered)
        while frontier:
            q = frontier.pop(0)
            info = self.types.get(q)
            if info is None:
                continue
            candidates = list(info.implements) + list(info.extends)
            if info.anon_base is not None:
                candidates = [info.anon_base]
            for sup in candidates:
                resolved = self.resolve_type(sup, info.enclosing, info.package,
                                             info.file, quiet=True)
                if resolved is not None and resolved not in seen:
                    seen.add(resolved)
                    ordered.append(resolved)
                    frontier.append(resolved)
        return ordered

    def lookup_method(self, type_qname: str, name: str, arity: int) -> str | None:
        for q in self._super_chain(type_qname):
            for decl, mid in self.method_index.get(q, ()):
                mname = "new" if decl.return_type is None else decl.name
                if mname == name and len(decl.params) == arity:
                    return mid
        return None

    def lookup_field(self, type_qname: str, name: str) -> str | None:
        for q in self._super_chain(type_qname):
            fid = self.field_index.get(q, {}).get(name)
            if fid is not None:
                return fid
        return None

    # --- phase C: body extraction ------------------------------------------------

    def extract_bodies(self) -> None:
        for qname in sorted(self.types):
            info = self.types[qname]
            for decl, mid in self.method_index.get(qname, ()):
                if decl.body is not None:
                    _BodyWalker(self, info, decl, mid).run()

    def run(self) -> ExtractionResult:
        self.collect()
        self.declare()
        self.extract_bodies()
        return ExtractionResult(self.builder.seal(), self.warnings)


def _stmt_exprs(stmt: Stmt) -> list[Expr]:
    if isinstance(stmt, LocalDecl):
        return [stmt.init] if stmt.init is not None else []
    if isinstance(stmt, Assign):
        return [stmt.value]
    if isinstance(stmt, ExprStmt):
        return [stmt.expr]
    if isinstance(stmt, Return):
        return [stmt.value] if stmt.value is not None else []
    if isinstance(stmt, Throw):
        return [stmt.value]
    if isinstance(stmt, If):
        return [stmt.cond]
    if isinstance(stmt, While):
        return [stmt.cond]
    if isinstance(stmt, For):
        return [stmt.cond] if stmt.cond is not None else []
    return []


def _stmt_children(stmt: Stmt) -> list[Stmt]:
    if isinstance(stmt, If):
        return list(stmt.then) + list(stmt.orelse)
    if isinstance(stmt, While):
        return list(stmt.body)
    if isinstance(stmt, For):
        extra = [s for s in (stmt.init, stmt.update) if s is not None]
        return extra + list(stmt.body)
    if isinstance(stmt, Block):
        return list(stmt.body)
    return []


class _BodyWalker:
    """Extracts relation facts from one method body."""

    def __init__(self, ex: Extractor, info: _TypeInfo, decl: MethodDecl,
                 method_id: str):
        self.ex = ex
        self.info = info
        self.decl = decl
        self.mid = method_id
        self.file = info.file
        self.params: dict[str, str] = {}
        self.param_types: dict[str, str | None] = {}
        self.locals: dict[str, str] = {}
        self.local_types: dict[str, str | None] = {}
        method_qname = ex.method_qnames[method_id]

        for p in decl.params:
            self.params[p.name] = ex.param_entities[(method_id, p.name)]
            self.param_types[p.name] = ex.resolve_type(
                p.type_name, info.qname, info.package, self.file, quiet=True)

        # Hoist every local declaration (any block depth) to method scope;
        # duplicate names get an order-of-appearance suffix.
        assert decl.body is not None
        for local in self._collect_locals(decl.body):
            base = local.name
            key = base
            suffix = 1
            while key in self.locals:
                suffix += 1
                key = f"{base}${suffix}"
            loc = Location(self.file, local.line, local.line)
            lent = Entity.make("LocalVariable", base, f"{method_qname}.{key}",
                               declared_in=method_id, location=loc)
            ex.builder.add_entity(lent)
            ex.builder.add_fact("Declares", method_id, lent.id, loc)
            ltype = ex.resolve_type(local.type_name, info.qname, info.package,
                                    self.file)
            if ltype is not None:
                ex.builder.add_fact("VarType", lent.id, ex.type_ids[ltype], loc)
            if base not in self.locals:
                self.locals[base] = lent.id
                self.local_types[base] = ltype

    def _collect_locals(self, stmts: list[Stmt]) -> list[LocalDecl]:
        out: list[LocalDecl] = []
        for stmt in stmts:
            if isinstance(stmt, LocalDecl):
                out.append(stmt)
            for sub in _stmt_children(stmt):
                out.extend(self._collect_locals([sub]))
        return out

    def run(self) -> None:
        assert self.decl.body is not None
        for stmt in self.decl.body:
            self.stmt(stmt)

    # --- statements ---------------------------------------------------------

    def stmt(self, stmt: Stmt) -> None:
        if isinstance(stmt, LocalDecl):
            if stmt.init is not None:
                self.scan(stmt.init)
        elif isinstance(stmt, Assign):
            self.assign(stmt)
        elif isinstance(stmt, ExprStmt):
            self.scan(stmt.expr)
        elif isinstance(stmt, Return):
            if stmt.value is not None:
                self.scan(stmt.value)
        elif isinstance(stmt, Throw):
            self.throw(stmt)
        else:
            for expr in _stmt_exprs(stmt):
                self.scan(expr)
            for sub in _stmt_children(stmt):
                self.stmt(sub)

    def assign(self, stmt: Assign) -> None:
        loc = Location(self.file, stmt.line, stmt.line)
        if stmt.receiver is None:
            if stmt.name in self.locals or stmt.name in self.params:
                pass  # local/parameter assignment carries no field fact
            else:
                fid = self.ex.lookup_field(self.info.qname, stmt.name) or \
                    self._enclosing_field(stmt.name)
                if fid is not None:
                    self.ex.builder.add_fact("Set", self.mid, fid, loc)
                else:
                    self.ex.warn(self.file, stmt.line,
                                 f"cannot resolve assignment target {stmt.name!r}")
        else:
            rtype = self._receiver_type(stmt.receiver, stmt.line)
            if rtype is not None:
                fid = self.ex.lookup_field(rtype, stmt.name)
                if fid is not None:
                    self.ex.builder.add_fact("Set", self.mid, fid, loc)
                else:
                    self.ex.warn(self.file, stmt.line,
                                 f"no field {stmt.name!r} on {rtype}")
        self.scan(stmt.value)

    def throw(self, stmt: Throw) -> None:
        if isinstance(stmt.value, New):
            etype = self.ex.resolve_type(stmt.value.type_name, self.info.qname,
                                         self.info.package, self.file)
            if etype is not None:
                self.ex.builder.add_fact(
                    "Throws", self.mid, self.ex.type_ids[etype],
                    Location(self.file, stmt.line, stmt.line))
            self.scan(stmt.value)
        else:
            self.scan(stmt.value)

    # --- expressions ------------------------------------------------------------

    def scan(self, expr: Expr) -> None:
        if isinstance(expr, Literal):
            return
        if isinstance(expr, VarRead):
            self.read_value(expr.name, expr.line, warn_unresolved=True)
            return
        if isinstance(expr, FieldAccess):
            self.field_access(expr)
            return
        if isinstance(expr, Call):
            self.call(expr)
            return
        if isinstance(expr, New):
            self.creation(expr)
            return
        if isinstance(expr, Binary):
            self.scan(expr.left)
            self.scan(expr.right)
            return
        if isinstance(expr, Unary):
            self.scan(expr.operand)

    def read_value(self, name: str, line: int, warn_unresolved: bool) -> str | None:
        """Resolve a bare identifier read; fields contribute a Get fact.

        Returns the entity id of the parameter/local/field, if any.
        """
        if name == "this":
            return None
        if name in self.params:
            return self.params[name]
        if name in self.locals:
            return self.locals[name]
        fid = self.ex.lookup_field(self.info.qname, name) or \
            self._enclosing_field(name)
        if fid is not None:
            self.ex.builder.add_fact("Get", self.mid, fid,
                                     Location(self.file, line, line))
            return fid
        if warn_unresolved:
            self.ex.warn(self.file, line, f"cannot resolve name {name!r}")
        return None

    def field_access(self, expr: FieldAccess) -> None:
        rtype = self._receiver_type(expr.receiver, expr.line)
        if rtype is None:
            return
        fid = self.ex.lookup_field(rtype, expr.name)
        if fid is None:
            self.ex.warn(self.file, expr.line,
                         f"no field {expr.name!r} on {rtype}")
            return
        self.ex.builder.add_fact("Get", self.mid, fid,
                                 Location(self.file, expr.line, expr.line))

    def call(self, expr: Call) -> None:
        loc = Location(self.file, expr.line, expr.line)
        target = None
        receiver_known = True
        if expr.receiver is None:
            target = self._lookup_outward(expr.name, len(expr.args))
        elif expr.receiver == "this":
            target = self.ex.lookup_method(self.info.qname, expr.name,
                                           len(expr.args))
        else:
            rtype = self._receiver_type(expr.receiver, expr.line)
            if rtype is None:
                receiver_known = False  # receiver warning already recorded
            else:
                target = self.ex.lookup_method(rtype, expr.name, len(expr.args))
        if target is not None:
            self.ex.builder.add_fact("Invokes", self.mid, target, loc)
        elif receiver_known:
            self.ex.warn(self.file, expr.line,
                         f"cannot resolve call {expr.name!r}/{len(expr.args)}")
        self.arguments(expr.args, loc)

    def creation(self, expr: New) -> None:
        loc = Location(self.file, expr.line, expr.line)
        if expr.body is not None:
            anon = self._anon_qname(expr)
            if anon is not None:
                self.ex.builder.add_fact("Creates", self.mid,
                                         self.ex.type_ids[anon], loc)
        else:
            ctype = self.ex.resolve_type(expr.type_name, self.info.qname,
                                         self.info.package, self.file)
            if ctype is not None:
                self.ex.builder.add_fact("Creates", self.mid,
                                         self.ex.type_ids[ctype], loc)
        self.arguments(expr.args, loc)

    def arguments(self, args: list[Expr], loc: Location) -> None:
        for arg in args:
            if isinstance(arg, VarRead) and arg.name != "this":
                passed = self.read_value(arg.name, arg.line, warn_unresolved=True)
                if passed is not None:
                    self.ex.builder.add_fact("ArgPass", self.mid, passed, loc)
            elif isinstance(arg, FieldAccess):
                rtype = self._receiver_type(arg.receiver, arg.line)
                if rtype is None:
                    continue
                fid = self.ex.lookup_field(rtype, arg.name)
                if fid is None:
                    self.ex.warn(self.file, arg.line,
                                 f"no field {arg.name!r} on {rtype}")
                    continue
                site = Location(self.file, arg.line, arg.line)
                self.ex.builder.add_fact("Get", self.mid, fid, site)
                self.ex.builder.add_fact("ArgPass", self.mid, fid, loc)
            else:
                self.scan(arg)

    # --- resolution helpers ----------------------------------------------------

    def _receiver_type(self, receiver: str | None, line: int) -> str | None:
        """Static type of a call/access receiver, as a type qname."""
        if receiver is None or receiver == "this":
            return self.info.qname
        if "." not in receiver:
            if receiver in self.params:
                t = self.param_types.get(receiver)
                if t is not None:
                    return t
            elif receiver in self.locals:
                t = self.local_types.get(receiver)
                if t is not None:
                    return t
            else:
                fid = self.ex.lookup_field(self.info.qname, receiver) or \
                    self._enclosing_field(receiver)
                if fid is not None:
                    ftype = self.ex.field_types.get(fid)
                    if ftype is not None:
                        return ftype
                    self.ex.warn(self.file, line,
                                 f"receiver {receiver!r} has unresolved type")
                    return None
        resolved = self.ex.resolve_type(Name(receiver, line), self.info.qname,
                                        self.info.package, self.file, quiet=True)
        if resolved is not None:
            return resolved
        self.ex.warn(self.file, line, f"cannot resolve receiver {receiver!r}")
        return None

    def _enclosing_field(self, name: str) -> str | None:
        cur = self.info.enclosing
        while cur is not None:
            fid = self.ex.lookup_field(cur, name)
            if fid is not None:
                return fid
            cur = self.ex.types[cur].enclosing if cur in self.ex.types else None
        return None

    def _lookup_outward(self, name: str, arity: int) -> str | None:
        cur: str | None = self.info.qname
        while cur is not None:
            found = self.ex.lookup_method(cur, name, arity)
            if found is not None:
                return found
            cur = self.ex.types[cur].enclosing if cur in self.ex.types else None
        return None

    def _anon_qname(self, expr: New) -> str | None:
        for qname, info in self.ex.types.items():
            if info.anon_base is expr.type_name:
                return qname
        return None


def extract(units: list[SourceUnit], project_name: str = "Proj") -> ExtractionResult:
    """Build and seal a fact store from parsed source units."""
    return Extractor(units, project_name).run()
