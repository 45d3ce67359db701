"""Command-line surface: extraction, queries, sorts, models, reports, serving.

Exit codes: 0 success, 1 user error (bad input, unresolved names, missing
files), 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import MissingBinding, SoquetError, UserError
from .facts import FactStore, import_facts, parse_entity_id
from .model import (
    ConcernModel, LoadReport, create_model, dumps_model, load_model,
    model_to_json,
)
from .oosl import extract, parse_files
from .query import ResultSet, evaluate
from .sorts import SortKind, build_sort, compose_pattern
from .virtuals import define_virtual_interface


def _read_store(path: str) -> FactStore:
    p = Path(path)
    if not p.exists():
        raise UserError(f"facts file not found: {path}")
    return import_facts(p.read_text())


def _read_model(path: str, store: FactStore | None = None) -> LoadReport:
    p = Path(path)
    if not p.exists():
        raise UserError(f"model file not found: {path}")
    return load_model(p.read_text(), store)


def _write_model(model: ConcernModel, path: str) -> None:
    Path(path).write_text(dumps_model(model))


def _warn_stale(model: ConcernModel, store: FactStore, out) -> None:
    if model.store_hash and model.store_hash != store.hash:
        print("warning: model was computed against a different fact store "
              "(stale results possible); run `soquet model refresh`", file=out)


def _display(eid: str) -> str:
    kind, qname, sig = parse_entity_id(eid)
    return f"{qname}#{sig}" if sig else qname


def _print_tuples(tuples, out) -> None:
    for t in tuples:
        sites = ", ".join(f"{s.file}:{s.start}" for s in t.sites)
        suffix = f"  [{sites}]" if sites else ""
        print(f"  {_display(t.source)} -> {_display(t.target)} "
              f"({t.kind}){suffix}", file=out)


def _result_json(result: ResultSet) -> dict:
    if result.arity == "entities":
        return {"arity": "entities", "entities": list(result.entities)}
    return {"arity": "tuples", "tuples": [
        {"src": t.source, "tgt": t.target, "kind": t.kind,
         "sites": [[s.file, s.start, s.end] for s in t.sites]}
        for t in result.tuples]}


# --- commands ----------------------------------------------------------------

def cmd_extract(args, out) -> int:
    root = Path(args.source)
    if not root.exists():
        raise UserError(f"source root not found: {args.source}")
    # record paths relative to the root so stores hash identically across
    # checkouts and snippet lookups resolve against --source-root
    files = sorted(root.rglob("*.oosl"),
                   key=lambda p: p.relative_to(root).as_posix())
    units, diagnostics = parse_files(
        [(p.relative_to(root).as_posix(), p.read_text()) for p in files])
    if diagnostics:
        for d in diagnostics:
            print(str(d), file=sys.stderr)
        raise UserError(f"{len(diagnostics)} file(s) failed to parse")
    result = extract(units, project_name=args.project)
    store = result.store
    Path(args.out).write_text(store.export_str())
    if args.json:
        print(json.dumps({
            "entities": len(store.entities), "facts": len(store.facts),
            "hash": store.hash,
            "warnings": [w.render() for w in result.warnings]}), file=out)
    else:
        print(f"extracted {len(store.entities)} entities, "
              f"{len(store.facts)} facts from {len(files)} file(s)", file=out)
        print(f"store hash: {store.hash}", file=out)
        if result.warnings:
            print(f"{len(result.warnings)} resolution warning(s):", file=out)
            for w in result.warnings:
                print(f"  {w.render()}", file=out)
    return 0


def cmd_query(args, out) -> int:
    store = _read_store(args.facts)
    if args.file:
        text = Path(args.file).read_text()
    else:
        text = args.text
    result = evaluate(store, text)
    if args.json:
        print(json.dumps(_result_json(result)), file=out)
        return 0
    if result.arity == "entities":
        print(f"{len(result.entities)} entities:", file=out)
        for eid in result.entities:
            print(f"  {_display(eid)}", file=out)
    else:
        print(f"{len(result.tuples)} tuples:", file=out)
        _print_tuples(result.tuples, out)
    return 0


_SORT_PARAM_FLAGS = {
    SortKind.CB: (("context", "context"), ("target", "target")),
    SortKind.CE: (("context", "context"), ("target", "target")),
    SortKind.ER: (("type", "type"), ("reference", None)),
    SortKind.RL: (("type", "type"), ("reference", None)),
    SortKind.AV: (("type", "type"),),
    SortKind.EC: (("caller", "caller"), ("arg_name", "arg_name"),
                  ("arg_type", "arg_type"), ("transitive", None)),
    SortKind.RSI: (("role", None), ("context", "context")),
    SortKind.SC: (("context", "context"), ("role", "role")),
    SortKind.PE: (("source", "source_context"), ("target", "target_context"),
                  ("polarity", "polarity")),
    SortKind.EP: (("seed", "seed"), ("exception", "exception"),
                  ("context", "context"), ("transitive", None)),
    SortKind.DE: (("context", "context"), ("member", "member")),
    SortKind.DBE: (("type", "type"), ("field", "field"), ("context", None)),
}


def _sort_params(kind: SortKind, args) -> dict[str, str]:
    params: dict[str, str] = {}
    for pname, argname in _SORT_PARAM_FLAGS[kind]:
        if pname == "reference":
            if args.field:
                params["reference"] = f"field {args.field}"
            elif args.accessor:
                params["reference"] = f"accessor {args.accessor}"
            else:
                raise MissingBinding("--field or --accessor")
            continue
        if pname == "transitive":
            params["transitive"] = "true" if args.transitive else "false"
            continue
        if pname == "role":
            if args.virtual:
                params["role"] = f"virtual {args.virtual}"
            elif args.role:
                params["role"] = args.role
            else:
                raise MissingBinding("--role or --virtual")
            continue
        if kind == SortKind.DBE and pname == "context":
            if args.context:
                params["context"] = args.context
            continue
        value = getattr(args, argname)
        if value is None:
            raise MissingBinding(f"--{argname.replace('_', '-')}")
        params[pname] = value
    return params


def cmd_sort(args, out) -> int:
    store = _read_store(args.facts)
    kind = SortKind(args.kind.upper())
    params = _sort_params(kind, args)
    model_report = None
    virtuals = None
    if args.model:
        model_report = _read_model(args.model, store)
        _warn_stale(model_report.model, store, sys.stderr)
        virtuals = model_report.model.virtual_interfaces
    instance = build_sort(store, kind, params, name=args.name, virtuals=virtuals)
    if args.json:
        doc = {"kind": instance.kind.value, "name": instance.name,
               "params": [list(p) for p in instance.params],
               "query_text": instance.query_text,
               "result": _result_json(instance.result),
               "obligations": list(instance.obligations),
               "notes": list(instance.notes)}
        print(json.dumps(doc), file=out)
    else:
        print(f"{instance.kind.value} instance "
              f"({len(instance.result.tuples)} tuples)", file=out)
        print(instance.query_text, file=out)
        _print_tuples(instance.result.tuples, out)
        if instance.obligations:
            print("obligations (context elements violating the rule):", file=out)
            for eid in instance.obligations:
                print(f"  {_display(eid)}", file=out)
        for note in instance.notes:
            print(f"note: {note}", file=out)
    if args.model:
        assert model_report is not None
        model = model_report.model
        parent = model.find(args.parent or "")
        if parent is None:
            raise UserError(f"no such model node: {args.parent}")
        model.add_instance(parent, instance, args.name)
        _write_model(model, args.model)
        print(f"attached to model under "
              f"{args.parent or 'the root'}", file=out)
    return 0


def cmd_pattern(args, out) -> int:
    store = _read_store(args.facts)
    bindings_doc = json.loads(Path(args.bindings).read_text())
    if isinstance(bindings_doc, dict) and "bindings" in bindings_doc:
        pattern_name = bindings_doc.get("pattern", args.name)
        bindings = bindings_doc["bindings"]
    else:
        pattern_name = args.name
        bindings = bindings_doc
    model_report = _read_model(args.model, store) if args.model else None
    virtuals = model_report.model.virtual_interfaces if model_report else None
    instances = compose_pattern(store, pattern_name or args.name, bindings,
                                virtuals=virtuals)
    if args.json:
        print(json.dumps([
            {"kind": i.kind.value, "name": i.name,
             "tuples": len(i.result.tuples),
             "obligations": list(i.obligations)} for i in instances]), file=out)
    else:
        print(f"{args.name}: {len(instances)} sort instances", file=out)
        for inst in instances:
            print(f"  {inst.name}: {len(inst.result.tuples)} tuples"
                  + (f", {len(inst.obligations)} obligations"
                     if inst.obligations else ""), file=out)
    if args.model:
        assert model_report is not None
        model = model_report.model
        parent = model.find(args.parent or "")
        if parent is None:
            raise UserError(f"no such model node: {args.parent}")
        composite = model.add_composite(parent, args.composite or args.name)
        for inst in instances:
            model.add_instance(composite, inst)
        _write_model(model, args.model)
        print(f"composite {composite.name!r} attached with "
              f"{len(instances)} leaves", file=out)
    return 0


def cmd_model(args, out) -> int:
    sub = args.model_cmd
    if sub == "new":
        store_hash = ""
        if args.facts:
            store_hash = _read_store(args.facts).hash
        model = create_model(args.name, store_hash)
        _write_model(model, args.model)
        print(f"created model {args.name!r}", file=out)
        return 0

    store = _read_store(args.facts) if args.facts else None
    report = _read_model(args.model, store)
    model = report.model
    if store is not None and sub not in ("refresh", "vi"):
        _warn_stale(model, store, sys.stderr)

    if sub == "add":
        parent = model.find(args.parent or "")
        if parent is None:
            raise UserError(f"no such model node: {args.parent}")
        model.add_composite(parent, args.name)
        _write_model(model, args.model)
        print(f"added composite {args.name!r}", file=out)
    elif sub == "remove":
        node = model.find(args.path)
        if node is None:
            raise UserError(f"no such model node: {args.path}")
        model.remove(node)
        _write_model(model, args.model)
        print(f"removed {args.path!r}", file=out)
    elif sub == "move":
        node = model.find(args.path)
        parent = model.find(args.new_parent or "")
        if node is None or parent is None:
            raise UserError("no such model node")
        model.move(node, parent)
        _write_model(model, args.model)
        print(f"moved {args.path!r} under {args.new_parent or 'the root'}",
              file=out)
    elif sub == "vi":
        if store is None:
            raise UserError("--facts is required to define a virtual interface")
        ids = store.ids_by_qname(args.host)
        type_ids = [i for i in ids
                    if store.entity(i).kind in ("Class", "Interface")]
        if not type_ids:
            raise UserError(f"host type {args.host!r} not found in store")
        vi = define_virtual_interface(store, type_ids[0], args.member, args.role)
        model.add_virtual_interface(vi)
        _write_model(model, args.model)
        print(f"defined virtual interface {args.role!r} on {args.host} "
              f"({len(args.member)} member signatures)", file=out)
    elif sub == "refresh":
        if store is None:
            raise UserError("--facts is required to refresh")
        diff = model.refresh(store)
        _write_model(model, args.model)
        if args.json:
            print(json.dumps({
                path: {"added": len(d["added"]), "removed": len(d["removed"]),
                       "error": d["error"]}
                for path, d in diff.items()}), file=out)
        elif not diff:
            print("no changes", file=out)
        else:
            for path, d in sorted(diff.items()):
                if d["error"]:
                    print(f"{path}: broken ({d['error']})", file=out)
                else:
                    print(f"{path}: +{len(d['added'])} -{len(d['removed'])}",
                          file=out)
    elif sub == "touching":
        ids = [args.entity]
        if ":" not in args.entity and store is not None:
            ids = list(store.ids_by_qname(args.entity))
        leaves = []
        for eid in ids:
            leaves.extend(model.touching(eid))
        if args.json:
            print(json.dumps([leaf.path() for leaf in leaves]), file=out)
        elif not leaves:
            print("no concern leaves touch this entity", file=out)
        else:
            for leaf in leaves:
                print(leaf.path(), file=out)
    elif sub == "show":
        if args.json:
            print(json.dumps(model_to_json(model)), file=out)
        else:
            _render_tree(model.root, out, 0)
    return 0


def _render_tree(node, out, depth: int) -> None:
    pad = "  " * depth
    if node.kind == "leaf":
        inst = node.instance
        flags = ""
        if node.stale:
            flags += " [stale]"
        if node.broken:
            flags += f" [broken: {node.broken}]"
        print(f"{pad}{node.name} ({inst.kind.value}, "
              f"{len(inst.result.tuples)} tuples){flags}", file=out)
    else:
        print(f"{pad}{node.name}/", file=out)
        for child in node.children:
            _render_tree(child, out, depth + 1)


def cmd_report(args, out) -> int:
    store = _read_store(args.facts) if args.facts else None
    report = _read_model(args.model, store)
    model = report.model
    if store is not None:
        _warn_stale(model, store, out)
    if args.format == "structured":
        print(json.dumps(model_to_json(model), indent=1), file=out)
        return 0
    print(f"# Concern model: {model.name}", file=out)
    print(f"computed against store {model.store_hash or '(unknown)'}", file=out)
    if model.virtual_interfaces:
        print("\n## Virtual interfaces", file=out)
        for vi in model.virtual_interfaces.values():
            print(f"- {vi.role_name} on {_display(vi.host_type)}: "
                  f"{', '.join(vi.member_signatures)}", file=out)
    for node in model.root.walk():
        if node is model.root:
            continue
        depth = node.path().count("/")
        if node.kind == "composite":
            print(f"\n{'#' * min(depth + 2, 6)} {node.path()}", file=out)
            continue
        inst = node.instance
        print(f"\n{'#' * min(depth + 2, 6)} {node.path()} "
              f"[{inst.kind.value}]", file=out)
        if node.stale:
            print("STALE: computed against an older fact store", file=out)
        if node.broken:
            print(f"BROKEN: {node.broken}", file=out)
        print("query:", file=out)
        for line in inst.query_text.splitlines():
            print(f"  {line}", file=out)
        if inst.result.tuples:
            print(f"tuples ({len(inst.result.tuples)}):", file=out)
            _print_tuples(inst.result.tuples, out)
        else:
            print("no tuples (documented absence)", file=out)
        if inst.obligations:
            print("obligation set:", file=out)
            for eid in inst.obligations:
                print(f"  {_display(eid)}", file=out)
    return 0


def cmd_serve(args, out) -> int:
    from .server import serve
    store = _read_store(args.facts)
    report = _read_model(args.model, store)
    _warn_stale(report.model, store, out)
    return serve(store, report.model, port=args.port,
                 source_root=args.source_root, ui_dir=args.ui_dir,
                 write_path=args.model if args.write else None, out=out)


# --- argument parsing ------------------------------------------------------------

def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soquet",
        description="Query object-oriented program facts for crosscutting-"
                    "concern instances and organize them into concern models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="parse OOSL sources and export facts")
    p.add_argument("--source", required=True, help=".oosl source root")
    p.add_argument("--out", required=True, help="facts output file")
    p.add_argument("--project", default="Proj", help="project entity name")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("query", help="run a query against a facts file")
    p.add_argument("--facts", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--text", help="inline query text")
    src.add_argument("--file", help="file holding the query text")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("sort", help="instantiate one of the twelve sorts")
    p.add_argument("kind", choices=[k.value.lower() for k in SortKind])
    p.add_argument("--facts", required=True)
    p.add_argument("--context")
    p.add_argument("--target")
    p.add_argument("--type")
    p.add_argument("--field")
    p.add_argument("--accessor")
    p.add_argument("--caller")
    p.add_argument("--arg-name", dest="arg_name")
    p.add_argument("--arg-type", dest="arg_type")
    p.add_argument("--transitive", action="store_true")
    p.add_argument("--role")
    p.add_argument("--virtual", help="use a model-defined virtual interface")
    p.add_argument("--source-context", dest="source_context")
    p.add_argument("--target-context", dest="target_context")
    p.add_argument("--polarity", choices=["forbid", "require"], default="forbid")
    p.add_argument("--seed")
    p.add_argument("--exception")
    p.add_argument("--member")
    p.add_argument("--name")
    p.add_argument("--model", help="attach the instance to this model file")
    p.add_argument("--parent", help="model path of the target composite")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("pattern", help="compose a design-pattern concern")
    p.add_argument("name", help="design pattern name (Table rows)")
    p.add_argument("--facts", required=True)
    p.add_argument("--bindings", required=True, help="bindings JSON file")
    p.add_argument("--model", help="attach the composite to this model file")
    p.add_argument("--parent")
    p.add_argument("--composite", help="name for the new composite node")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("model", help="concern model operations")
    msub = p.add_subparsers(dest="model_cmd", required=True)
    for name in ("new", "add", "remove", "move", "vi", "refresh",
                 "touching", "show"):
        mp = msub.add_parser(name)
        mp.add_argument("--model", required=True)
        mp.add_argument("--facts")
        mp.add_argument("--json", action="store_true")
        if name == "new":
            mp.add_argument("name")
        elif name == "add":
            mp.add_argument("name")
            mp.add_argument("--parent")
        elif name == "remove":
            mp.add_argument("path")
        elif name == "move":
            mp.add_argument("path")
            mp.add_argument("new_parent")
        elif name == "vi":
            mp.add_argument("--host", required=True)
            mp.add_argument("--member", action="append", required=True)
            mp.add_argument("--role", required=True)
        elif name == "touching":
            mp.add_argument("entity")

    p = sub.add_parser("report", help="render a model as a report")
    p.add_argument("--model", required=True)
    p.add_argument("--facts")
    p.add_argument("--format", choices=["text", "structured"], default="text")

    p = sub.add_parser("serve", help="serve the model over HTTP (read-only)")
    p.add_argument("--facts", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--port", type=int, default=8450)
    p.add_argument("--source-root", dest="source_root")
    p.add_argument("--ui-dir", dest="ui_dir")
    p.add_argument("--write", action="store_true",
                   help="persist refresh results back to the model file")
    return parser


_COMMANDS = {
    "extract": cmd_extract,
    "query": cmd_query,
    "sort": cmd_sort,
    "pattern": cmd_pattern,
    "model": cmd_model,
    "report": cmd_report,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args, out)
    except UserError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SoquetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
