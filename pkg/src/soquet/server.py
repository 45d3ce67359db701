"""Read-only HTTP endpoint over a sealed store and a loaded concern model.

Serves an immutable snapshot; the only mutation is per-leaf refresh, which
re-evaluates one instance (optionally with edited parameters) and returns
the tuple diff.  Diffs stay in the session unless a write path is given.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlparse

from .errors import SoquetError
from .facts import FactStore, parse_entity_id
from .model import ConcernModel, ConcernNode, dumps_model, model_to_json


def _entity_json(store: FactStore, eid: str) -> dict:
    ent = store.entity(eid)
    if ent is None:
        kind, qname, sig = parse_entity_id(eid)
        return {"id": eid, "kind": kind, "qname": qname, "sig": sig,
                "in_store": False}
    return {"id": eid, "kind": ent.kind, "name": ent.simple_name,
            "qname": ent.qualified_name, "sig": ent.signature,
            "declared_in": ent.declared_in, "mods": sorted(ent.modifiers),
            "loc": ent.location.to_json(), "in_store": True}


def _tuple_json(store: FactStore, t) -> dict:
    return {
        "src": _entity_json(store, t.source),
        "tgt": _entity_json(store, t.target),
        "kind": t.kind,
        "sites": [[s.file, s.start, s.end] for s in t.sites],
    }


def _instance_doc(store: FactStore, leaf: ConcernNode) -> dict:
    inst = leaf.instance
    assert inst is not None
    return {
        "id": leaf.path(),
        "name": leaf.name,
        "sort_kind": inst.kind.value,
        "params": [list(p) for p in inst.params],
        "query_text": inst.query_text,
        "store_hash": inst.store_hash,
        "stale": leaf.stale,
        "broken": leaf.broken,
        "result": [_tuple_json(store, t) for t in inst.result.tuples],
        "obligations": [_entity_json(store, e) for e in inst.obligations],
        "notes": list(inst.notes),
    }


def _annotated_node(node: ConcernNode) -> dict:
    if node.kind == "leaf":
        inst = node.instance
        return {"id": node.path(), "name": node.name, "kind": "leaf",
                "sort_kind": inst.kind.value if inst else None,
                "tuples": len(inst.result.tuples) if inst else 0,
                "query_text": inst.query_text if inst else "",
                "stale": node.stale, "broken": node.broken}
    return {"id": node.path(), "name": node.name, "kind": "composite",
            "children": [_annotated_node(c) for c in node.children]}


class _Api:
    def __init__(self, store: FactStore, model: ConcernModel,
                 source_root: str | None, write_path: str | None):
        self.store = store
        self.model = model
        self.source_root = Path(source_root).resolve() if source_root else None
        self.write_path = write_path
        self.refresh_lock = threading.Lock()

    def model_doc(self) -> dict:
        doc = model_to_json(self.model)
        doc["root"] = _annotated_node(self.model.root)
        doc["current_store_hash"] = self.store.hash
        return doc

    def instance_doc(self, path: str) -> dict | None:
        node = self.model.find(path)
        if node is None or node.kind != "leaf":
            return None
        return _instance_doc(self.store, node)

    def entity_doc(self, eid: str) -> dict | None:
        ent = self.store.entity(eid)
        if ent is None:
            return None
        out, inc = self.store.incident_facts(eid)
        return {
            "entity": _entity_json(self.store, eid),
            "outgoing": [{"kind": f.kind, "tgt": _entity_json(self.store, f.target),
                          "site": f.site.to_json()} for f in out],
            "incoming": [{"kind": f.kind, "src": _entity_json(self.store, f.source),
                          "site": f.site.to_json()} for f in inc],
        }

    def source_doc(self, file: str, start: int, end: int) -> dict | None:
        if self.source_root is None:
            return None
        target = (self.source_root / file).resolve()
        if not str(target).startswith(str(self.source_root)) or not target.exists():
            return None
        lines = target.read_text().splitlines()
        start = max(1, start)
        end = min(len(lines), end if end >= start else start)
        return {"file": file, "from": start, "to": end,
                "lines": lines[start - 1:end]}

    def touching_doc(self, entity: str) -> dict:
        ids = [entity]
        if ":" not in entity:
            ids = list(self.store.ids_by_qname(entity))
        leaves = []
        for eid in ids:
            for leaf in self.model.touching(eid):
                leaves.append({"id": leaf.path(), "name": leaf.name})
        return {"entity": entity, "leaves": leaves}

    def refresh_instance(self, path: str, params: dict | None) -> dict | None:
        node = self.model.find(path)
        if node is None or node.kind != "leaf":
            return None
        with self.refresh_lock:
            diff = self.model.refresh_leaf(node, self.store, params)
            if self.write_path and not diff.get("error"):
                Path(self.write_path).write_text(dumps_model(self.model))
        return {
            "id": path,
            "added": [_tuple_json(self.store, t) for t in diff["added"]],
            "removed": [_tuple_json(self.store, t) for t in diff["removed"]],
            "error": diff["error"],
        }


def _make_handler(api: _Api, ui_dir: str | None):
    ui_root = Path(ui_dir).resolve() if ui_dir else None

    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):  # keep test output quiet
            pass

        def _send(self, code: int, payload, content_type="application/json"):
            body = payload if isinstance(payload, bytes) else \
                json.dumps(payload).encode("utf-8")
            self.send_response(code)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Access-Control-Allow-Methods",
                             "GET, POST, OPTIONS")
            self.end_headers()
            self.wfile.write(body)

        def _not_found(self, what: str):
            self._send(404, {"error": f"{what} not found"})

        def do_OPTIONS(self):
            self._send(204, b"")

        def do_GET(self):
            url = urlparse(self.path)
            segments = [unquote(s) for s in url.path.split("/") if s]
            query = parse_qs(url.query)
            if segments[:2] == ["api", "model"]:
                self._send(200, api.model_doc())
                return
            if segments[:2] == ["api", "instance"] and len(segments) >= 3:
                doc = api.instance_doc("/".join(segments[2:]))
                if doc is None:
                    self._not_found("instance")
                else:
                    self._send(200, doc)
                return
            if segments[:2] == ["api", "entity"] and len(segments) >= 3:
                doc = api.entity_doc("/".join(segments[2:]))
                if doc is None:
                    self._not_found("entity")
                else:
                    self._send(200, doc)
                return
            if segments[:2] == ["api", "source"]:
                try:
                    file = query["file"][0]
                    start = int(query.get("from", ["1"])[0])
                    end = int(query.get("to", [str(start)])[0])
                except (KeyError, ValueError):
                    self._send(400, {"error": "file, from, to required"})
                    return
                doc = api.source_doc(file, start, end)
                if doc is None:
                    self._not_found("source file")
                else:
                    self._send(200, doc)
                return
            if segments[:2] == ["api", "touching"]:
                entity = query.get("entity", [""])[0]
                if not entity:
                    self._send(400, {"error": "entity parameter required"})
                    return
                self._send(200, api.touching_doc(unquote(entity)))
                return
            if ui_root is not None:
                self._serve_static(segments)
                return
            self._not_found("resource")

        def _serve_static(self, segments):
            rel = "/".join(segments) or "index.html"
            target = (ui_root / rel).resolve()
            if not str(target).startswith(str(ui_root)) or not target.is_file():
                self._not_found("resource")
                return
            ctype = {
                ".html": "text/html", ".js": "text/javascript",
                ".css": "text/css", ".json": "application/json",
            }.get(target.suffix, "application/octet-stream")
            self._send(200, target.read_bytes(), ctype)

        def do_POST(self):
            url = urlparse(self.path)
            segments = [unquote(s) for s in url.path.split("/") if s]
            if len(segments) >= 4 and segments[:2] == ["api", "instance"] \
                    and segments[-1] == "refresh":
                length = int(self.headers.get("Content-Length") or 0)
                params = None
                if length:
                    try:
                        body = json.loads(self.rfile.read(length) or b"{}")
                        params = body.get("params")
                    except json.JSONDecodeError:
                        self._send(400, {"error": "bad JSON body"})
                        return
                try:
                    doc = api.refresh_instance("/".join(segments[2:-1]), params)
                except SoquetError as exc:
                    self._send(400, {"error": str(exc)})
                    return
                if doc is None:
                    self._not_found("instance")
                else:
                    self._send(200, doc)
                return
            self._not_found("resource")

    return Handler


def make_server(store: FactStore, model: ConcernModel, port: int = 0,
                source_root: str | None = None, ui_dir: str | None = None,
                write_path: str | None = None) -> ThreadingHTTPServer:
    api = _Api(store, model, source_root, write_path)
    return ThreadingHTTPServer(("127.0.0.1", port), _make_handler(api, ui_dir))


def serve(store: FactStore, model: ConcernModel, port: int,
          source_root: str | None, ui_dir: str | None,
          write_path: str | None, out) -> int:
    httpd = make_server(store, model, port, source_root, ui_dir, write_path)
    host, actual_port = httpd.server_address[:2]
    print(f"serving on http://{host}:{actual_port}/ (ctrl-c to stop)",
          file=out, flush=True)
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
    return 0
