"""CLI: end-to-end flows, exit codes, machine output."""

from __future__ import annotations

import io
import json
from pathlib import Path

import pytest

from soquet.cli import main

from conftest import FIXTURES_DIR, PATTERNS_DIR


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


@pytest.fixture()
def workspace(tmp_path):
    """Extracted observer facts plus an empty model file."""
    facts = tmp_path / "facts.jsonl"
    model = tmp_path / "model.json"
    code, _ = run(["extract", "--source", str(PATTERNS_DIR),
                   "--out", str(facts)])
    assert code == 0
    code, _ = run(["model", "new", "Concerns", "--model", str(model),
                   "--facts", str(facts)])
    assert code == 0
    return tmp_path, facts, model


def test_extract_reports_counts(tmp_path):
    facts = tmp_path / "facts.jsonl"
    code, out = run(["extract", "--source", str(FIXTURES_DIR),
                     "--out", str(facts), "--json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["entities"] > 0 and doc["facts"] > 0
    assert facts.exists()


def test_extract_counts_equal_checked_in_ledger(tmp_path):
    ledger = json.loads(
        (Path(__file__).resolve().parent.parent / "corpus" / "ledgers" /
         "fact_counts.json").read_text())
    facts = tmp_path / "facts.jsonl"
    code, out = run(["extract", "--source", str(PATTERNS_DIR),
                     "--out", str(facts), "--json"])
    assert code == 0
    doc = json.loads(out)
    entries = [v for k, v in ledger.items() if not k.startswith("_")]
    # the combined store shares one project root across all programs
    expected_entities = sum(e["entities"] for e in entries) - (len(entries) - 1)
    expected_facts = sum(sum(e["facts"].values()) for e in entries)
    assert doc["entities"] == expected_entities
    assert doc["facts"] == expected_facts
    assert doc["warnings"] == []


def test_extract_empty_dir(tmp_path):
    src = tmp_path / "empty"
    src.mkdir()
    facts = tmp_path / "facts.jsonl"
    code, out = run(["extract", "--source", str(src), "--out", str(facts),
                     "--json"])
    assert code == 0
    assert json.loads(out)["facts"] == 0


def test_extract_malformed_file_exits_nonzero(tmp_path, capsys):
    src = tmp_path / "src"
    src.mkdir()
    (src / "bad.oosl").write_text("package p;\nclass A { void m( }\n")
    code, _ = run(["extract", "--source", str(src),
                   "--out", str(tmp_path / "f.jsonl")])
    assert code == 1
    err = capsys.readouterr().err
    assert "bad.oosl:2" in err


def test_query_command(workspace):
    _, facts, _ = workspace
    code, out = run([
        "query", "--facts", str(facts), "--json", "--text",
        "sourceof(relationship implements(type *, "
        "interface FigureChangeListener));"])
    assert code == 0
    doc = json.loads(out)
    assert doc["entities"] == ["class:observer.CompositeFigure",
                               "class:observer.DrawingView"]


def test_query_unbound_variable_is_user_error(workspace, capsys):
    _, facts, _ = workspace
    code, _ = run(["query", "--facts", str(facts), "--text", "<nope>;"])
    assert code == 1


def test_query_missing_facts_file(tmp_path):
    code, _ = run(["query", "--facts", str(tmp_path / "none.jsonl"),
                   "--text", "invokes(method *, method *);"])
    assert code == 1


def test_sort_command_attaches_to_model(workspace):
    _, facts, model = workspace
    code, out = run([
        "sort", "rl", "--facts", str(facts),
        "--type", "deco.DecoratorFigure", "--field", "fComponent",
        "--model", str(model), "--name", "decorator forwards"])
    assert code == 0
    assert "3 tuples" in out
    doc = json.loads(model.read_text())
    leaf = doc["root"]["children"][0]
    assert leaf["name"] == "decorator forwards"
    assert leaf["instance"]["sort_kind"] == "RL"
    assert len(leaf["instance"]["result"]) == 3


def test_sort_missing_param_is_usage_error(workspace, capsys):
    _, facts, _ = workspace
    code, _ = run(["sort", "cb", "--facts", str(facts)])
    assert code == 1
    assert "--context" in capsys.readouterr().err


def test_sort_de_prints_obligations(tmp_path):
    facts = tmp_path / "facts.jsonl"
    run(["extract", "--source", str(FIXTURES_DIR), "--out", str(facts)])
    code, out = run(["sort", "de", "--facts", str(facts),
                     "--context", "implementors(storable.Storable)",
                     "--member", "new()"])
    assert code == 0
    assert "obligations" in out
    assert "storable.PolygonFigure" in out


def test_pattern_command_builds_composite(workspace):
    _, facts, model = workspace
    bindings = Path(__file__).resolve().parent.parent / \
        "corpus" / "bindings" / "observer.json"
    code, out = run(["pattern", "observer", "--facts", str(facts),
                     "--bindings", str(bindings), "--model", str(model),
                     "--composite", "FigureChanged"])
    assert code == 0
    doc = json.loads(model.read_text())
    composite = doc["root"]["children"][0]
    assert composite["name"] == "FigureChanged"
    assert len(composite["children"]) == 5


def test_pattern_unknown_name(workspace, capsys):
    tmp, facts, model = workspace
    bindings = tmp / "b.json"
    bindings.write_text('{"pattern": "nonesuch", "bindings": {}}')
    code, _ = run(["pattern", "nonesuch", "--facts", str(facts),
                   "--bindings", str(bindings)])
    assert code == 1


def test_model_subcommands_roundtrip(workspace):
    _, facts, model = workspace
    assert run(["model", "add", "group", "--model", str(model)])[0] == 0
    code, out = run([
        "sort", "cb", "--facts", str(facts), "--context", "observer.Figure+",
        "--target", "changed()", "--model", str(model),
        "--parent", "group", "--name", "notify"])
    assert code == 0
    code, out = run(["model", "touching",
                     "method:observer.AbstractFigure.changed#changed()",
                     "--model", str(model), "--json"])
    assert code == 0
    assert json.loads(out) == ["group/notify"]
    code, out = run(["model", "refresh", "--model", str(model),
                     "--facts", str(facts)])
    assert code == 0
    assert "no changes" in out
    code, out = run(["model", "show", "--model", str(model)])
    assert code == 0
    assert "notify" in out
    assert run(["model", "move", "group/notify", "", "--model",
                str(model)])[0] == 0
    assert run(["model", "remove", "group", "--model", str(model)])[0] == 0


def test_model_vi_definition(workspace):
    _, facts, model = workspace
    code, out = run(["model", "vi", "--model", str(model),
                     "--facts", str(facts), "--host", "prototype.Figure",
                     "--member", "clone()", "--role", "PrototypeRole"])
    assert code == 0
    doc = json.loads(model.read_text())
    assert doc["virtual_interfaces"][0]["role_name"] == "PrototypeRole"
    # the virtual role is usable from the sort command
    code, out = run(["sort", "rsi", "--facts", str(facts),
                     "--virtual", "PrototypeRole",
                     "--context", "prototype.Figure+",
                     "--model", str(model), "--name", "clone role", "--json"])
    assert code == 0


def test_report_text_and_structured(workspace):
    _, facts, model = workspace
    bindings = Path(__file__).resolve().parent.parent / \
        "corpus" / "bindings" / "observer.json"
    run(["pattern", "observer", "--facts", str(facts),
         "--bindings", str(bindings), "--model", str(model),
         "--composite", "FigureChanged"])
    code, out = run(["report", "--model", str(model)])
    assert code == 0
    for name in ("RSI Observer role", "RSI Subject role", "CB notify",
                 "CB attach", "CB detach"):
        assert name in out
    assert "invokes(<selcallers>, * changed())" in out
    code, out = run(["report", "--model", str(model), "--format",
                     "structured"])
    assert code == 0
    assert json.loads(out)["schema"] == "soquet-model/1"


def test_empty_model_report_is_header_only(workspace):
    _, _, model = workspace
    code, out = run(["report", "--model", str(model)])
    assert code == 0
    assert out.startswith("# Concern model")
    assert "tuples" not in out


def test_internal_error_exit_code(monkeypatch, workspace):
    _, facts, _ = workspace
    import soquet.cli as cli_mod

    def boom(args, out):
        raise RuntimeError("synthetic")

    monkeypatch.setitem(cli_mod._COMMANDS, "query", boom)
    code, _ = run(["query", "--facts", str(facts), "--text", "x;"])
    assert code == 2
