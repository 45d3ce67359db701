"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
verdicts.
"""

from __future__ import annotations

import random
import time
from collections import Counter

import pytest

from soquet.facts import import_facts
from soquet.model import create_model, dumps_model, load_model
from soquet.oosl import extract, parse_files
from soquet.query import Evaluator, evaluate, parse_query
from soquet.sorts import (
    SortKind, cb_query, ce_query, compose_pattern, de_query, ec_query,
    ep_query, er_query, rl_query, rsi_query,
)
from soquet.virtuals import define_virtual_interface

from conftest import (PATTERN_NAMES, PATTERNS_DIR, bindings_for,
                      fixture_store, pattern_store)
from gen import chain_store, random_query_expr, random_store
from naive import naive_evaluate, result_as_naive


def _pass(msg: str) -> None:
    print(f"PASS: {msg}")


def corpus_model(name: str):
    store = pattern_store(name)
    model = create_model(name, store.hash)
    composite = model.add_composite(model.root, name)
    for inst in compose_pattern(store, name, bindings_for(name)):
        model.add_instance(composite, inst)
    return store, model


def test_table1_corpus_oracle(pattern_ledger):
    started = time.monotonic()
    assert len(PATTERN_NAMES) >= 15
    # named multisets from the acceptance statement
    expected_multisets = {
        "observer": Counter({SortKind.RSI: 2, SortKind.CB: 3}),
        "decorator": Counter({SortKind.RL: 1}),
        "singleton": Counter({SortKind.RSI: 1, SortKind.DE: 1, SortKind.CB: 1}),
    }
    for name in PATTERN_NAMES:
        store = pattern_store(name)
        instances = compose_pattern(store, name, bindings_for(name))
        expected = pattern_ledger[name]["instances"]
        got_multiset = Counter(i.kind for i in instances)
        want_multiset = Counter(SortKind(e["kind"]) for e in expected)
        assert got_multiset == want_multiset, name
        if name in expected_multisets:
            assert got_multiset == expected_multisets[name], name
        assert [i.name for i in instances] == [e["name"] for e in expected]
        for inst, entry in zip(instances, expected):
            got = sorted((t.source, t.target) for t in inst.result.tuples)
            want = sorted((a, b) for a, b in entry["tuples"])
            assert got == want, f"{name}/{entry['name']}"
            assert sorted(inst.obligations) == sorted(entry["obligations"]), \
                f"{name}/{entry['name']}"
    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"corpus suite took {elapsed:.1f}s"
    _pass(f"Table 1 corpus oracle ({len(PATTERN_NAMES)} patterns, "
          f"{elapsed:.2f}s)")


def test_query_fidelity_listener_classes():
    store = pattern_store("observer")
    result = evaluate(store, (
        "sourceof(relationship implements(type *, "
        "interface FigureChangeListener));"))
    assert result.arity == "entities"
    assert set(result.entities) == {
        "class:observer.CompositeFigure",
        "class:observer.DrawingView",
    }
    _pass("verbatim listener query returns exactly the implementing classes")


def test_oracle_equivalence_1000_cases():
    rng = random.Random(31337)
    checked = 0
    for case in range(1000):
        store = random_store(rng)
        expr = random_query_expr(rng, store, rng.randint(1, 4),
                                 rng.choice(["tuples", "entities"]))
        query = parse_query(expr.pretty() + ";")
        got = result_as_naive(Evaluator(store).eval_query(query))
        want = naive_evaluate(store, query)
        assert got == want, f"case {case}: {expr.pretty()}"
        checked += 1
    assert checked >= 1000
    _pass(f"oracle equivalence on {checked} random (store, query) pairs")


def test_closure_correctness():
    store = chain_store(10, monitor_param=True)
    ec = ec_query(store, "m1(..)", "monitor", "chainpkg.Monitor",
                  transitive=True)
    assert len(ec.result.tuples) == 45
    io_store = fixture_store("io.oosl")
    ep = ep_query(io_store, "read(..)", "io.IOException", "(project Proj)",
                  transitive=True)
    assert len(ep.result.tuples) == 4
    assert all(t.kind == "Throws" for t in ep.result.tuples)
    _pass("EC 10-deep chain = 45 pairs; EP 4-level rethrow = 4 Throws tuples")


def test_rl_negative_fidelity():
    store = pattern_store("state")
    rl = rl_query(store, "state.StandardDrawingView", "accessor tool")
    er = er_query(store, "state.StandardDrawingView", "accessor tool")
    assert rl.result.tuples == ()
    assert er.result.tuples != ()
    _pass("renamed mouse forwarding: RL empty while ER is nonempty")


def test_cbce_isomorphism_and_rl_subset_er_everywhere():
    from soquet.errors import ReferenceUnresolved, TargetUnresolved
    checked_cbce = 0
    checked_rler = 0
    for name in PATTERN_NAMES:
        store = pattern_store(name)
        for method in store.entities_of_kind("Method"):
            target = method.simple_name + "(..)"
            try:
                cb = cb_query(store, "(project Proj)", target)
                ce = ce_query(store, "(project Proj)", target)
            except TargetUnresolved:
                continue
            assert {(t.source, t.target) for t in cb.result.tuples} == \
                {(t.source, t.target) for t in ce.result.tuples}, name
            checked_cbce += 1
        for fld in store.entities_of_kind("Field"):
            owner = store.entity(fld.declared_in)
            try:
                rl = rl_query(store, owner.qualified_name,
                              f"field {fld.simple_name}")
                er = er_query(store, owner.qualified_name,
                              f"field {fld.simple_name}")
            except ReferenceUnresolved:
                continue
            rl_src = {t.source for t in rl.result.tuples}
            er_src = {t.source for t in er.result.tuples}
            assert rl_src <= er_src, (name, fld.id)
            checked_rler += 1
    assert checked_cbce > 30 and checked_rler > 10
    _pass(f"CB/CE identical on {checked_cbce} targets; "
          f"RL within ER on {checked_rler} references")


def test_persistence_round_trips_every_corpus_model():
    for name in PATTERN_NAMES:
        store, model = corpus_model(name)
        again = import_facts(store.export_str())
        assert again.hash == store.hash, name
        text = dumps_model(model)
        report = load_model(text, store)
        assert dumps_model(report.model) == text, name
        assert report.stale == [] and report.broken == [], name
        assert report.model.refresh(store) == {}, name
    _pass(f"facts and model round-trips with empty refresh diffs on "
          f"{len(PATTERN_NAMES)} corpus models")


def test_de_obligation_detection():
    store = fixture_store("storable.oosl")
    inst = de_query(store, "implementors(storable.Storable)", "new()")
    assert inst.obligations == ("class:storable.PolygonFigure",)
    _pass("missing no-argument constructor detected exactly once")


def test_virtual_interface_rsi_clone_role():
    store = pattern_store("prototype")
    fig = store.ids_by_qname("prototype.Figure")[0]
    vi = define_virtual_interface(store, fig, ["clone()"], "PrototypeRole")
    inst = rsi_query(store, vi, "prototype.Figure+")
    assert sorted(t.source for t in inst.result.tuples) == [
        "class:prototype.EllipseFigure",
        "class:prototype.PolygonFigure",
        "class:prototype.RectangleFigure",
    ]
    # removing the member from one class removes that class from the result
    source = (PATTERNS_DIR / "prototype.oosl").read_text()
    block = ("    Figure clone() {\n"
             "        return new PolygonFigure();\n"
             "    }\n")
    assert block in source
    units, diags = parse_files([("prototype.oosl", source.replace(block, ""))])
    assert not diags
    smaller = extract(units).store
    vi2 = define_virtual_interface(
        smaller, smaller.ids_by_qname("prototype.Figure")[0], ["clone()"],
        "PrototypeRole")
    inst2 = rsi_query(smaller, vi2, "prototype.Figure+")
    assert sorted(t.source for t in inst2.result.tuples) == [
        "class:prototype.EllipseFigure",
        "class:prototype.RectangleFigure",
    ]
    _pass("virtual clone role matches exactly the redeclaring classes")
