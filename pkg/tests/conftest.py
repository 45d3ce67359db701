"""Shared fixtures: corpus stores and paths."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from soquet.oosl import extract, parse_files

REPO = Path(__file__).resolve().parent.parent
PATTERNS_DIR = REPO / "corpus" / "patterns"
FIXTURES_DIR = REPO / "corpus" / "fixtures"
BINDINGS_DIR = REPO / "corpus" / "bindings"
LEDGERS_DIR = REPO / "corpus" / "ledgers"

PATTERN_NAMES = sorted(p.stem for p in PATTERNS_DIR.glob("*.oosl"))

_store_cache: dict[tuple[str, ...], object] = {}


def build_store(*paths: Path, expect_warnings: bool = False):
    key = tuple(str(p) for p in paths)
    if key not in _store_cache:
        units, diags = parse_files([(p.name, p.read_text()) for p in paths])
        assert not diags, [str(d) for d in diags]
        result = extract(units)
        if not expect_warnings:
            assert not result.warnings, [w.render() for w in result.warnings]
        _store_cache[key] = result.store
    return _store_cache[key]


def pattern_store(name: str):
    return build_store(PATTERNS_DIR / f"{name}.oosl")


def fixture_store(*names: str):
    return build_store(*(FIXTURES_DIR / n for n in names))


@pytest.fixture(scope="session")
def observer_store():
    return pattern_store("observer")


@pytest.fixture(scope="session")
def state_store():
    return pattern_store("state")


@pytest.fixture(scope="session")
def pattern_ledger():
    return json.loads((LEDGERS_DIR / "patterns.json").read_text())


@pytest.fixture(scope="session")
def fact_count_ledger():
    return json.loads((LEDGERS_DIR / "fact_counts.json").read_text())


def bindings_for(name: str) -> dict:
    return json.loads((BINDINGS_DIR / f"{name}.json").read_text())["bindings"]
