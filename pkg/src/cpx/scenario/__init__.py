"""Scenario files: parsing, validation, the bundled corpus, and query execution."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from cpx.scenario.ast import ScenarioDoc
from cpx.scenario.compiler import Scenario, compile_scenario
from cpx.scenario.parser import parse_document
from cpx.scenario.printer import pretty_print
from cpx.scenario.query import run_all, run_query
from cpx.scenario.table import FORMATS, ResultTable, emit


def parse_scenario(text: str) -> ScenarioDoc:
    """Parse and validate; raises a ScenarioError carrying line and column."""
    doc = parse_document(text)
    compile_scenario(doc)
    return doc


def load_scenario(text: str, params=None, config=None) -> Scenario:
    return compile_scenario(parse_document(text), params, config)


def corpus_names() -> list[str]:
    root = resources.files("cpx.scenarios")
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".scn"))


def corpus_text(name: str) -> str:
    name = name[:-4] if name.endswith(".scn") else name
    if name not in corpus_names():
        raise FileNotFoundError(f"no bundled scenario {name!r}")
    return resources.files("cpx.scenarios").joinpath(name + ".scn").read_text(encoding="utf-8")


def read_source(ref: str) -> str:
    """Text of a scenario file path, or of a bundled scenario by name."""
    path = Path(ref)
    if path.is_file():
        return path.read_text(encoding="utf-8")
    return corpus_text(ref)


def load_corpus(name: str, params=None, config=None) -> Scenario:
    return load_scenario(corpus_text(name), params, config)


__all__ = [
    "FORMATS",
    "ResultTable",
    "Scenario",
    "ScenarioDoc",
    "compile_scenario",
    "corpus_names",
    "corpus_text",
    "emit",
    "load_corpus",
    "load_scenario",
    "parse_document",
    "parse_scenario",
    "pretty_print",
    "read_source",
    "run_all",
    "run_query",
]
