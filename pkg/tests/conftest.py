import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cpx.scenario import load_corpus  # noqa: E402
from cpx.scm import (  # noqa: E402
    ExogenousDistribution,
    Scm,
    StructuralFunction,
    Variable,
    VariableSignature,
)

BIN = (0, 1)


def binary_signature(exo, endo):
    return VariableSignature(
        tuple(Variable(n, BIN) for n in exo), tuple(Variable(n, BIN) for n in endo)
    )


def table_fn(target, parents, fn):
    """Tabulate a Python function of binary parents."""
    import itertools

    table = {combo: fn(*combo) for combo in itertools.product(BIN, repeat=len(parents))}
    return StructuralFunction(target, tuple(parents), table)


def roof_models():
    """The four two-cause structures over R, D -> F."""
    sig = binary_signature(["U_R", "U_D"], ["R", "D", "F"])
    base = {
        "R": StructuralFunction.identity("R", "U_R", BIN),
        "D": StructuralFunction.identity("D", "U_D", BIN),
    }
    shapes = {
        "M_R": (("R",), lambda r: r),
        "M_D": (("D",), lambda d: d),
        "M_and": (("R", "D"), min),
        "M_or": (("R", "D"), max),
    }
    out = {}
    for name, (parents, fn) in shapes.items():
        fns = dict(base, F=table_fn("F", parents, fn))
        out[name] = Scm(sig, fns, ExogenousDistribution.uniform(sig), name)
    return out


@pytest.fixture
def roof():
    return roof_models()


@pytest.fixture(scope="session")
def corpus():
    cache = {}

    def get(name, params=None, config=None):
        if params or config:
            return load_corpus(name, params, config)
        if name not in cache:
            cache[name] = load_corpus(name)
        return cache[name]

    return get


def pytest_terminal_summary(terminalreporter):
    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, failed = results[n]
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += "  (" + "; ".join(failed) + ")"
        terminalreporter.write_line(line)
