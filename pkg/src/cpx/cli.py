"""Command-line interface: ``cpx <query-kind> SCENARIO [options]``."""

from __future__ import annotations

import functools
import sys

import click

from cpx.errors import CpxError, ScenarioError
from cpx.scenario import (
    FORMATS,
    corpus_names,
    emit,
    parse_document,
    pretty_print,
    read_source,
    run_all,
    run_query,
)
from cpx.scenario import ast
from cpx.scenario.compiler import compile_scenario
from cpx.scenario.parser import parse_document as _parse
from cpx.scenario.query import KINDS

EXIT_INPUT = 1
EXIT_RUNTIME = 2


def _beta(text: str) -> float:
    return float("inf") if text in ("inf", "infinity") else float(text)


class BetaType(click.ParamType):
    name = "beta"

    def convert(self, value, param, ctx):
        if isinstance(value, float):
            return value
        try:
            beta = _beta(value)
        except ValueError:
            self.fail(f"{value!r} is not a number or 'inf'", param, ctx)
        if not beta >= 0:
            self.fail("must be >= 0", param, ctx)
        return beta


def _parse_set(values) -> dict[str, float]:
    out = {}
    for item in values:
        name, sep, raw = item.partition("=")
        if not sep:
            raise click.BadParameter(f"expected NAME=VALUE, got {item!r}", param_hint="--set")
        try:
            out[name.strip()] = _beta(raw.strip())
        except ValueError:
            raise click.BadParameter(f"{raw!r} is not a number", param_hint="--set") from None
    return out


def common_options(fn):
    options = [
        click.argument("scenario"),
        click.option("--format", "fmt", type=click.Choice(FORMATS), envvar="CPX_FORMAT",
                     default="plain", show_default=True, help="Output format (env CPX_FORMAT)."),
        click.option("--beta-l", type=BetaType(), help="Listener rationality (number or inf)."),
        click.option("--beta-s", type=BetaType(), help="Speaker rationality (number or inf)."),
        click.option("--beta-pl", type=BetaType(), help="Pragmatic listener policy rationality."),
        click.option("--cause-def", type=click.Choice(["butfor", "contingency", "contingency-min"]),
                     help="Actual-cause definition behind message truth."),
        click.option("--goodness-net-of-cost/--no-goodness-net-of-cost", default=None,
                     help="Subtract message cost from goodness."),
        click.option("--set", "sets", multiple=True, metavar="NAME=VALUE",
                     help="Override a declared param (repeatable)."),
        click.option("--seed", type=int, default=None,
                     help="Reserved; computations are deterministic."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _guard(fn):
    """Map scenario errors to exit 1 and runtime errors to exit 2."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ScenarioError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except FileNotFoundError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except CpxError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_RUNTIME)

    return wrapper


def _load(scenario, beta_l, beta_s, beta_pl, cause_def, goodness_net_of_cost, sets):
    doc = _parse(read_source(scenario))
    config = {
        "beta-l": beta_l,
        "beta-s": beta_s,
        "beta-pl": beta_pl,
        "cause-def": cause_def,
        "goodness-net-of-cost": goodness_net_of_cost,
    }
    config = {k: v for k, v in config.items() if v is not None}
    return compile_scenario(doc, _parse_set(sets), config)


def _write(tables, fmt):
    chunks = [emit(t, fmt) for t in tables]
    sep = "\n" if fmt in ("plain", "markdown") else ""
    click.echo(sep.join(chunks), nl=False)


@click.group()
@click.version_option(package_name="artifact", prog_name="cpx")
def main():
    """Run causal-explanation scenarios and print result tables."""


@main.command()
@common_options
@_guard
def run(scenario, fmt, seed, sets, **cfg):
    """Run every query declared in SCENARIO."""
    sc = _load(scenario, sets=sets, **cfg)
    _write(run_all(sc), fmt)


@main.command()
@click.argument("scenario")
@_guard
def check(scenario):
    """Parse and validate SCENARIO; print a one-line summary."""
    sc = compile_scenario(_parse(read_source(scenario)))
    click.echo(
        f"ok: {sc.title}: {len(sc.k.ids)} worlds, {len(sc.messages)} messages, "
        f"{len(sc.decisions)} decisions, {len(sc.doc.queries)} queries"
    )


@main.command("print")
@click.argument("scenario")
@_guard
def print_cmd(scenario):
    """Print SCENARIO in canonical form."""
    click.echo(pretty_print(parse_document(read_source(scenario))), nl=False)


@main.command()
@click.argument("name", required=False)
@_guard
def corpus(name):
    """List bundled scenarios, or print one by NAME."""
    if name is None:
        for n in corpus_names():
            click.echo(n)
    else:
        click.echo(read_source(name), nl=False)


@main.command()
@common_options
@click.argument("param")
@click.argument("grid")
@click.argument("kind", type=click.Choice(KINDS))
@click.option("--world")
@click.option("--decision")
@click.option("--message")
@click.option("--max-size", type=int)
@click.option("--variant", type=click.Choice(["ex4", "ex4star"]))
@_guard
def sweep(scenario, param, grid, kind, fmt, seed, sets, world, decision, message, max_size,
          variant, **cfg):
    """Vary PARAM over GRID (comma-separated) and run KIND at each point."""
    sc = _load(scenario, sets=sets, **cfg)
    try:
        values = tuple(ast.Num(_beta(v.strip())) for v in grid.split(","))
    except ValueError:
        raise click.BadParameter(f"{grid!r} is not a comma-separated list of numbers",
                                 param_hint="GRID") from None
    q = ast.Query(kind, _options(world, decision, message, max_size, variant), param, values)
    _write([run_query(sc, q)], fmt)


def _options(world, decision, message, max_size, variant):
    pairs = (("world", world), ("decision", decision), ("max-size", max_size),
             ("variant", variant), ("message", message))
    return tuple((k, v) for k, v in pairs if v is not None)


KIND_HELP = {
    "eval": "Endogenous values and the explanandum in each world.",
    "causes": "Actual causes of the explanandum in each world.",
    "denotation": "Literal truth of each message in each world.",
    "l0": "Literal listener posterior P_L0(w|m).",
    "policy": "Literal listener action policy after each message.",
    "utility": "Speaker utility U_S(m, w).",
    "speaker": "Speaker distribution S(m|w).",
    "pl": "Pragmatic listener posterior P_L(w|m).",
    "goodness": "Goodness of each message in each world.",
    "redundancy": "U_S(m, w) minus the best rival's utility.",
    "hp": "Halpern-Pearl explanation conditions per candidate.",
    "payoff": "Payoff matrix of the decision problem.",
}


def _make_query_command(kind: str):
    @common_options
    @click.option("--world", help="Restrict to one world.")
    @click.option("--decision", help="Use this decision problem instead of the active one.")
    @click.option("--message", help="Restrict to one message surface.")
    @click.option("--max-size", type=int, help="Largest conjunction (causes, hp).")
    @click.option("--variant", type=click.Choice(["ex4", "ex4star"]), help="Novelty condition (hp).")
    @_guard
    def command(scenario, fmt, seed, sets, world, decision, message, max_size, variant, **cfg):
        sc = _load(scenario, sets=sets, **cfg)
        q = ast.Query(kind, _options(world, decision, message, max_size, variant))
        _write([run_query(sc, q)], fmt)

    command.__doc__ = KIND_HELP[kind] + "\n\nSCENARIO is a file path or a bundled scenario name."
    return main.command(kind)(command)


for _kind in KINDS:
    _make_query_command(_kind)


if __name__ == "__main__":
    main()
