"""Dispatch scenario queries to the model layers and collect result tables."""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

from cpx.cause import all_actual_causes
from cpx.errors import (
    CpxError,
    NoUsableMessage,
    QueryError,
    ResolutionError,
    ScenarioError,
    UnexpectedMessage,
    ZeroPosterior,
)
from cpx.hp import check_hp, hp_candidates
from cpx.rsa import listener_policy
from cpx.scenario import ast
from cpx.scenario.compiler import Scenario, compile_scenario, eval_num
from cpx.scenario.printer import fmt_num, fmt_string
from cpx.scenario.table import Cell, ResultTable
from cpx.scm import evaluate

NA = "n/a"
OK = "ok"
FAIL = "FAIL"
BETA_KEYS = ("beta-l", "beta-s", "beta-pl")


def _num(x: float) -> Cell:
    return x if math.isfinite(x) else NA


def _lits(lits) -> str:
    return " & ".join(str(lit) for lit in lits)


def _action(a) -> str:
    return "+".join(a) if isinstance(a, tuple) else str(a)


def query_text(q: ast.Query) -> str:
    parts = []
    if q.sweep_param:
        parts.append(f"sweep {q.sweep_param} [" + ", ".join(fmt_num(v) for v in q.sweep_grid) + "]")
    parts.append(q.kind)
    for key, value in q.options:
        parts.append(f"{key} {fmt_string(value) if key == 'message' else value}")
    return " ".join(parts)


class _Run:
    def __init__(self, sc: Scenario, q: ast.Query):
        self.sc, self.q = sc, q
        self.decision_name = q.option("decision")
        world = q.option("world")
        if world is not None and world not in sc.k.ids:
            raise ResolutionError(f"query {q.kind}: no world named {world!r}", *(q.pos or (None, None)))
        self.worlds = (world,) if world is not None else sc.k.ids
        surface = q.option("message")
        self.messages = (sc.message(surface),) if surface is not None else sc.messages

    @property
    def cascade(self):
        return self.sc.cascade(self.decision_name)

    def provenance(self) -> tuple[tuple[str, str], ...]:
        cfg = self.sc.config
        out = [
            ("scenario", self.sc.title),
            ("query", query_text(self.q)),
            ("beta-l", fmt_num(ast.Num(cfg.beta_listener))),
            ("beta-s", fmt_num(ast.Num(cfg.beta_speaker))),
            ("cause-def", cfg.cause_def.value),
        ]
        if cfg.beta_pragmatic is not None:
            out.append(("beta-pl", fmt_num(ast.Num(cfg.beta_pragmatic))))
        name = self.decision_name or self.sc.active
        if name is not None:
            out.append(("decision", name))
        for key, value in sorted(self.sc.param_overrides.items()):
            out.append((key, f"{value:.6g}"))
        return tuple(out)

    def table(self, caption, rows, cols, cells) -> ResultTable:
        return ResultTable(caption, tuple(rows), tuple(cols), tuple(tuple(r) for r in cells), self.provenance())

    def message_by_world(self, caption, fn: Callable) -> ResultTable:
        cells = [[fn(m, w) for w in self.worlds] for m in self.messages]
        return self.table(caption, [m.surface for m in self.messages], self.worlds, cells)

    # -- kinds -------------------------------------------------------------------

    def eval(self) -> ResultTable:
        sc = self.sc
        cols = list(sc.signature.exogenous_names + sc.signature.endogenous_names)
        if sc.explanandum is not None:
            cols.append(str(sc.explanandum))
        cells = []
        for wid in self.worlds:
            w = sc.k.world(wid)
            values = {**w.context, **evaluate(w.model, w.context)}
            row = [str(values[c]) for c in cols[: len(values)]]
            if sc.explanandum is not None:
                row.append("true" if w.satisfies(sc.explanandum) else "false")
            cells.append(row)
        return self.table("structural evaluation", self.worlds, cols, cells)

    def causes(self) -> ResultTable:
        sc = self._need_fact()
        size = self.q.option("max-size", 1)
        cells = []
        for wid in self.worlds:
            w = sc.k.world(wid)
            found = all_actual_causes(w.model, w.context, sc.explanandum, sc.config.cause_def, size)
            cells.append(["; ".join(_lits(c) for c in found) or "-"])
        return self.table(f"actual causes of {sc.explanandum}", self.worlds, ["causes"], cells)

    def denotation(self) -> ResultTable:
        c = self.cascade
        return self.message_by_world("literal truth", lambda m, w: 1.0 if w in c.denotation(m) else 0.0)

    def l0(self) -> ResultTable:
        c = self.cascade

        def cell(m, w):
            try:
                return c.literal_posterior(m)[w]
            except ZeroPosterior:
                return NA

        return self.message_by_world("literal listener posterior P_L0(w|m)", cell)

    def policy(self) -> ResultTable:
        c = self.cascade
        actions = c.decision.actions
        rows, cells = [], []
        for m in self.messages:
            rows.append(m.surface)
            try:
                pol = c.literal_policy(m)
                cells.append([pol[a] for a in actions])
            except ZeroPosterior:
                cells.append([NA] * len(actions))
        rows.append("(prior)")
        prior = listener_policy(c.prior(), c.decision, c.cfg)
        cells.append([prior[a] for a in actions])
        return self.table("literal listener policy", rows, [_action(a) for a in actions], cells)

    def utility(self) -> ResultTable:
        c = self.cascade
        return self.message_by_world("speaker utility U_S(m, w)", lambda m, w: _num(c.speaker_utility(m, w)))

    def speaker(self) -> ResultTable:
        c = self.cascade
        cells = []
        for w in self.worlds:
            try:
                dist = c.speaker_distribution(w)
                cells.append([dist[m] for m in self.messages])
            except NoUsableMessage:
                cells.append([NA] * len(self.messages))
        return self.table("speaker S(m|w)", self.worlds, [m.surface for m in self.messages], cells)

    def pl(self) -> ResultTable:
        c = self.cascade

        def cell(m, w):
            try:
                return c.pragmatic_posterior(m)[w]
            except UnexpectedMessage:
                return NA

        return self.message_by_world("pragmatic listener posterior P_L(w|m)", cell)

    def goodness(self) -> ResultTable:
        c = self.cascade
        net = self.sc.net_of_cost

        def cell(m, w):
            try:
                return c.goodness(m, w, net_of_cost=net)
            except UnexpectedMessage:
                return NA

        caption = "goodness, net of cost" if net else "goodness"
        return self.message_by_world(caption, cell)

    def redundancy(self) -> ResultTable:
        c = self.cascade

        def cell(m, w):
            try:
                return _num(c.redundancy(m, w))
            except NoUsableMessage:
                return NA

        return self.message_by_world("redundancy U_S(m) - max rival U_S", cell)

    def payoff(self) -> ResultTable:
        d = self.sc.decision(self.decision_name)
        cells = [[d.reward(a, w) for w in self.worlds] for a in d.actions]
        return self.table(f"payoffs of {d.name}", [_action(a) for a in d.actions], self.worlds, cells)

    def hp(self) -> ResultTable:
        sc = self._need_fact()
        variant = self.q.option("variant", "ex4")
        size = self.q.option("max-size", 2)
        rows, cells = [], []
        for cand in hp_candidates(sc.explanandum, sc.k, size):
            if not any(all(w.satisfies(lit) for lit in cand) for w in sc.k.worlds):
                continue
            v = check_hp(cand, sc.explanandum, sc.k, sc.config.cause_def, variant)
            notes = []
            for cond in v.failed_conditions:
                ids = list(v.witnesses.get(cond, ()))
                if cond == "EX3":
                    ids = ["{" + _lits(s) + "}" for s in v.redundant_subsets]
                notes.append(f"{cond}: {', '.join(ids)}" if ids else cond)
            rows.append(_lits(cand))
            cells.append([OK if v.holds else FAIL, " ".join(v.failed_conditions) or "-", "; ".join(notes) or "-"])
        return self.table(f"explanation conditions ({variant})", rows, ["verdict", "failed", "witnesses"], cells)

    def _need_fact(self) -> Scenario:
        if self.sc.explanandum is None:
            raise ResolutionError(f"query {self.q.kind} needs an explanandum")
        return self.sc


KINDS = ("eval", "causes", "denotation", "l0", "policy", "utility", "speaker",
         "pl", "goodness", "redundancy", "hp", "payoff")


def run_query(sc: Scenario, q: ast.Query) -> ResultTable:
    """Run one query; sweeps recompile the scenario at each grid point."""
    if q.sweep_param is not None:
        return _sweep(sc, q)
    if q.kind not in KINDS:
        raise ResolutionError(f"unknown query kind {q.kind!r}")
    try:
        run = _Run(sc, q)
        return getattr(run, q.kind)()
    except ScenarioError:
        raise
    except CpxError as exc:
        raise QueryError(f"{sc.title}: query '{query_text(q)}': {exc}") from exc


def _sweep(sc: Scenario, q: ast.Query) -> ResultTable:
    name = q.sweep_param
    declared = {p.name for p in sc.doc.params}
    if name not in declared and name not in BETA_KEYS:
        raise ResolutionError(
            f"sweep: {name!r} is neither a declared param nor one of {', '.join(BETA_KEYS)}",
            *(q.pos or (None, None)),
        )
    inner_q = ast.Query(q.kind, q.options, None, (), q.pos)
    rows, cells = [], []
    for point in q.sweep_grid:
        value = eval_num(point, sc.params)
        params, config = dict(sc.param_overrides), dict(sc.config_overrides)
        if name in BETA_KEYS:
            config[name] = value
        else:
            params[name] = value
        inner = run_query(compile_scenario(sc.doc, params, config), inner_q)
        for r, row in zip(inner.rows, inner.cells):
            for col, cell in zip(inner.cols, row):
                rows.append(str(len(rows) + 1))
                cells.append([name, value if math.isfinite(value) else fmt_num(ast.Num(value)), r, col, cell])
    run = _Run(sc, inner_q)
    return ResultTable(
        f"sweep {name}: {q.kind}", tuple(rows), ("param", "value", "row", "col", "cell"),
        tuple(tuple(c) for c in cells), run.provenance()[:1] + (("query", query_text(q)),),
    )


def run_all(sc: Scenario, queries: Optional[Sequence[ast.Query]] = None) -> list[ResultTable]:
    return [run_query(sc, q) for q in (sc.doc.queries if queries is None else queries)]
