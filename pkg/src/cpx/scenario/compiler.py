"""Resolve names in a scenario syntax tree and build the runtime objects."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

from cpx.cause import CauseDefinition
from cpx.decision import DecisionProblem, WeightedDecisionSet, manipulation_game
from cpx.errors import CpxError, ResolutionError, ValidationError
from cpx.rsa import Cascade, RsaConfig
from cpx.scm import (
    ExogenousDistribution,
    Formula,
    Scm,
    StructuralFunction,
    Value,
    Variable,
    VariableSignature,
    check_variables,
    validate_scm,
)
from cpx.scenario import ast
from cpx.worlds import (
    KnowledgeState,
    Message,
    World,
    check_explanandum_known,
    check_message,
    prior_from_exogenous,
)


def _at(pos):
    return pos if pos is not None else (None, None)


@dataclass
class Scenario:
    """A compiled scenario: knowledge state, messages, decisions and settings."""

    doc: ast.ScenarioDoc
    params: dict[str, float]
    signature: VariableSignature
    models: dict[str, Scm]
    k: KnowledgeState
    explanandum: Optional[Formula]
    messages: tuple[Message, ...]
    decisions: dict[str, object]
    active: Optional[str]
    config: RsaConfig
    net_of_cost: bool = False
    param_overrides: dict = field(default_factory=dict)
    config_overrides: dict = field(default_factory=dict)
    _cascades: dict = field(default_factory=dict, repr=False)

    @property
    def title(self) -> str:
        return self.doc.name

    def message(self, surface: str) -> Message:
        for m in self.messages:
            if m.surface == surface:
                return m
        raise ResolutionError(f"no message {surface!r}")

    def decision(self, name: Optional[str] = None):
        name = name or self.active
        if name is None:
            raise ResolutionError("scenario declares no decision problem")
        try:
            return self.decisions[name]
        except KeyError:
            raise ResolutionError(f"no decision named {name!r}") from None

    def cascade(self, decision: Optional[str] = None) -> Cascade:
        name = decision or self.active
        c = self._cascades.get(name)
        if c is None:
            c = Cascade(self.k, self.messages, self.decision(name), self.config)
            self._cascades[name] = c
        return c


# -- numeric evaluation -----------------------------------------------------------


def eval_num(e: ast.NumExpr, env: Mapping[str, float]) -> float:
    if isinstance(e, ast.Num):
        return e.value
    if isinstance(e, ast.Ref):
        if e.name not in env:
            raise ResolutionError(f"undefined parameter {e.name!r}", *_at(e.pos))
        return env[e.name]
    if isinstance(e, ast.Neg):
        return -eval_num(e.operand, env)
    a, b = eval_num(e.left, env), eval_num(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if b == 0:
        raise ValidationError("division by zero in numeric expression")
    return a / b


# -- structural expressions -------------------------------------------------------


def _names(e: ast.Expr) -> set[str]:
    if isinstance(e, ast.EName):
        return {e.name}
    if isinstance(e, ast.EConst):
        return set()
    if isinstance(e, ast.ECall):
        return set().union(*(_names(a) for a in e.args))
    if isinstance(e, ast.ECompare):
        return _names(e.left) | _names(e.right)
    if isinstance(e, ast.EMember):
        return _names(e.operand)
    return _names(e.cond) | _names(e.then) | _names(e.orelse)


def _truthy(v: Value, where: str) -> bool:
    if not isinstance(v, int):
        raise ValidationError(f"{where}: condition evaluated to non-integer {v!r}")
    return v != 0


def eval_expr(e: ast.Expr, values: Mapping[str, Value], where: str) -> Value:
    if isinstance(e, ast.EConst):
        return e.value
    if isinstance(e, ast.EName):
        return values.get(e.name, e.name)
    if isinstance(e, ast.ECall):
        args = [eval_expr(a, values, where) for a in e.args]
        if e.fn == "not":
            if len(args) != 1:
                raise ValidationError(f"{where}: not() takes one argument")
            return 0 if _truthy(args[0], where) else 1
        if any(not isinstance(a, int) for a in args):
            raise ValidationError(f"{where}: {e.fn}() needs integer arguments, got {args}")
        return min(args) if e.fn == "min" else max(args)
    if isinstance(e, ast.ECompare):
        same = eval_expr(e.left, values, where) == eval_expr(e.right, values, where)
        return int(same if e.op == "==" else not same)
    if isinstance(e, ast.EMember):
        return int(eval_expr(e.operand, values, where) in e.values)
    branch = e.then if _truthy(eval_expr(e.cond, values, where), where) else e.orelse
    return eval_expr(branch, values, where)


def compile_function(assign: ast.Assign, sig: VariableSignature, model: str) -> StructuralFunction:
    """Tabulate ``X := expr`` over the product of its parents' domains."""
    known = set(sig.exogenous_names) | set(sig.endogenous_names)
    order = sig.exogenous_names + sig.endogenous_names
    used = _names(assign.expr) & known
    parents = tuple(n for n in order if n in used)
    where = f"model {model}, {assign.variable}"
    # any other bare name must be a symbolic value from some declared domain
    symbols = {v for var in sig.exogenous + sig.endogenous for v in var.domain}
    for name in sorted(_names(assign.expr) - known - symbols):
        raise ResolutionError(f"{where}: undefined name {name!r}", *_at(assign.pos))
    target_domain = sig.domain(assign.variable)
    table = {}
    for combo in itertools.product(*(sig.domain(p) for p in parents)):
        value = eval_expr(assign.expr, dict(zip(parents, combo)), where)
        if value not in target_domain:
            row = ", ".join(f"{p}={v}" for p, v in zip(parents, combo))
            raise ValidationError(
                f"{where}: value {value!r} at ({row}) is outside the domain {list(target_domain)}",
                *_at(assign.pos),
            )
        table[combo] = value
    return StructuralFunction(assign.variable, parents, table)


# -- distributions ------------------------------------------------------------------


def compile_distribution(entries, sig: VariableSignature, env, where: str) -> ExogenousDistribution:
    joints = [e for e in entries if isinstance(e, ast.JointEntry)]
    if joints:
        if len(entries) != 1:
            raise ValidationError(f"{where}: a joint table must be the only distribution entry",
                                  *_at(joints[0].pos))
        table = {}
        for key, p in joints[0].table:
            if len(key) != len(sig.exogenous):
                raise ValidationError(
                    f"{where}: joint key {key} needs one value per exogenous variable "
                    f"{list(sig.exogenous_names)}", *_at(joints[0].pos))
            table[tuple(key)] = table.get(tuple(key), 0.0) + eval_num(p, env)
        dist = ExogenousDistribution(joint=table)
    else:
        factors = {}
        for e in entries:
            if e.variable in factors:
                raise ValidationError(f"{where}: {e.variable} has two distribution entries", *_at(e.pos))
            if e.variable not in sig.exogenous_names:
                raise ResolutionError(f"{where}: {e.variable!r} is not an exogenous variable", *_at(e.pos))
            factors[e.variable] = {v: eval_num(p, env) for v, p in e.table}
        for var in sig.exogenous:
            factors.setdefault(var.name, {x: 1.0 / len(var.domain) for x in var.domain})
        dist = ExogenousDistribution(factors=factors)
    try:
        dist.validate(sig)
    except CpxError as exc:
        raise ValidationError(f"{where}: {exc}") from None
    return dist


# -- decisions --------------------------------------------------------------------


def _table_decision(d: ast.TableDecision, k: KnowledgeState, env) -> DecisionProblem:
    if len(set(d.actions)) != len(d.actions):
        raise ValidationError(f"decision {d.name}: duplicate action", *_at(d.pos))
    rows = {}
    for action, cells in d.payoffs:
        if action not in d.actions:
            raise ResolutionError(f"decision {d.name}: payoff for undeclared action {action!r}", *_at(d.pos))
        if action in rows:
            raise ValidationError(f"decision {d.name}: two payoff rows for {action}", *_at(d.pos))
        rows[action] = cells
    rewards = {}
    for action in d.actions:
        cells = rows.get(action, ())
        if len(cells) > len(k.ids):
            raise ValidationError(
                f"decision {d.name}: payoff row {action} has {len(cells)} cells "
                f"but there are {len(k.ids)} worlds", *_at(d.pos))
        for i, w in enumerate(k.ids):
            if i >= len(cells):
                raise ValidationError(
                    f"decision {d.name}: payoff matrix must cover every (action, world) cell; "
                    f"missing cell ({action}, {w})", *_at(d.pos))
            value = eval_num(cells[i], env)
            if not math.isfinite(value):
                raise ValidationError(f"decision {d.name}: cell ({action}, {w}) is not finite", *_at(d.pos))
            rewards[(action, w)] = value
    return DecisionProblem(tuple(d.actions), rewards, d.name)


def _decisions(doc, k, explanandum, env) -> dict[str, object]:
    out: dict[str, object] = {}
    for d in doc.decisions:
        if d.name in out:
            raise ValidationError(f"decision {d.name} declared twice", *_at(d.pos))
        if isinstance(d, ast.TableDecision):
            out[d.name] = _table_decision(d, k, env)
        elif isinstance(d, ast.ManipulationDecision):
            fact = d.of if d.of is not None else explanandum
            if fact is None:
                raise ValidationError(
                    f"decision {d.name}: manipulation game needs an explanandum", *_at(d.pos))
            _check_formula(k.signature, fact, d.pos)
            try:
                out[d.name] = manipulation_game(k, fact, d.name)
            except CpxError as exc:
                raise ValidationError(f"decision {d.name}: {exc}", *_at(d.pos)) from None
        else:
            comps = []
            for weight, name in d.components:
                inner = out.get(name)
                if inner is None:
                    raise ResolutionError(
                        f"decision {d.name}: unknown component {name!r} (declare it first)", *_at(d.pos))
                if not isinstance(inner, DecisionProblem):
                    raise ValidationError(f"decision {d.name}: mixtures cannot nest", *_at(d.pos))
                comps.append((eval_num(weight, env), inner))
            try:
                out[d.name] = WeightedDecisionSet(tuple(comps), d.name)
            except ValueError as exc:
                raise ValidationError(f"decision {d.name}: {exc}", *_at(d.pos)) from None
    return out


def _check_formula(sig, phi, pos):
    try:
        check_variables(sig, phi)
    except CpxError as exc:
        raise ResolutionError(str(exc), *_at(pos)) from None


# -- config --------------------------------------------------------------------------


_CONFIG_FIELDS = {
    "beta-l": "beta_listener",
    "beta-s": "beta_speaker",
    "beta-pl": "beta_pragmatic",
    "tie-tolerance": "tie_tolerance",
    "cause-def": "cause_def",
}


def _config(doc, env, overrides: Mapping[str, object]) -> tuple[RsaConfig, bool]:
    values: dict[str, object] = {}
    net = False
    for entry in doc.config:
        if entry.key == "goodness-net-of-cost":
            net = bool(entry.value)
        elif entry.key == "cause-def":
            values["cause_def"] = _cause_def(entry.value, entry.pos)
        else:
            values[_CONFIG_FIELDS[entry.key]] = eval_num(entry.value, env)
    for key, value in overrides.items():
        if value is None:
            continue
        if key == "goodness-net-of-cost":
            net = bool(value)
        elif key == "cause-def":
            values["cause_def"] = _cause_def(value, None) if isinstance(value, str) else value
        elif key in _CONFIG_FIELDS:
            values[_CONFIG_FIELDS[key]] = float(value)
        else:
            raise ResolutionError(f"unknown config key {key!r}")
    try:
        return RsaConfig(**values), net
    except ValueError as exc:
        raise ValidationError(f"config: {exc}") from None


def _cause_def(text, pos) -> CauseDefinition:
    try:
        return CauseDefinition.parse(text)
    except ValueError:
        raise ValidationError(
            f"unknown cause definition {text!r} (butfor, contingency, contingency-min)", *_at(pos)
        ) from None


# -- driver ---------------------------------------------------------------------------


_NEEDS_DECISION = ("policy", "utility", "speaker", "pl", "goodness", "redundancy", "payoff")


def _check_queries(doc, k, surfaces, decisions, env) -> None:
    """Resolve every name a query mentions, so typos fail before anything runs."""
    for q in doc.queries:
        where = f"query {q.kind}"
        if q.kind in _NEEDS_DECISION and not decisions:
            raise ValidationError(f"{where}: scenario declares no decision problem", *_at(q.pos))
        if q.kind in ("causes", "hp") and doc.explanandum is None:
            raise ValidationError(f"{where}: scenario declares no explanandum", *_at(q.pos))
        refs = (("world", k.ids), ("message", surfaces), ("decision", decisions))
        for key, known in refs:
            name = q.option(key)
            if name is not None and name not in known:
                raise ResolutionError(f"{where}: no {key} named {name!r}", *_at(q.pos))
        if q.sweep_param is not None and q.sweep_param not in env and q.sweep_param not in (
                "beta-l", "beta-s", "beta-pl"):
            raise ResolutionError(f"{where}: cannot sweep unknown name {q.sweep_param!r}",
                                  *_at(q.pos))


def compile_scenario(
    doc: ast.ScenarioDoc,
    params: Mapping[str, float] | None = None,
    config: Mapping[str, object] | None = None,
) -> Scenario:
    """Build a runnable scenario; ``params``/``config`` override declared values."""
    param_overrides, config_overrides = dict(params or {}), dict(config or {})
    params = dict(param_overrides)
    env: dict[str, float] = {}
    for p in doc.params:
        if p.name in env:
            raise ValidationError(f"parameter {p.name} declared twice", *_at(p.pos))
        env[p.name] = params.pop(p.name) if p.name in params else eval_num(p.value, env)
    if params:
        raise ResolutionError(f"unknown parameter(s) {sorted(params)}")

    exo, endo = [], []
    for v in doc.variables:
        (exo if v.exogenous else endo).append(Variable(v.name, tuple(v.domain)))
    try:
        sig = VariableSignature(tuple(exo), tuple(endo))
    except CpxError as exc:
        raise ValidationError(str(exc)) from None

    dists = {}
    for d in doc.distributions:
        if d.name in dists:
            raise ValidationError(f"distribution {d.name} declared twice", *_at(d.pos))
        dists[d.name] = compile_distribution(d.entries, sig, env, f"distribution {d.name}")

    models: dict[str, Scm] = {}
    for m in doc.models:
        if m.name in models:
            raise ValidationError(f"model {m.name} declared twice", *_at(m.pos))
        functions = {}
        for a in m.assigns:
            if a.variable not in sig.endogenous_names:
                kind = "exogenous" if a.variable in sig.exogenous_names else "undeclared"
                raise ResolutionError(
                    f"model {m.name}: cannot assign {kind} variable {a.variable!r}", *_at(a.pos))
            if a.variable in functions:
                raise ValidationError(f"model {m.name}: {a.variable} assigned twice", *_at(a.pos))
            functions[a.variable] = compile_function(a, sig, m.name)
        missing = [n for n in sig.endogenous_names if n not in functions]
        if missing:
            raise ValidationError(f"model {m.name}: no structural function for {missing}", *_at(m.pos))
        if m.uses is not None:
            if m.dist_entries:
                raise ValidationError(f"model {m.name}: use either 'uses' or inline entries", *_at(m.pos))
            if m.uses not in dists:
                raise ResolutionError(f"model {m.name}: unknown distribution {m.uses!r}", *_at(m.pos))
            dist = dists[m.uses]
        else:
            dist = compile_distribution(m.dist_entries, sig, env, f"model {m.name}")
        model = Scm(sig, functions, dist, m.name)
        try:
            validate_scm(model)
        except CpxError as exc:
            raise ValidationError(f"model {m.name}: {exc}", *_at(m.pos)) from None
        models[m.name] = model

    worlds = []
    for w in doc.worlds:
        model = models.get(w.model)
        if model is None:
            raise ResolutionError(f"world {w.name}: unknown model {w.model!r}", *_at(w.pos))
        if w.dist is not None:
            if w.dist not in dists:
                raise ResolutionError(f"world {w.name}: unknown distribution {w.dist!r}", *_at(w.pos))
            model = model.with_distribution(dists[w.dist], f"{w.model}/{w.dist}")
        context = dict(w.context)
        if len(context) != len(w.context):
            raise ValidationError(f"world {w.name}: variable assigned twice in context", *_at(w.pos))
        for name in context:
            if name not in sig.exogenous_names:
                raise ResolutionError(f"world {w.name}: {name!r} is not exogenous", *_at(w.pos))
        missing = [n for n in sig.exogenous_names if n not in context]
        if missing:
            raise ValidationError(f"world {w.name}: context leaves {missing} unassigned", *_at(w.pos))
        try:
            worlds.append(World(w.name, model, context))
        except CpxError as exc:
            raise ValidationError(str(exc), *_at(w.pos)) from None
    if not worlds:
        raise ValidationError("scenario declares no worlds")
    if len({w.id for w in worlds}) != len(worlds):
        raise ValidationError("world names must be unique")

    prior = doc.prior
    if prior.kind == "uniform":
        weights = None
    elif prior.kind == "from-exogenous":
        weights = prior_from_exogenous(worlds)
    else:
        if len(prior.weights) != len(worlds):
            raise ValidationError(
                f"prior weights: {len(prior.weights)} given for {len(worlds)} worlds", *_at(prior.pos))
        weights = [eval_num(x, env) for x in prior.weights]
    try:
        k = KnowledgeState(worlds, weights)
    except (CpxError, ValueError) as exc:
        raise ValidationError(f"prior: {exc}", *_at(prior.pos)) from None

    fact = doc.explanandum
    if fact is not None:
        _check_formula(sig, fact, None)
        if not doc.allow_unknown_fact and not check_explanandum_known(k, fact):
            bad = [w.id for w in k.worlds if not w.satisfies(fact)]
            raise ValidationError(
                f"explanandum must be known in every world (EX1); false at {bad}; "
                "add 'allow-unknown-fact' to permit this")

    messages = []
    for m in doc.messages:
        of = m.of if m.of is not None else fact
        if of is None:
            raise ValidationError(f"message {m.surface!r}: no explanandum to explain", *_at(m.pos))
        try:
            msg = Message(m.surface, tuple(m.explanans), of, eval_num(m.cost, env))
            check_message(msg, k)
        except CpxError as exc:
            raise ResolutionError(f"message {m.surface!r}: {exc}", *_at(m.pos)) from None
        except ValueError as exc:
            raise ValidationError(str(exc), *_at(m.pos)) from None
        messages.append(msg)
    if doc.silence.enabled:
        messages.append(Message.silence(doc.silence.surface, eval_num(doc.silence.cost, env)))
    surfaces = [m.surface for m in messages]
    if len(set(surfaces)) != len(surfaces):
        raise ValidationError(f"message surfaces must be unique: {surfaces}")

    decisions = _decisions(doc, k, fact, env)
    if doc.use is not None:
        if doc.use not in decisions:
            raise ResolutionError(f"use: unknown decision {doc.use!r}")
        active = doc.use
    elif len(decisions) == 1:
        active = next(iter(decisions))
    elif decisions:
        raise ValidationError("several decisions declared; pick one with 'use NAME'")
    else:
        active = None

    _check_queries(doc, k, surfaces, decisions, env)
    cfg, net = _config(doc, env, config or {})
    return Scenario(doc, env, sig, models, k, fact, tuple(messages), decisions, active, cfg, net,
                    param_overrides, config_overrides)

