"""Actual causation by exhaustive counterfactual search.

Three predicates are offered. ``BUT_FOR`` asks whether some alternative value
of the candidate would have removed the explanandum. ``CONTINGENCY`` is the
egalitarian contingency definition: the but-for test may be run while holding
a witness set ``W`` of off-path variables at chosen values, provided that the
explanandum survives with the candidate at its actual value under every partial
restoration of the witness and the remaining variables (the AC2(b) clause of
the updated Halpern-Pearl definition). ``CONTINGENCY_MINIMAL`` additionally
requires that no proper sub-conjunction of the candidate is itself a cause.

Candidates may contain set-valued literals (``C in {s, c}``). Such an event is
a cause only if the explanandum is sustained by every value in the set and the
alternative moves the variable outside the set.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from cpx.errors import UnknownVariable
from cpx.scm import (
    Context,
    Formula,
    Literal,
    Scm,
    Value,
    evaluate,
    intervene,
    satisfies,
)


class CauseDefinition(enum.Enum):
    BUT_FOR = "butfor"
    CONTINGENCY = "contingency"
    CONTINGENCY_MINIMAL = "contingency-min"

    @classmethod
    def parse(cls, text: str) -> "CauseDefinition":
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(f"unknown cause definition {text!r}")


@dataclass(frozen=True)
class CauseQuery:
    model: Scm
    context: Context
    candidate: tuple[Literal, ...]
    explanandum: Formula

    def __post_init__(self):
        if not self.candidate:
            raise ValueError("candidate must contain at least one literal")
        sig = self.model.signature
        names = [lit.variable for lit in self.candidate]
        if len(set(names)) != len(names):
            raise ValueError(f"candidate mentions a variable twice: {names}")
        for name in names:
            if sig.is_exogenous(name):
                raise UnknownVariable(f"candidate variable {name} must be endogenous")
        for name in self.explanandum.variables():
            sig.variable(name)


def _occurs(q: CauseQuery, actual: dict[str, Value]) -> bool:
    return all(lit.holds(actual[lit.variable]) for lit in q.candidate) and satisfies(
        q.model, q.context, q.explanandum
    )


def _holds_under(q: CauseQuery, setting: dict[str, Value]) -> bool:
    return satisfies(intervene(q.model, setting), q.context, q.explanandum)


def _alternatives(q: CauseQuery) -> Iterator[tuple[Value, ...]]:
    """Settings of the candidate variables that leave the event in some coordinate."""
    sig = q.model.signature
    domains = [sig.domain(lit.variable) for lit in q.candidate]
    for combo in itertools.product(*domains):
        if any(not lit.holds(v) for lit, v in zip(q.candidate, combo)):
            yield combo


def _realizations(q: CauseQuery) -> list[tuple[Value, ...]]:
    return list(itertools.product(*(lit.values for lit in q.candidate)))


def _subsets(items: Sequence[str]) -> Iterator[tuple[str, ...]]:
    for size in range(len(items) + 1):
        yield from itertools.combinations(items, size)


def is_but_for_cause(q: CauseQuery) -> bool:
    actual = evaluate(q.model, q.context)
    if not _occurs(q, actual):
        return False
    xs = [lit.variable for lit in q.candidate]
    for realization in _realizations(q):
        if not _holds_under(q, dict(zip(xs, realization))):
            return False
    return any(not _holds_under(q, dict(zip(xs, alt))) for alt in _alternatives(q))


def _contingency(q: CauseQuery, stability: bool) -> bool:
    sig = q.model.signature
    actual = evaluate(q.model, q.context)
    if not _occurs(q, actual):
        return False
    xs = [lit.variable for lit in q.candidate]
    fact_vars = q.explanandum.variables()
    rest = [
        v for v in sig.endogenous_names if v not in xs and v not in fact_vars
    ]
    realizations = _realizations(q)
    alternatives = list(_alternatives(q))
    for witness in _subsets(rest):
        others = [v for v in rest if v not in witness]
        for w in itertools.product(*(sig.domain(v) for v in witness)):
            held = dict(zip(witness, w))
            if not any(
                not _holds_under(q, {**dict(zip(xs, alt)), **held}) for alt in alternatives
            ):
                continue
            if not stability or _stable(q, xs, realizations, held, others, actual):
                return True
    return False


def _stable(q, xs, realizations, held, others, actual) -> bool:
    """The explanandum survives any partial restoration of witness and bystanders."""
    for realization in realizations:
        base = dict(zip(xs, realization))
        for w_sub in _subsets(list(held)):
            for z_sub in _subsets(others):
                setting = dict(base)
                setting.update({v: held[v] for v in w_sub})
                setting.update({v: actual[v] for v in z_sub})
                if not _holds_under(q, setting):
                    return False
    return True


def is_actual_cause(
    q: CauseQuery,
    definition: CauseDefinition = CauseDefinition.CONTINGENCY,
    *,
    stability: bool = True,
) -> bool:
    """Decide whether ``q.candidate`` is an actual cause of ``q.explanandum``.

    ``stability=False`` drops the AC2(b) clause, leaving a pure
    "but-for under some contingency" test.
    """
    if definition is CauseDefinition.BUT_FOR:
        return is_but_for_cause(q)
    if not _contingency(q, stability):
        return False
    if definition is CauseDefinition.CONTINGENCY_MINIMAL:
        n = len(q.candidate)
        for size in range(1, n):
            for sub in itertools.combinations(q.candidate, size):
                smaller = CauseQuery(q.model, q.context, sub, q.explanandum)
                if _contingency(smaller, stability):
                    return False
    return True


def candidate_conjunctions(
    model: Scm,
    context: Context,
    explanandum: Formula,
    max_size: int,
) -> list[tuple[Literal, ...]]:
    """Conjunctions of actual endogenous literals, by size, then variable name, then value."""
    actual = evaluate(model, context)
    fact_vars = explanandum.variables()
    names = sorted(v for v in model.signature.endogenous_names if v not in fact_vars)
    out = []
    for size in range(1, max_size + 1):
        for combo in itertools.combinations(names, size):
            out.append(tuple(Literal.eq(v, actual[v]) for v in combo))
    return out


def all_actual_causes(
    model: Scm,
    context: Context,
    explanandum: Formula,
    definition: CauseDefinition = CauseDefinition.CONTINGENCY,
    max_size: int = 1,
) -> list[tuple[Literal, ...]]:
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    if not satisfies(model, context, explanandum):
        return []
    return [
        cand
        for cand in candidate_conjunctions(model, context, explanandum, max_size)
        if is_actual_cause(CauseQuery(model, context, cand, explanandum), definition)
    ]
