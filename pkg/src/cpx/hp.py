"""Halpern-Pearl explanation conditions EX1-EX4, plus the weaker novelty test EX4*."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from cpx.cause import CauseDefinition, CauseQuery, is_actual_cause
from cpx.scm import Formula, Literal, check_variables
from cpx.worlds import KnowledgeState, World

EX1, EX2, EX3, EX4, EX4STAR, NEVER_TRUE = "EX1", "EX2", "EX3", "EX4", "EX4*", "NeverTrue"
VARIANTS = ("ex4", "ex4star")


@dataclass(frozen=True)
class HpVerdict:
    candidate: tuple[Literal, ...]
    holds: bool
    failed_conditions: tuple[str, ...]
    witnesses: Mapping[str, tuple[str, ...]] = field(default_factory=dict, hash=False)
    # proper sub-conjunctions that already satisfy EX2
    redundant_subsets: tuple[tuple[Literal, ...], ...] = ()

    def label(self) -> str:
        return ", ".join(str(lit) for lit in self.candidate)


def _true_in(world: World, candidate) -> bool:
    return all(world.satisfies(lit) for lit in candidate)


def _is_cause(world: World, candidate, fact, definition) -> bool:
    return is_actual_cause(CauseQuery(world.model, world.context, tuple(candidate), fact), definition)


def _ex2_failures(candidate, fact, k, definition) -> tuple[list[str], list[str]]:
    """(worlds where the candidate holds, those among them where it is not a cause)."""
    holding = [w for w in k.worlds if _true_in(w, candidate)]
    failing = [w.id for w in holding if not _is_cause(w, candidate, fact, definition)]
    return [w.id for w in holding], failing


def satisfies_ex2(candidate, fact, k, definition) -> bool:
    holding, failing = _ex2_failures(candidate, fact, k, definition)
    return bool(holding) and not failing


def check_hp(
    candidate,
    fact: Formula,
    k: KnowledgeState,
    definition: CauseDefinition = CauseDefinition.CONTINGENCY,
    variant: str = "ex4",
) -> HpVerdict:
    candidate = tuple(candidate)
    if not candidate:
        raise ValueError("candidate must be non-empty")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    for lit in candidate:
        check_variables(k.signature, lit)
    check_variables(k.signature, fact)

    failed: list[str] = []
    witnesses: dict[str, tuple[str, ...]] = {}

    ex1_bad = [w.id for w in k.worlds if not w.satisfies(fact)]
    if ex1_bad:
        failed.append(EX1)
        witnesses[EX1] = tuple(ex1_bad)

    holding, ex2_bad = _ex2_failures(candidate, fact, k, definition)
    if not holding:
        failed.append(NEVER_TRUE)
        witnesses[NEVER_TRUE] = ()
    elif ex2_bad:
        failed.append(EX2)
        witnesses[EX2] = tuple(ex2_bad)

    redundant = []
    for size in range(1, len(candidate)):
        for sub in itertools.combinations(candidate, size):
            if satisfies_ex2(sub, fact, k, definition):
                redundant.append(sub)
    if redundant:
        failed.append(EX3)
        witnesses[EX3] = ()

    if variant == "ex4":
        novel = [w.id for w in k.worlds if not _true_in(w, candidate)]
        if not novel:
            failed.append(EX4)
            witnesses[EX4] = k.ids
    else:
        novel = [w.id for w in k.worlds if not _is_cause(w, candidate, fact, definition)]
        if not novel:
            failed.append(EX4STAR)
            witnesses[EX4STAR] = k.ids

    return HpVerdict(candidate, not failed, tuple(failed), witnesses, tuple(redundant))


def hp_candidates(fact: Formula, k: KnowledgeState, max_size: int) -> list[tuple[Literal, ...]]:
    """Point-literal conjunctions over non-explanandum endogenous variables."""
    sig = k.signature
    fact_vars = fact.variables()
    names = sorted(v for v in sig.endogenous_names if v not in fact_vars)
    out = []
    for size in range(1, max_size + 1):
        for combo in itertools.combinations(names, size):
            for values in itertools.product(*(sig.domain(v) for v in combo)):
                out.append(tuple(Literal.eq(v, x) for v, x in zip(combo, values)))
    return out


def enumerate_hp_explanations(
    fact: Formula,
    k: KnowledgeState,
    definition: CauseDefinition = CauseDefinition.CONTINGENCY,
    variant: str = "ex4",
    max_size: int = 2,
) -> list[HpVerdict]:
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    verdicts = (check_hp(c, fact, k, definition, variant) for c in hp_candidates(fact, k, max_size))
    return [v for v in verdicts if v.holds]
