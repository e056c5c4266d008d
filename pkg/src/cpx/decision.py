"""Listener decision problems, weighted mixtures, and the manipulation game."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from cpx.errors import MissingAction, NoEligibleActions, VariableInFact
from cpx.scm import Context, Formula, Literal, Intervened, Not, Scm, satisfies
from cpx.worlds import KnowledgeState


@dataclass(frozen=True)
class DecisionProblem:
    """A finite action set with a reward for every (action, world id) cell."""

    actions: tuple[str, ...]
    rewards: Mapping[tuple[str, str], float] = field(hash=False)
    name: str = "decision"

    def __post_init__(self):
        if not self.actions:
            raise ValueError("a decision problem needs at least one action")
        if len(set(self.actions)) != len(self.actions):
            raise ValueError(f"duplicate actions in {self.name}")

    def reward(self, action: Hashable, world_id: str) -> float:
        try:
            return self.rewards[(action, world_id)]
        except KeyError:
            if action not in self.actions:
                raise MissingAction(f"{self.name}: no action {action!r}") from None
            raise KeyError(f"{self.name}: no reward for ({action}, {world_id})") from None

    def check_total(self, world_ids: Sequence[str]) -> None:
        for a in self.actions:
            for w in world_ids:
                if (a, w) not in self.rewards:
                    raise KeyError(f"{self.name}: missing reward cell ({a}, {w})")

    @classmethod
    def from_rows(cls, actions: Sequence[str], world_ids: Sequence[str],
                  rows: Sequence[Sequence[float]], name: str = "decision") -> "DecisionProblem":
        rewards = {}
        for a, row in zip(actions, rows):
            if len(row) != len(world_ids):
                raise ValueError(f"{name}: row {a} has {len(row)} cells, need {len(world_ids)}")
            for w, r in zip(world_ids, row):
                rewards[(a, w)] = float(r)
        return cls(tuple(actions), rewards, name)


@dataclass(frozen=True)
class WeightedDecisionSet:
    """Independent decision problems played at once; reward is the weighted sum.

    Actions are joint: one action per component, as a tuple.
    """

    components: tuple[tuple[float, DecisionProblem], ...]
    name: str = "mixture"

    def __post_init__(self):
        if not self.components:
            raise ValueError("a weighted decision set needs at least one component")
        weights = [w for w, _ in self.components]
        if any(w < 0 for w in weights) or not any(w > 0 for w in weights):
            raise ValueError("weights must be non-negative with at least one positive")

    @property
    def actions(self) -> tuple[tuple[str, ...], ...]:
        return tuple(itertools.product(*(p.actions for _, p in self.components)))

    def reward(self, joint_action: Sequence[str], world_id: str) -> float:
        return composite_reward(self, joint_action, world_id)

    def check_total(self, world_ids: Sequence[str]) -> None:
        for _, problem in self.components:
            problem.check_total(world_ids)


def composite_reward(ws: WeightedDecisionSet, joint_action: Sequence[str], world_id: str) -> float:
    if len(joint_action) != len(ws.components):
        raise MissingAction(
            f"joint action needs {len(ws.components)} entries, got {len(joint_action)}"
        )
    return sum(
        w * problem.reward(a, world_id) for (w, problem), a in zip(ws.components, joint_action)
    )


def manipulates(model: Scm, context: Context, x: str, fact: Formula) -> int:
    """1 if some intervention on ``x`` flips the truth value of ``fact``, else 0."""
    if x in fact.variables():
        raise VariableInFact(f"{x} appears in the explanandum")
    sig = model.signature
    if sig.is_exogenous(x):
        raise VariableInFact(f"{x} is exogenous")
    now = satisfies(model, context, fact)
    for v in sig.domain(x):
        flipped = satisfies(model, context, Intervened((Literal.eq(x, v),), Not(fact) if now else fact))
        if flipped:
            return 1
    return 0


def manipulation_reward(model: Scm, x: str, fact: Formula) -> float:
    """Probability mass of the contexts in which intervening on ``x`` flips ``fact``."""
    total = 0.0
    for u in model.signature.contexts():
        p = model.context_prob(u)
        if p > 0 and manipulates(model, u, x, fact):
            total += p
    return total


def manipulation_game(k: KnowledgeState, fact: Formula, name: str = "manipulation-game") -> DecisionProblem:
    """Choose an endogenous variable to intervene on; score by flip probability.

    The sum runs over every context of each world's own model, including
    contexts the listener has ruled out, so the column for a world ignores
    the world's actual context.
    """
    fact_vars = fact.variables()
    actions = tuple(v for v in k.signature.endogenous_names if v not in fact_vars)
    if not actions:
        raise NoEligibleActions("every endogenous variable appears in the explanandum")
    rewards = {}
    cache: dict[int, dict[str, float]] = {}
    for w in k.worlds:
        column = cache.get(id(w.model))
        if column is None:
            column = {x: manipulation_reward(w.model, x, fact) for x in actions}
            cache[id(w.model)] = column
        for x in actions:
            rewards[(x, w.id)] = column[x]
    return DecisionProblem(actions, rewards, name)
