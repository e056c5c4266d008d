"""Knowledge states over (model, context) worlds, and "because" messages."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from cpx.cause import CauseDefinition, CauseQuery, is_actual_cause
from cpx.errors import BadDistribution, EmptySupport, UnknownVariable
from cpx.scm import (
    PROB_TOL,
    TRUE,
    Context,
    Formula,
    Literal,
    Scm,
    VariableSignature,
    check_variables,
    satisfies,
)


@dataclass(frozen=True)
class World:
    id: str
    model: Scm
    context: Context = field(hash=False)

    def __post_init__(self):
        sig = self.model.signature
        if set(self.context) != set(sig.exogenous_names):
            raise UnknownVariable(
                f"world {self.id}: context must assign exactly {list(sig.exogenous_names)}"
            )
        for name, value in self.context.items():
            if value not in sig.domain(name):
                raise UnknownVariable(f"world {self.id}: {name}={value!r} out of domain")

    def satisfies(self, phi: Formula) -> bool:
        return satisfies(self.model, self.context, phi)


class KnowledgeState:
    """An ordered, weighted set of worlds sharing one variable signature."""

    def __init__(self, worlds: Sequence[World], prior: Sequence[float] | None = None):
        worlds = tuple(worlds)
        if not worlds:
            raise EmptySupport("a knowledge state needs at least one world")
        ids = [w.id for w in worlds]
        if len(set(ids)) != len(ids):
            raise ValueError(f"world ids must be unique: {ids}")
        sig = worlds[0].model.signature
        for w in worlds[1:]:
            if w.model.signature != sig:
                raise ValueError(f"world {w.id} has a different variable signature")
        if prior is None:
            prior = [1.0] * len(worlds)
        prior = [float(p) for p in prior]
        if len(prior) != len(worlds):
            raise BadDistribution("prior needs one weight per world")
        if any(p < 0 or not math.isfinite(p) for p in prior):
            raise BadDistribution("prior weights must be finite and non-negative")
        total = sum(prior)
        if total <= 0:
            raise EmptySupport("prior has no positive mass")
        self.worlds: tuple[World, ...] = worlds
        self.prior: tuple[float, ...] = tuple(p / total for p in prior)
        self._index = {w.id: i for i, w in enumerate(worlds)}

    @property
    def signature(self) -> VariableSignature:
        return self.worlds[0].model.signature

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(w.id for w in self.worlds)

    def world(self, world_id: str) -> World:
        try:
            return self.worlds[self._index[world_id]]
        except KeyError:
            raise KeyError(f"no world named {world_id!r}") from None

    def prior_of(self, world_id: str) -> float:
        return self.prior[self._index[world_id]]

    def support(self) -> tuple[str, ...]:
        return tuple(w.id for w, p in zip(self.worlds, self.prior) if p > 0)

    def __eq__(self, other):
        if not isinstance(other, KnowledgeState):
            return NotImplemented
        return self.ids == other.ids and all(
            abs(a - b) <= PROB_TOL for a, b in zip(self.prior, other.prior)
        ) and all(a.model == b.model for a, b in zip(self.worlds, other.worlds))

    def __repr__(self):
        inner = ", ".join(f"{i}:{p:.4g}" for i, p in zip(self.ids, self.prior))
        return f"KnowledgeState({inner})"


def prior_from_exogenous(worlds: Sequence[World]) -> list[float]:
    """Weights proportional to each world's P(context) under its own model."""
    return [w.model.context_prob(w.context) for w in worlds]


def condition(k: KnowledgeState, subset: Iterable[str]) -> KnowledgeState:
    keep = set(subset)
    unknown = keep - set(k.ids)
    if unknown:
        raise KeyError(f"unknown worlds {sorted(unknown)}")
    worlds = [w for w in k.worlds if w.id in keep]
    weights = [k.prior_of(w.id) for w in worlds]
    if not worlds or sum(weights) <= 0:
        raise EmptySupport("conditioning set has no prior mass")
    return KnowledgeState(worlds, weights)


def check_explanandum_known(k: KnowledgeState, fact: Formula) -> bool:
    return all(w.satisfies(fact) for w in k.worlds)


@dataclass(frozen=True)
class Message:
    """``explanandum because explanans``; an empty explanans means silence."""

    surface: str
    explanans: tuple[Literal, ...] = ()
    explanandum: Formula = TRUE
    cost: float = 0.0

    def __post_init__(self):
        if self.cost < 0 or not math.isfinite(self.cost):
            raise ValueError(f"message {self.surface!r}: cost must be finite and >= 0")

    @classmethod
    def silence(cls, surface: str = "(silence)", cost: float = 0.0) -> "Message":
        return cls(surface, (), TRUE, cost)

    @property
    def is_silence(self) -> bool:
        return not self.explanans

    def with_cost(self, cost: float) -> "Message":
        return Message(self.surface, self.explanans, self.explanandum, cost)

    def true_at(self, world: World, definition: CauseDefinition) -> bool:
        if self.is_silence:
            return True
        q = CauseQuery(world.model, world.context, self.explanans, self.explanandum)
        return is_actual_cause(q, definition)


def check_message(m: Message, k: KnowledgeState) -> None:
    sig = k.signature
    for lit in m.explanans:
        if sig.is_exogenous(lit.variable):
            raise UnknownVariable(f"message {m.surface!r}: {lit.variable} is exogenous")
        check_variables(sig, lit)
    check_variables(sig, m.explanandum)


def denotation(
    m: Message,
    k: KnowledgeState,
    definition: CauseDefinition = CauseDefinition.CONTINGENCY,
) -> tuple[str, ...]:
    """Ids of the worlds where the message is literally true, in state order."""
    if m.is_silence:
        return k.ids
    check_message(m, k)
    return tuple(w.id for w in k.worlds if m.true_at(w, definition))


def with_silence(messages: Sequence[Message], silence: Message | None = None) -> list[Message]:
    out = list(messages)
    if not any(m.is_silence for m in out):
        out.append(silence or Message.silence())
    return out


def message_index(messages: Sequence[Message]) -> Mapping[str, Message]:
    index = {}
    for m in messages:
        if m.surface in index:
            raise ValueError(f"duplicate message surface {m.surface!r}")
        index[m.surface] = m
    return index
