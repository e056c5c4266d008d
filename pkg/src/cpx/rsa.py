"""The rational-speech-acts cascade over causal worlds.

Literal listener conditions the prior on literal truth; the pragmatic speaker
soft-maximizes the literal listener's expected reward minus message cost; the
pragmatic listener inverts the speaker. Infinite rationality parameters are
handled as exact argmax with uniform tie splitting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from cpx.cause import CauseDefinition
from cpx.errors import NoUsableMessage, UnexpectedMessage, ZeroPosterior
from cpx.worlds import KnowledgeState, Message, denotation

INF = math.inf
DIST_TOL = 1e-9


@dataclass(frozen=True)
class RsaConfig:
    beta_listener: float = INF
    beta_speaker: float = INF
    cause_def: CauseDefinition = CauseDefinition.CONTINGENCY
    tie_tolerance: float = 1e-9
    # rationality of the pragmatic listener's policy; None reuses beta_listener
    beta_pragmatic: float | None = None

    def __post_init__(self):
        for name in ("beta_listener", "beta_speaker"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0")
        if self.beta_pragmatic is not None and not self.beta_pragmatic >= 0:
            raise ValueError("beta_pragmatic must be >= 0")
        if not self.tie_tolerance > 0:
            raise ValueError("tie_tolerance must be > 0")

    @property
    def beta_l(self) -> float:
        return self.beta_pragmatic if self.beta_pragmatic is not None else self.beta_listener


@dataclass(frozen=True)
class Distribution:
    support: tuple[Hashable, ...]
    mass: tuple[float, ...] = field(hash=False)

    def __post_init__(self):
        if len(self.support) != len(self.mass):
            raise ValueError("support and mass differ in length")
        total = sum(self.mass)
        if any(p < 0 for p in self.mass) or abs(total - 1.0) > DIST_TOL:
            raise ValueError(f"not a probability distribution (sum {total!r})")

    def __getitem__(self, key) -> float:
        try:
            return self.mass[self.support.index(key)]
        except ValueError:
            raise KeyError(key) from None

    def get(self, key, default: float = 0.0) -> float:
        return self.mass[self.support.index(key)] if key in self.support else default

    def items(self):
        return zip(self.support, self.mass)

    def as_dict(self) -> dict:
        return dict(self.items())

    @classmethod
    def normalized(cls, support: Sequence, weights: Sequence[float]) -> "Distribution":
        total = math.fsum(weights)
        return cls(tuple(support), tuple(w / total for w in weights))


def softmax(keys: Sequence, scores: Sequence[float], beta: float, tie_tolerance: float = 1e-9) -> Distribution:
    """Luce choice over ``keys``; scores of ``-inf`` always get zero mass."""
    finite = [s for s in scores if s != -INF]
    if not finite:
        raise NoUsableMessage("no option has finite score")
    best = max(finite)
    if beta == INF:
        weights = [1.0 if s != -INF and best - s <= tie_tolerance else 0.0 for s in scores]
    else:
        weights = [0.0 if s == -INF else math.exp(beta * (s - best)) for s in scores]
    return Distribution.normalized(keys, weights)


def expected_rewards(post: Distribution, decision) -> list[float]:
    return [
        math.fsum(p * decision.reward(a, w) for w, p in post.items() if p > 0)
        for a in decision.actions
    ]


def listener_policy(post: Distribution, decision, cfg: RsaConfig, beta: float | None = None) -> Distribution:
    """Soft-max action choice against the expected reward under ``post``."""
    beta = cfg.beta_listener if beta is None else beta
    return softmax(decision.actions, expected_rewards(post, decision), beta, cfg.tie_tolerance)


def policy_value(policy: Distribution, decision, world_id: str) -> float:
    return math.fsum(p * decision.reward(a, world_id) for a, p in policy.items() if p > 0)


class Cascade:
    """One listener/speaker hierarchy with memoized intermediate results.

    ``messages`` is the speaker's full set of alternatives; include a silence
    message explicitly if staying quiet is an option.
    """

    def __init__(self, k: KnowledgeState, messages: Sequence[Message], decision, cfg: RsaConfig,
                 *, truthful: bool = True):
        self.k = k
        self.messages = tuple(messages)
        self.decision = decision
        self.cfg = cfg
        self.truthful = truthful
        surfaces = [m.surface for m in self.messages]
        if len(set(surfaces)) != len(surfaces):
            raise ValueError(f"duplicate message surfaces: {surfaces}")
        decision.check_total(k.ids)
        self._den: dict[Message, frozenset[str]] = {}
        self._l0: dict[Message, Distribution] = {}
        self._speaker: dict[str, Distribution] = {}

    def denotation(self, m: Message) -> frozenset[str]:
        den = self._den.get(m)
        if den is None:
            den = frozenset(denotation(m, self.k, self.cfg.cause_def))
            self._den[m] = den
        return den

    def prior(self) -> Distribution:
        return Distribution(self.k.ids, self.k.prior)

    def literal_posterior(self, m: Message) -> Distribution:
        post = self._l0.get(m)
        if post is None:
            den = self.denotation(m)
            weights = [p if w in den else 0.0 for w, p in zip(self.k.ids, self.k.prior)]
            if sum(weights) <= 0:
                raise ZeroPosterior(f"message {m.surface!r} is false in every world with prior mass")
            post = Distribution.normalized(self.k.ids, weights)
            self._l0[m] = post
        return post

    def literal_policy(self, m: Message) -> Distribution:
        return listener_policy(self.literal_posterior(m), self.decision, self.cfg)

    def prior_policy(self) -> Distribution:
        return listener_policy(self.prior(), self.decision, self.cfg, self.cfg.beta_l)

    def speaker_utility(self, m: Message, world_id: str) -> float:
        try:
            policy = self.literal_policy(m)
        except ZeroPosterior:
            return -INF
        return policy_value(policy, self.decision, world_id)

    def usable(self, m: Message, world_id: str) -> bool:
        return not self.truthful or world_id in self.denotation(m)

    def speaker_scores(self, world_id: str) -> list[float]:
        scores = []
        for m in self.messages:
            if not self.usable(m, world_id):
                scores.append(-INF)
                continue
            u = self.speaker_utility(m, world_id)
            scores.append(u - m.cost if u != -INF else -INF)
        return scores

    def speaker_distribution(self, world_id: str) -> Distribution:
        dist = self._speaker.get(world_id)
        if dist is None:
            scores = self.speaker_scores(world_id)
            if all(s == -INF for s in scores):
                raise NoUsableMessage(f"no usable message at world {world_id}")
            dist = softmax(self.messages, scores, self.cfg.beta_speaker, self.cfg.tie_tolerance)
            self._speaker[world_id] = dist
        return dist

    def pragmatic_posterior(self, m: Message) -> Distribution:
        if m not in self.messages:
            raise UnexpectedMessage(f"{m.surface!r} is not among the speaker's alternatives")
        if m.is_silence:
            # saying nothing is read as no explanation at all, so L keeps the prior
            return self.prior()
        weights = []
        for w, p in zip(self.k.ids, self.k.prior):
            weights.append(p * self.speaker_distribution(w)[m] if p > 0 else 0.0)
        if sum(weights) <= 0:
            raise UnexpectedMessage(f"the speaker never says {m.surface!r}")
        return Distribution.normalized(self.k.ids, weights)

    def pragmatic_policy(self, m: Message) -> Distribution:
        return listener_policy(self.pragmatic_posterior(m), self.decision, self.cfg, self.cfg.beta_l)

    def goodness(self, m: Message, world_id: str, *, net_of_cost: bool = False) -> float:
        informed = policy_value(self.pragmatic_policy(m), self.decision, world_id)
        baseline = policy_value(self.prior_policy(), self.decision, world_id)
        value = informed - baseline
        return value - m.cost if net_of_cost else value

    def redundancy(self, m: Message, world_id: str) -> float:
        """U_S(m) minus the best rival utility among usable messages at the world."""
        rivals = [
            self.speaker_utility(r, world_id)
            for r in self.messages
            if r != m and self.usable(r, world_id)
        ]
        rivals = [u for u in rivals if u != -INF]
        own = self.speaker_utility(m, world_id) if self.usable(m, world_id) else -INF
        if own == -INF or not rivals:
            raise NoUsableMessage(f"redundancy of {m.surface!r} needs it and one rival usable")
        return own - max(rivals)


# -- functional surface --------------------------------------------------------


def literal_posterior(k: KnowledgeState, m: Message, cfg: RsaConfig = RsaConfig()) -> Distribution:
    den = set(denotation(m, k, cfg.cause_def))
    weights = [p if w in den else 0.0 for w, p in zip(k.ids, k.prior)]
    if sum(weights) <= 0:
        raise ZeroPosterior(f"message {m.surface!r} is false in every world with prior mass")
    return Distribution.normalized(k.ids, weights)


def speaker_utility(m: Message, world_id: str, k: KnowledgeState, decision,
                    cfg: RsaConfig = RsaConfig()) -> float:
    return Cascade(k, [m], decision, cfg).speaker_utility(m, world_id)


def speaker_distribution(world_id: str, messages: Sequence[Message], k: KnowledgeState, decision,
                         cfg: RsaConfig = RsaConfig()) -> Distribution:
    return Cascade(k, messages, decision, cfg).speaker_distribution(world_id)


def pragmatic_posterior(k: KnowledgeState, m: Message, messages: Sequence[Message], decision,
                        cfg: RsaConfig = RsaConfig()) -> Distribution:
    return Cascade(k, messages, decision, cfg).pragmatic_posterior(m)


def goodness(m: Message, world_id: str, k: KnowledgeState, messages: Sequence[Message], decision,
             cfg: RsaConfig = RsaConfig(), *, net_of_cost: bool = False) -> float:
    return Cascade(k, messages, decision, cfg).goodness(m, world_id, net_of_cost=net_of_cost)


def redundancy(m: Message, world_id: str, k: KnowledgeState, messages: Sequence[Message], decision,
               cfg: RsaConfig = RsaConfig()) -> float:
    return Cascade(k, messages, decision, cfg).redundancy(m, world_id)
