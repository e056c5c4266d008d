"""Finite structural causal models.

Variables take values from small symbolic domains (ints or strings). Every
endogenous variable is determined by an explicit lookup table over its parents,
so models are total by construction once validated, and evaluation is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

from cpx.errors import (
    BadDistribution,
    BadDomain,
    CyclicModel,
    ExogenousTarget,
    PartialFunction,
    UnknownVariable,
)

Value = Union[int, str]
Context = Mapping[str, Value]
Assignment = Mapping[str, Value]

PROB_TOL = 1e-9


@dataclass(frozen=True)
class Variable:
    name: str
    domain: tuple[Value, ...]


@dataclass(frozen=True)
class VariableSignature:
    exogenous: tuple[Variable, ...]
    endogenous: tuple[Variable, ...]

    def __post_init__(self):
        seen = set()
        for var in self.exogenous + self.endogenous:
            if var.name in seen:
                raise BadDomain(f"variable {var.name!r} declared twice")
            seen.add(var.name)
            if not var.domain:
                raise BadDomain(f"variable {var.name!r} has an empty domain")
            if len(set(var.domain)) != len(var.domain):
                raise BadDomain(f"variable {var.name!r} has repeated domain values")

    @property
    def exogenous_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.exogenous)

    @property
    def endogenous_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.endogenous)

    def variable(self, name: str) -> Variable:
        for var in self.exogenous + self.endogenous:
            if var.name == name:
                return var
        raise UnknownVariable(f"unknown variable {name!r}")

    def domain(self, name: str) -> tuple[Value, ...]:
        return self.variable(name).domain

    def is_exogenous(self, name: str) -> bool:
        if name in self.exogenous_names:
            return True
        if name in self.endogenous_names:
            return False
        raise UnknownVariable(f"unknown variable {name!r}")

    def contexts(self) -> Iterator[dict[str, Value]]:
        """All total exogenous assignments, in domain order."""
        names = self.exogenous_names
        for values in itertools.product(*(v.domain for v in self.exogenous)):
            yield dict(zip(names, values))


@dataclass(frozen=True, eq=True)
class StructuralFunction:
    target: str
    parents: tuple[str, ...]
    table: Mapping[tuple[Value, ...], Value] = field(hash=False)

    @classmethod
    def constant(cls, target: str, value: Value) -> "StructuralFunction":
        return cls(target, (), {(): value})

    @classmethod
    def identity(cls, target: str, parent: str, domain: Iterable[Value]) -> "StructuralFunction":
        return cls(target, (parent,), {(v,): v for v in domain})

    def __call__(self, values: Assignment) -> Value:
        return self.table[tuple(values[p] for p in self.parents)]


@dataclass(frozen=True)
class ExogenousDistribution:
    """Either per-variable tables (``factors``) or one ``joint`` table.

    Joint keys are tuples ordered like the signature's exogenous variables.
    Unlisted values have probability zero.
    """

    factors: Mapping[str, Mapping[Value, float]] | None = field(default=None, hash=False)
    joint: Mapping[tuple[Value, ...], float] | None = field(default=None, hash=False)

    @classmethod
    def uniform(cls, signature: VariableSignature) -> "ExogenousDistribution":
        return cls(factors={
            v.name: {x: 1.0 / len(v.domain) for x in v.domain} for v in signature.exogenous
        })

    def prob(self, context: Context, signature: VariableSignature) -> float:
        if self.joint is not None:
            key = tuple(context[n] for n in signature.exogenous_names)
            return float(self.joint.get(key, 0.0))
        p = 1.0
        for name in signature.exogenous_names:
            p *= float(self.factors.get(name, {}).get(context[name], 0.0))
        return p

    def validate(self, signature: VariableSignature) -> None:
        if (self.factors is None) == (self.joint is None):
            raise BadDistribution("exactly one of factored or joint form is required")
        tables = [self.joint] if self.joint is not None else []
        if self.factors is not None:
            missing = set(signature.exogenous_names) - set(self.factors)
            extra = set(self.factors) - set(signature.exogenous_names)
            if missing or extra:
                raise BadDistribution(
                    f"factored distribution must cover exactly the exogenous variables "
                    f"(missing {sorted(missing)}, unexpected {sorted(extra)})"
                )
            for name, table in self.factors.items():
                domain = signature.domain(name)
                for value in table:
                    if value not in domain:
                        raise BadDistribution(f"value {value!r} not in domain of {name}")
                tables.append(table)
        else:
            for key in self.joint:
                if len(key) != len(signature.exogenous) or any(
                    v not in var.domain for v, var in zip(key, signature.exogenous)
                ):
                    raise BadDistribution(f"joint key {key!r} is not an exogenous tuple")
        for table in tables:
            masses = [float(p) for p in table.values()]
            if any(p < 0 or not math.isfinite(p) for p in masses):
                raise BadDistribution("negative or non-finite probability mass")
            total = sum(masses)
            if abs(total - 1.0) > PROB_TOL:
                raise BadDistribution(f"probabilities sum to {total:.12g}, not 1")


@dataclass(frozen=True)
class Scm:
    signature: VariableSignature
    functions: Mapping[str, StructuralFunction] = field(hash=False)
    exo_dist: ExogenousDistribution
    id: str = "M"

    def order(self) -> tuple[str, ...]:
        """Endogenous variables in a topological order (declaration order breaks ties)."""
        cached = self.__dict__.get("_order")
        if cached is None:
            cached = _topological_order(self)
            object.__setattr__(self, "_order", cached)
        return cached

    def with_distribution(self, dist: ExogenousDistribution, id: str | None = None) -> "Scm":
        return Scm(self.signature, self.functions, dist, id or self.id)

    def context_prob(self, context: Context) -> float:
        return self.exo_dist.prob(context, self.signature)


def _topological_order(model: Scm) -> tuple[str, ...]:
    endo = model.signature.endogenous_names
    deps = {
        name: [p for p in model.functions[name].parents if p in endo] for name in endo
    }
    order: list[str] = []
    state: dict[str, int] = {}

    def visit(name: str, path: list[str]) -> None:
        mark = state.get(name, 0)
        if mark == 2:
            return
        if mark == 1:
            cycle = path[path.index(name):] + [name]
            raise CyclicModel(f"cycle in model {model.id}: {' -> '.join(cycle)}")
        state[name] = 1
        for parent in deps[name]:
            visit(parent, path + [name])
        state[name] = 2
        order.append(name)

    for name in endo:
        visit(name, [])
    return tuple(order)


def validate_scm(model: Scm) -> None:
    """Raise if the model breaks any well-formedness invariant."""
    sig = model.signature
    endo = sig.endogenous_names
    if set(model.functions) != set(endo):
        missing = set(endo) - set(model.functions)
        extra = set(model.functions) - set(endo)
        raise PartialFunction(
            f"model {model.id}: need one function per endogenous variable "
            f"(missing {sorted(missing)}, unexpected {sorted(extra)})"
        )
    for name, fn in model.functions.items():
        if fn.target != name:
            raise PartialFunction(f"function registered for {name} targets {fn.target}")
        domains = [sig.domain(p) for p in fn.parents]
        target_domain = sig.domain(name)
        for combo in itertools.product(*domains):
            if combo not in fn.table:
                raise PartialFunction(
                    f"model {model.id}: f_{name} has no row for {dict(zip(fn.parents, combo))}"
                )
            if fn.table[combo] not in target_domain:
                raise PartialFunction(
                    f"model {model.id}: f_{name}{combo} = {fn.table[combo]!r} outside domain"
                )
    model.exo_dist.validate(sig)
    # drop any stale cache so cycles are always re-detected
    model.__dict__.pop("_order", None)
    model.order()


def evaluate(model: Scm, context: Context) -> dict[str, Value]:
    """Solve the structural equations at ``context``; returns endogenous values only."""
    values: dict[str, Value] = dict(context)
    for name in model.order():
        values[name] = model.functions[name](values)
    return {name: values[name] for name in model.signature.endogenous_names}


def intervene(model: Scm, assignment: Iterable["Literal"] | Mapping[str, Value]) -> Scm:
    """Replace the mechanisms of the assigned variables by constants."""
    if isinstance(assignment, Mapping):
        pairs = list(assignment.items())
    else:
        pairs = [(lit.variable, lit.value) for lit in assignment]
    if not pairs:
        return model
    sig = model.signature
    functions = dict(model.functions)
    for name, value in pairs:
        if sig.is_exogenous(name):
            raise ExogenousTarget(f"cannot intervene on exogenous variable {name}")
        if value not in sig.domain(name):
            raise BadDomain(f"value {value!r} not in domain of {name}")
        functions[name] = StructuralFunction.constant(name, value)
    label = ",".join(f"{n}={v}" for n, v in pairs)
    return Scm(sig, functions, model.exo_dist, f"{model.id}[{label}]")


# -- formulas -----------------------------------------------------------------


class Formula:
    """Base class for Boolean formulas with interventional modalities."""

    def variables(self) -> frozenset[str]:
        raise NotImplementedError


@dataclass(frozen=True)
class Literal(Formula):
    """``X=x``, or the coarse event ``X in {x1, x2, ...}`` when several values are given."""

    variable: str
    values: tuple[Value, ...]

    def __post_init__(self):
        if not self.values:
            raise BadDomain(f"literal on {self.variable} has no values")

    @classmethod
    def eq(cls, variable: str, value: Value) -> "Literal":
        return cls(variable, (value,))

    @property
    def is_point(self) -> bool:
        return len(self.values) == 1

    @property
    def value(self) -> Value:
        if not self.is_point:
            raise ValueError(f"{self} is a set-valued literal")
        return self.values[0]

    def holds(self, value: Value) -> bool:
        return value in self.values

    def variables(self) -> frozenset[str]:
        return frozenset((self.variable,))

    def __str__(self) -> str:
        if self.is_point:
            return f"{self.variable}={self.values[0]}"
        return f"{self.variable} in {{{', '.join(str(v) for v in self.values)}}}"


@dataclass(frozen=True)
class Truth(Formula):
    value: bool = True

    def variables(self) -> frozenset[str]:
        return frozenset()

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def variables(self) -> frozenset[str]:
        return self.body.variables()

    def __str__(self) -> str:
        return f"not {_wrap(self.body)}"


@dataclass(frozen=True)
class And(Formula):
    parts: tuple[Formula, ...]

    def variables(self) -> frozenset[str]:
        return frozenset().union(*(p.variables() for p in self.parts))

    def __str__(self) -> str:
        return " and ".join(_wrap(p) for p in self.parts) if self.parts else "true"


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple[Formula, ...]

    def variables(self) -> frozenset[str]:
        return frozenset().union(*(p.variables() for p in self.parts))

    def __str__(self) -> str:
        return " or ".join(_wrap(p) for p in self.parts) if self.parts else "false"


@dataclass(frozen=True)
class Intervened(Formula):
    """``[X1=x1, ..., Xn=xn] body``: body holds after the intervention."""

    assignment: tuple[Literal, ...]
    body: Formula

    def __post_init__(self):
        names = [lit.variable for lit in self.assignment]
        if len(set(names)) != len(names):
            raise ValueError(f"intervention mentions a variable twice: {names}")
        if any(not lit.is_point for lit in self.assignment):
            raise ValueError("interventions need point values")

    def variables(self) -> frozenset[str]:
        return self.body.variables() | {lit.variable for lit in self.assignment}

    def __str__(self) -> str:
        return f"[{', '.join(str(l) for l in self.assignment)}] {_wrap(self.body)}"


TRUE = Truth(True)
FALSE = Truth(False)


def _wrap(phi: Formula) -> str:
    if isinstance(phi, (And, Or)) and len(phi.parts) > 1:
        return f"({phi})"
    return str(phi)


def conjunction(literals: Iterable[Literal]) -> Formula:
    parts = tuple(literals)
    return parts[0] if len(parts) == 1 else And(parts)


def check_variables(signature: VariableSignature, phi: Formula) -> None:
    for name in phi.variables():
        var = signature.variable(name)
        if isinstance(phi, Literal):
            for value in phi.values:
                if value not in var.domain:
                    raise BadDomain(f"value {value!r} not in domain of {name}")


def satisfies(model: Scm, context: Context, phi: Formula) -> bool:
    """Decide ``(model, context) |= phi``."""
    sig = model.signature
    for name in phi.variables():
        sig.variable(name)
    return _sat(model, context, phi, None)


def _sat(model: Scm, context: Context, phi: Formula, solved: dict | None) -> bool:
    if isinstance(phi, Literal):
        if phi.variable in context:
            return phi.holds(context[phi.variable])
        if solved is None:
            solved = evaluate(model, context)
        return phi.holds(solved[phi.variable])
    if isinstance(phi, Truth):
        return phi.value
    if isinstance(phi, Not):
        return not _sat(model, context, phi.body, solved)
    if isinstance(phi, (And, Or)):
        if solved is None and phi.variables() - set(context):
            solved = evaluate(model, context)
        results = (_sat(model, context, p, solved) for p in phi.parts)
        return all(results) if isinstance(phi, And) else any(results)
    if isinstance(phi, Intervened):
        return _sat(intervene(model, phi.assignment), context, phi.body, None)
    raise TypeError(f"not a formula: {phi!r}")
