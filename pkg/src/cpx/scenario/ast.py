"""Syntax tree of a scenario file.

Nodes keep the source text's structure (not compiled tables) so that a
document can be printed back and re-parsed to an equal tree. Source positions
are carried for diagnostics but ignored by equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from cpx.scm import Formula, Literal, Value

Pos = Optional[tuple[int, int]]


def _pos():
    return field(default=None, compare=False, repr=False)


# -- numeric expressions (params, probabilities, payoffs, costs) --------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Ref:
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Neg:
    operand: "NumExpr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "NumExpr"
    right: "NumExpr"


NumExpr = Union[Num, Ref, Neg, BinOp]


# -- structural-function expressions ------------------------------------------


@dataclass(frozen=True)
class EConst:
    value: Value


@dataclass(frozen=True)
class EName:
    """A variable reference or a symbolic value; resolved at compile time."""

    name: str


@dataclass(frozen=True)
class ECall:
    fn: str
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class ECompare:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class EMember:
    operand: "Expr"
    values: tuple[Value, ...]


@dataclass(frozen=True)
class EIf:
    cond: "Expr"
    then: "Expr"
    orelse: "Expr"


Expr = Union[EConst, EName, ECall, ECompare, EMember, EIf]


# -- declarations --------------------------------------------------------------


@dataclass(frozen=True)
class ParamDecl:
    name: str
    value: NumExpr
    pos: Pos = _pos()


@dataclass(frozen=True)
class VarDecl:
    name: str
    domain: tuple[Value, ...]
    exogenous: bool
    pos: Pos = _pos()


@dataclass(frozen=True)
class FactorEntry:
    """``U ~ {v: p, ...}``"""

    variable: str
    table: tuple[tuple[Value, NumExpr], ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class JointEntry:
    """``joint {(v1, v2): p, ...}``"""

    table: tuple[tuple[tuple[Value, ...], NumExpr], ...]
    pos: Pos = _pos()


DistEntry = Union[FactorEntry, JointEntry]


@dataclass(frozen=True)
class DistDecl:
    name: str
    entries: tuple[DistEntry, ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class Assign:
    variable: str
    expr: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class ModelDecl:
    name: str
    assigns: tuple[Assign, ...]
    dist_entries: tuple[DistEntry, ...] = ()
    uses: Optional[str] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class WorldDecl:
    name: str
    model: str
    context: tuple[tuple[str, Value], ...]
    dist: Optional[str] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class PriorSpec:
    kind: str  # uniform | from-exogenous | weights
    weights: tuple[NumExpr, ...] = ()
    pos: Pos = _pos()


@dataclass(frozen=True)
class MessageDecl:
    surface: str
    explanans: tuple[Literal, ...]
    of: Optional[Formula] = None
    cost: NumExpr = Num(0.0)
    pos: Pos = _pos()


@dataclass(frozen=True)
class SilenceDecl:
    enabled: bool = True
    surface: str = "(silence)"
    cost: NumExpr = Num(0.0)
    pos: Pos = _pos()


@dataclass(frozen=True)
class TableDecision:
    name: str
    actions: tuple[str, ...]
    payoffs: tuple[tuple[str, tuple[NumExpr, ...]], ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class ManipulationDecision:
    name: str
    of: Optional[Formula] = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class MixtureDecision:
    name: str
    components: tuple[tuple[NumExpr, str], ...]
    pos: Pos = _pos()


DecisionDecl = Union[TableDecision, ManipulationDecision, MixtureDecision]


@dataclass(frozen=True)
class ConfigEntry:
    key: str
    value: Union[NumExpr, str, bool]
    pos: Pos = _pos()


@dataclass(frozen=True)
class Query:
    kind: str
    options: tuple[tuple[str, object], ...] = ()
    sweep_param: Optional[str] = None
    sweep_grid: tuple[NumExpr, ...] = ()
    pos: Pos = _pos()

    def option(self, key, default=None):
        for k, v in self.options:
            if k == key:
                return v
        return default


@dataclass(frozen=True)
class ScenarioDoc:
    name: str
    params: tuple[ParamDecl, ...] = ()
    variables: tuple[VarDecl, ...] = ()
    distributions: tuple[DistDecl, ...] = ()
    models: tuple[ModelDecl, ...] = ()
    worlds: tuple[WorldDecl, ...] = ()
    prior: PriorSpec = PriorSpec("uniform")
    explanandum: Optional[Formula] = None
    allow_unknown_fact: bool = False
    messages: tuple[MessageDecl, ...] = ()
    silence: SilenceDecl = SilenceDecl()
    decisions: tuple[DecisionDecl, ...] = ()
    use: Optional[str] = None
    config: tuple[ConfigEntry, ...] = ()
    queries: tuple[Query, ...] = ()
