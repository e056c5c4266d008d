"""Canonical text form of a scenario syntax tree.

``parse_document(pretty_print(doc)) == doc`` for any tree the parser produces.
"""

from __future__ import annotations

import re

from cpx.scm import And, Formula, Intervened, Literal, Not, Or, Truth, Value
from cpx.scenario import ast

_BARE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def fmt_value(v: Value) -> str:
    if isinstance(v, int):
        return str(v)
    if _BARE.match(v):
        return v
    return fmt_string(v)


def fmt_string(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def fmt_values(values) -> str:
    return "{" + ", ".join(fmt_value(v) for v in values) + "}"


# -- numeric expressions --------------------------------------------------------


def fmt_num(e: ast.NumExpr) -> str:
    if isinstance(e, ast.Num):
        return "inf" if e.value == float("inf") else repr(e.value)
    if isinstance(e, ast.Ref):
        return e.name
    if isinstance(e, ast.Neg):
        return "-" + _num_atom(e.operand)
    return f"{_num_operand(e.left)} {e.op} {_num_operand(e.right)}"


def _num_atom(e: ast.NumExpr) -> str:
    if isinstance(e, (ast.Num, ast.Ref)):
        return fmt_num(e)
    return "(" + fmt_num(e) + ")"


def _num_operand(e: ast.NumExpr) -> str:
    return "(" + fmt_num(e) + ")" if isinstance(e, ast.BinOp) else fmt_num(e)


def fmt_cell(e: ast.NumExpr) -> str:
    if isinstance(e, ast.Neg):
        return "-" + _num_atom(e.operand)
    return _num_atom(e)


# -- structural expressions ---------------------------------------------------


def fmt_expr(e: ast.Expr) -> str:
    if isinstance(e, ast.EConst):
        return str(e.value) if isinstance(e.value, int) else fmt_string(e.value)
    if isinstance(e, ast.EName):
        return e.name
    if isinstance(e, ast.ECall):
        return f"{e.fn}(" + ", ".join(fmt_expr(a) for a in e.args) + ")"
    if isinstance(e, ast.ECompare):
        return f"{_expr_atom(e.left)} {e.op} {_expr_atom(e.right)}"
    if isinstance(e, ast.EMember):
        return f"{_expr_atom(e.operand)} in {fmt_values(e.values)}"
    return f"if {fmt_expr(e.cond)} then {fmt_expr(e.then)} else {fmt_expr(e.orelse)}"


def _expr_atom(e: ast.Expr) -> str:
    if isinstance(e, (ast.ECompare, ast.EMember, ast.EIf)):
        return "(" + fmt_expr(e) + ")"
    return fmt_expr(e)


# -- formulas -----------------------------------------------------------------


def fmt_literal(lit: Literal) -> str:
    if lit.is_point:
        return f"{lit.variable}={fmt_value(lit.value)}"
    return f"{lit.variable} in {fmt_values(lit.values)}"


def fmt_formula(phi: Formula) -> str:
    if isinstance(phi, Or):
        return " or ".join(
            "(" + fmt_formula(p) + ")" if isinstance(p, Or) else fmt_formula(p) for p in phi.parts
        )
    if isinstance(phi, And):
        return " and ".join(fmt_unary(p) if not isinstance(p, And) else "(" + fmt_formula(p) + ")"
                            for p in phi.parts)
    return fmt_unary(phi)


def fmt_unary(phi: Formula) -> str:
    if isinstance(phi, Literal):
        return fmt_literal(phi)
    if isinstance(phi, Truth):
        return "true" if phi.value else "false"
    if isinstance(phi, Not):
        return "not " + fmt_unary(phi.body)
    if isinstance(phi, Intervened):
        inner = ", ".join(fmt_literal(lit) for lit in phi.assignment)
        return f"[{inner}] " + fmt_unary(phi.body)
    return "(" + fmt_formula(phi) + ")"


# -- statements -----------------------------------------------------------------


def _dist_entry(entry: ast.DistEntry) -> str:
    if isinstance(entry, ast.FactorEntry):
        rows = ", ".join(f"{fmt_value(v)}: {fmt_num(p)}" for v, p in entry.table)
        return f"{entry.variable} ~ {{{rows}}}"
    rows = ", ".join(
        "(" + ", ".join(fmt_value(v) for v in key) + f"): {fmt_num(p)}" for key, p in entry.table
    )
    return f"joint {{{rows}}}"


def _decision(d: ast.DecisionDecl) -> list[str]:
    if isinstance(d, ast.ManipulationDecision):
        tail = f" of {fmt_unary(d.of)}" if d.of is not None else ""
        return [f"decision {d.name} = manipulation-game{tail}"]
    if isinstance(d, ast.MixtureDecision):
        comps = ", ".join(f"{fmt_num(w)} {name}" for w, name in d.components)
        return [f"decision {d.name} = mixture {{ {comps} }}"]
    lines = [f"decision {d.name} {{", "  actions " + ", ".join(d.actions)]
    for action, cells in d.payoffs:
        lines.append(f"  payoff {action} : " + " ".join(fmt_cell(c) for c in cells))
    lines.append("}")
    return lines


def _config_value(entry: ast.ConfigEntry) -> str:
    if isinstance(entry.value, bool):
        return "true" if entry.value else "false"
    if isinstance(entry.value, str):
        return entry.value
    return fmt_num(entry.value)


def _query(q: ast.Query) -> str:
    parts = ["query"]
    if q.sweep_param is not None:
        parts.append(f"sweep {q.sweep_param} [" + ", ".join(fmt_num(v) for v in q.sweep_grid) + "]")
    parts.append(q.kind)
    for key, value in q.options:
        parts.append(f"{key} {fmt_string(value) if key == 'message' else value}")
    return " ".join(parts)


def pretty_print(doc: ast.ScenarioDoc) -> str:
    out = [f"scenario {fmt_string(doc.name)}", ""]
    for p in doc.params:
        out.append(f"param {p.name} = {fmt_num(p.value)}")
    for v in doc.variables:
        kind = "exogenous" if v.exogenous else "endogenous"
        out.append(f"{kind} {v.name} {fmt_values(v.domain)}")
    for d in doc.distributions:
        out.append(f"distribution {d.name} {{")
        out.extend("  " + _dist_entry(e) for e in d.entries)
        out.append("}")
    for m in doc.models:
        out.append(f"model {m.name} {{")
        out.extend(f"  {a.variable} := {fmt_expr(a.expr)}" for a in m.assigns)
        out.extend("  " + _dist_entry(e) for e in m.dist_entries)
        if m.uses is not None:
            out.append(f"  uses {m.uses}")
        out.append("}")
    if doc.worlds:
        out.append("worlds {")
        for w in doc.worlds:
            ctx = ", ".join(f"{n}={fmt_value(v)}" for n, v in w.context)
            tail = f" dist {w.dist}" if w.dist is not None else ""
            out.append(f"  {w.name} = model {w.model} context ({ctx}){tail}")
        out.append("}")
    if doc.prior.kind == "weights":
        out.append("prior weights (" + ", ".join(fmt_num(x) for x in doc.prior.weights) + ")")
    else:
        out.append(f"prior {doc.prior.kind}")
    if doc.explanandum is not None:
        out.append(f"explanandum {fmt_formula(doc.explanandum)}")
    if doc.allow_unknown_fact:
        out.append("allow-unknown-fact")
    if doc.messages:
        out.append("messages {")
        for m in doc.messages:
            line = f"  {fmt_string(m.surface)} := cause (" + ", ".join(fmt_literal(x) for x in m.explanans) + ")"
            if m.of is not None:
                line += f" of {fmt_unary(m.of)}"
            if m.cost != ast.Num(0.0):
                line += f" cost {fmt_num(m.cost)}"
            out.append(line)
        out.append("}")
    s = doc.silence
    if not s.enabled:
        out.append("silence off")
    elif s != ast.SilenceDecl():
        out.append(f"silence {fmt_string(s.surface)} cost {fmt_num(s.cost)}")
    for d in doc.decisions:
        out.extend(_decision(d))
    if doc.use is not None:
        out.append(f"use {doc.use}")
    if doc.config:
        out.append("config {")
        out.extend(f"  {c.key} = {_config_value(c)}" for c in doc.config)
        out.append("}")
    out.extend(_query(q) for q in doc.queries)
    return "\n".join(out) + "\n"
