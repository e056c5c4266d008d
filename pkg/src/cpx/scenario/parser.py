"""Lexer and recursive-descent parser for ``.scn`` scenario files."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from cpx.errors import ScenarioSyntaxError
from cpx.scm import FALSE, TRUE, And, Formula, Intervened, Literal, Not, Or, Value
from cpx.scenario import ast

HYPHEN_WORDS = (
    "allow-unknown-fact",
    "goodness-net-of-cost",
    "manipulation-game",
    "from-exogenous",
    "tie-tolerance",
    "contingency-min",
    "cause-def",
    "max-size",
    "beta-pl",
    "beta-l",
    "beta-s",
)

QUERY_KINDS = (
    "eval", "causes", "denotation", "l0", "policy", "utility", "speaker",
    "pl", "goodness", "redundancy", "hp", "payoff",
)
QUERY_OPTIONS = ("world", "decision", "max-size", "variant", "message")
CONFIG_KEYS = ("beta-l", "beta-s", "beta-pl", "cause-def", "tie-tolerance", "goodness-net-of-cost")
SWEEPABLE_BUILTINS = ("beta-l", "beta-s", "beta-pl")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<word>(?:"""
    + "|".join(re.escape(w) for w in HYPHEN_WORDS)
    + r""")(?![A-Za-z0-9_-])|[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>:=|==|!=|[{}()\[\],:=+\-*/~])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # string | number | word | op | eof
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ScenarioSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


def _unquote(text: str) -> str:
    body = text[1:-1]
    return re.sub(r"\\(.)", r"\1", body)


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    # -- token helpers --------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def error(self, expected: str, tok: Token | None = None) -> ScenarioSyntaxError:
        tok = tok or self.tok
        found = "end of file" if tok.kind == "eof" else repr(tok.text)
        return ScenarioSyntaxError(f"expected {expected}, found {found}", tok.line, tok.column)

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("word", "op") and self.tok.text in texts

    def accept(self, *texts: str) -> Optional[Token]:
        if self.at(*texts):
            tok = self.tok
            self.i += 1
            return tok
        return None

    def expect(self, *texts: str) -> Token:
        tok = self.accept(*texts)
        if tok is None:
            raise self.error(" or ".join(repr(t) for t in texts))
        return tok

    def name(self, what: str = "a name") -> str:
        if self.tok.kind != "word":
            raise self.error(what)
        text = self.tok.text
        self.i += 1
        return text

    def string(self, what: str = "a quoted string") -> str:
        if self.tok.kind != "string":
            raise self.error(what)
        text = _unquote(self.tok.text)
        self.i += 1
        return text

    def pos(self) -> tuple[int, int]:
        return (self.tok.line, self.tok.column)

    # -- values and numbers ---------------------------------------------------

    def value(self) -> Value:
        tok = self.tok
        if tok.kind == "number" and re.fullmatch(r"\d+", tok.text):
            self.i += 1
            return int(tok.text)
        if tok.kind == "word":
            self.i += 1
            return tok.text
        if tok.kind == "string":
            self.i += 1
            return _unquote(tok.text)
        raise self.error("a value (integer, name, or quoted string)")

    def value_set(self) -> tuple[Value, ...]:
        self.expect("{")
        values = [self.value()]
        while self.accept(","):
            values.append(self.value())
        self.expect("}")
        return tuple(values)

    def number(self) -> float:
        neg = bool(self.accept("-"))
        if self.tok.kind == "number":
            v = float(self.tok.text)
        elif self.at("inf"):
            v = float("inf")
        else:
            raise self.error("a number")
        self.i += 1
        return -v if neg else v

    def num_expr(self) -> ast.NumExpr:
        left = self.num_term()
        while self.at("+", "-"):
            op = self.tok.text
            self.i += 1
            left = ast.BinOp(op, left, self.num_term())
        return left

    def num_term(self) -> ast.NumExpr:
        left = self.num_factor()
        while self.at("*", "/"):
            op = self.tok.text
            self.i += 1
            left = ast.BinOp(op, left, self.num_factor())
        return left

    def num_factor(self) -> ast.NumExpr:
        if self.accept("-"):
            return ast.Neg(self.num_factor())
        return self.num_atom()

    def num_atom(self) -> ast.NumExpr:
        tok = self.tok
        if tok.kind == "number":
            self.i += 1
            return ast.Num(float(tok.text))
        if self.accept("inf"):
            return ast.Num(float("inf"))
        if self.accept("("):
            inner = self.num_expr()
            self.expect(")")
            return inner
        if tok.kind == "word":
            self.i += 1
            return ast.Ref(tok.text, (tok.line, tok.column))
        raise self.error("a number, parameter name, or '('")

    def cell(self) -> ast.NumExpr:
        """A payoff cell: signed atom, so that ``0 -1 1`` reads as three cells."""
        if self.accept("-"):
            return ast.Neg(self.num_atom())
        return self.num_atom()

    # -- structural expressions -----------------------------------------------

    def expr(self) -> ast.Expr:
        if self.accept("if"):
            cond = self.expr()
            self.expect("then")
            then = self.expr()
            self.expect("else")
            return ast.EIf(cond, then, self.expr())
        left = self.expr_atom()
        if self.at("==", "!="):
            op = self.tok.text
            self.i += 1
            return ast.ECompare(op, left, self.expr_atom())
        if self.accept("in"):
            return ast.EMember(left, self.value_set())
        return left

    def expr_atom(self) -> ast.Expr:
        tok = self.tok
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        if tok.kind == "word" and tok.text in ("min", "max", "not") and self.peek().text == "(":
            self.i += 2
            args = [self.expr()]
            while self.accept(","):
                args.append(self.expr())
            self.expect(")")
            return ast.ECall(tok.text, tuple(args))
        if tok.kind == "word":
            self.i += 1
            return ast.EName(tok.text)
        if tok.kind == "number" and re.fullmatch(r"\d+", tok.text):
            self.i += 1
            return ast.EConst(int(tok.text))
        if tok.kind == "string":
            self.i += 1
            return ast.EConst(_unquote(tok.text))
        raise self.error("an expression")

    # -- formulas ---------------------------------------------------------------

    def formula(self) -> Formula:
        parts = [self.conjunct()]
        while self.accept("or"):
            parts.append(self.conjunct())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunct(self) -> Formula:
        parts = [self.unary()]
        while self.accept("and"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        if self.accept("not"):
            return Not(self.unary())
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if self.accept("["):
            assignment = [self.literal(point=True)]
            while self.accept(","):
                assignment.append(self.literal(point=True))
            self.expect("]")
            return Intervened(tuple(assignment), self.unary())
        if self.accept("("):
            inner = self.formula()
            self.expect(")")
            return inner
        return self.literal()

    def literal(self, point: bool = False) -> Literal:
        name = self.name("a variable name")
        if not point and self.accept("in"):
            return Literal(name, self.value_set())
        self.expect("=")
        return Literal.eq(name, self.value())

    def literal_list(self) -> tuple[Literal, ...]:
        self.expect("(")
        lits = [self.literal()]
        while self.accept(","):
            lits.append(self.literal())
        self.expect(")")
        return tuple(lits)

    # -- blocks -------------------------------------------------------------------

    def dist_entry(self) -> ast.DistEntry:
        pos = self.pos()
        if self.accept("joint"):
            self.expect("{")
            rows = []
            while not self.accept("}"):
                self.expect("(")
                key = [self.value()]
                while self.accept(","):
                    key.append(self.value())
                self.expect(")")
                self.expect(":")
                rows.append((tuple(key), self.num_expr()))
                self.accept(",")
            return ast.JointEntry(tuple(rows), pos)
        var = self.name("an exogenous variable")
        self.expect("~")
        self.expect("{")
        rows = []
        while not self.accept("}"):
            v = self.value()
            self.expect(":")
            rows.append((v, self.num_expr()))
            self.accept(",")
        return ast.FactorEntry(var, tuple(rows), pos)

    def distribution(self) -> ast.DistDecl:
        pos = self.pos()
        name = self.name("a distribution name")
        self.expect("{")
        entries = []
        while not self.accept("}"):
            entries.append(self.dist_entry())
        return ast.DistDecl(name, tuple(entries), pos)

    def model(self) -> ast.ModelDecl:
        pos = self.pos()
        name = self.name("a model name")
        self.expect("{")
        assigns, entries, uses = [], [], None
        while not self.accept("}"):
            if self.at("joint") or (self.tok.kind == "word" and self.peek().text == "~"):
                entries.append(self.dist_entry())
            elif self.accept("uses"):
                uses = self.name("a distribution name")
            else:
                apos = self.pos()
                var = self.name("an assignment 'X := expr'")
                self.expect(":=")
                assigns.append(ast.Assign(var, self.expr(), apos))
        return ast.ModelDecl(name, tuple(assigns), tuple(entries), uses, pos)

    def worlds(self) -> list[ast.WorldDecl]:
        self.expect("{")
        worlds = []
        while not self.accept("}"):
            pos = self.pos()
            name = self.name("a world name")
            self.expect("=")
            self.expect("model")
            model = self.name("a model name")
            self.expect("context")
            self.expect("(")
            context = []
            if not self.at(")"):
                while True:
                    var = self.name("an exogenous variable")
                    self.expect("=")
                    context.append((var, self.value()))
                    if not self.accept(","):
                        break
            self.expect(")")
            dist = self.name("a distribution name") if self.accept("dist") else None
            worlds.append(ast.WorldDecl(name, model, tuple(context), dist, pos))
        return worlds

    def prior(self) -> ast.PriorSpec:
        pos = self.pos()
        if self.accept("uniform"):
            return ast.PriorSpec("uniform", (), pos)
        if self.accept("from-exogenous"):
            return ast.PriorSpec("from-exogenous", (), pos)
        if self.accept("weights"):
            self.expect("(")
            weights = [self.num_expr()]
            while self.accept(","):
                weights.append(self.num_expr())
            self.expect(")")
            return ast.PriorSpec("weights", tuple(weights), pos)
        raise self.error("'uniform', 'from-exogenous' or 'weights'")

    def messages(self) -> list[ast.MessageDecl]:
        self.expect("{")
        out = []
        while not self.accept("}"):
            pos = self.pos()
            surface = self.string("a quoted message surface")
            self.expect(":=")
            self.expect("cause")
            explanans = self.literal_list()
            of = None
            if self.accept("of"):
                of = self.unary()
            cost = ast.Num(0.0)
            if self.accept("cost"):
                cost = self.num_expr()
            out.append(ast.MessageDecl(surface, explanans, of, cost, pos))
        return out

    def silence(self) -> ast.SilenceDecl:
        pos = self.pos()
        if self.accept("off"):
            return ast.SilenceDecl(False, "(silence)", ast.Num(0.0), pos)
        surface = "(silence)"
        if self.tok.kind == "string":
            surface = self.string()
        cost = ast.Num(0.0)
        if self.accept("cost"):
            cost = self.num_expr()
        return ast.SilenceDecl(True, surface, cost, pos)

    def decision(self) -> ast.DecisionDecl:
        pos = self.pos()
        name = self.name("a decision name")
        if self.accept("="):
            if self.accept("manipulation-game"):
                of = self.unary() if self.accept("of") else None
                return ast.ManipulationDecision(name, of, pos)
            if self.accept("mixture"):
                self.expect("{")
                comps = [(self.num_expr(), self.name("a decision name"))]
                while self.accept(","):
                    comps.append((self.num_expr(), self.name("a decision name")))
                self.expect("}")
                return ast.MixtureDecision(name, tuple(comps), pos)
            raise self.error("'manipulation-game' or 'mixture'")
        self.expect("{")
        self.expect("actions")
        actions = [self.name("an action name")]
        while self.accept(","):
            actions.append(self.name("an action name"))
        payoffs = []
        while not self.accept("}"):
            self.expect("payoff")
            action = self.name("an action name")
            self.expect(":")
            cells = []
            while not self.at("payoff", "}"):
                if self.tok.kind == "eof":
                    raise self.error("'}'")
                cells.append(self.cell())
            payoffs.append((action, tuple(cells)))
        return ast.TableDecision(name, tuple(actions), tuple(payoffs), pos)

    def config(self) -> list[ast.ConfigEntry]:
        self.expect("{")
        out = []
        while not self.accept("}"):
            pos = self.pos()
            key = self.name("a config key")
            if key not in CONFIG_KEYS:
                raise ScenarioSyntaxError(
                    f"unknown config key {key!r} (expected one of {', '.join(CONFIG_KEYS)})",
                    *pos,
                )
            self.expect("=")
            if key == "cause-def":
                value = self.name("a cause definition")
            elif key == "goodness-net-of-cost":
                word = self.expect("true", "false").text
                value = word == "true"
            else:
                value = self.num_expr()
            out.append(ast.ConfigEntry(key, value, pos))
        return out

    def query(self) -> ast.Query:
        pos = self.pos()
        sweep_param, grid = None, ()
        if self.accept("sweep"):
            sweep_param = self.name("a parameter to sweep")
            self.expect("[")
            values = [self.num_expr()]
            while self.accept(","):
                values.append(self.num_expr())
            self.expect("]")
            grid = tuple(values)
        tok = self.tok
        if not self.at(*QUERY_KINDS):
            raise self.error("a query kind (" + ", ".join(QUERY_KINDS) + ")")
        kind = tok.text
        self.i += 1
        options = []
        while self.at(*QUERY_OPTIONS):
            key = self.tok.text
            self.i += 1
            if key == "max-size":
                if self.tok.kind != "number":
                    raise self.error("an integer")
                value = int(self.tok.text)
                self.i += 1
            elif key == "message":
                value = self.string("a quoted message surface")
            else:
                value = self.name(f"a value for {key}")
            options.append((key, value))
        return ast.Query(kind, tuple(options), sweep_param, grid, pos)

    # -- document -------------------------------------------------------------

    def document(self) -> ast.ScenarioDoc:
        self.expect("scenario")
        title = self.string("a scenario title")
        fields: dict[str, list] = {k: [] for k in (
            "params", "variables", "distributions", "models", "worlds",
            "messages", "decisions", "config", "queries",
        )}
        single: dict[str, object] = {}

        def once(key, value, tok):
            if key in single:
                raise ScenarioSyntaxError(f"duplicate '{key}' statement", tok.line, tok.column)
            single[key] = value

        while self.tok.kind != "eof":
            tok = self.tok
            if self.accept("param"):
                pos = self.pos()
                name = self.name("a parameter name")
                self.expect("=")
                fields["params"].append(ast.ParamDecl(name, self.num_expr(), pos))
            elif self.accept("exogenous", "endogenous"):
                pos = self.pos()
                name = self.name("a variable name")
                fields["variables"].append(
                    ast.VarDecl(name, self.value_set(), tok.text == "exogenous", pos)
                )
            elif self.accept("distribution"):
                fields["distributions"].append(self.distribution())
            elif self.accept("model"):
                fields["models"].append(self.model())
            elif self.accept("worlds"):
                fields["worlds"].extend(self.worlds())
            elif self.accept("prior"):
                once("prior", self.prior(), tok)
            elif self.accept("explanandum"):
                once("explanandum", self.formula(), tok)
            elif self.accept("allow-unknown-fact"):
                once("allow_unknown_fact", True, tok)
            elif self.accept("messages"):
                fields["messages"].extend(self.messages())
            elif self.accept("silence"):
                once("silence", self.silence(), tok)
            elif self.accept("decision"):
                fields["decisions"].append(self.decision())
            elif self.accept("use"):
                once("use", self.name("a decision name"), tok)
            elif self.accept("config"):
                fields["config"].extend(self.config())
            elif self.accept("query"):
                fields["queries"].append(self.query())
            else:
                raise self.error("a statement (param, exogenous, endogenous, distribution, "
                                 "model, worlds, prior, explanandum, messages, silence, "
                                 "decision, use, config, query)")
        return ast.ScenarioDoc(
            name=title,
            params=tuple(fields["params"]),
            variables=tuple(fields["variables"]),
            distributions=tuple(fields["distributions"]),
            models=tuple(fields["models"]),
            worlds=tuple(fields["worlds"]),
            prior=single.get("prior", ast.PriorSpec("uniform")),
            explanandum=single.get("explanandum"),
            allow_unknown_fact=bool(single.get("allow_unknown_fact", False)),
            messages=tuple(fields["messages"]),
            silence=single.get("silence", ast.SilenceDecl()),
            decisions=tuple(fields["decisions"]),
            use=single.get("use"),
            config=tuple(fields["config"]),
            queries=tuple(fields["queries"]),
        )


def parse_document(text: str) -> ast.ScenarioDoc:
    """Parse scenario text into a syntax tree (no name resolution)."""
    return Parser(text).document()
