"""A tiny expression language for piecewise single- and set-valued maps.

Grammar::

    map      := "piecewise" "{" piece (";" piece)* "}"
    piece    := cond ":" (expr | setexpr)
    cond     := ("[" | "(") expr "," expr ("]" | ")")
    setexpr  := setatom ("|" setatom)*
    setatom  := "[" expr "," expr "]" | "{" expr ("," expr)* "}"
    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := "-" unary | power
    power    := atom ("^" unary)?
    atom     := number | name | func "(" expr ")" | "(" expr ")"

Functions are ``exp``, ``ln``, ``sqrt`` and ``abs``.  Condition bounds must
be constant (``1/2`` is fine).  ``∪`` is accepted as a synonym of ``|``.

Expressions evaluate elementwise on numpy arrays, so grids can be pushed
through a map in one call.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .sets import ClosedSet

FUNCTIONS = {"exp": np.exp, "ln": np.log, "sqrt": np.sqrt, "abs": np.abs}


class DSLError(ValueError):
    pass


class DSLSyntaxError(DSLError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


class CoverageError(DSLError):
    pass


class OverlapError(DSLError):
    pass


class EvaluationError(DSLError):
    pass


class DomainError(ValueError):
    """Point outside the domain of a map."""


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


@dataclass(frozen=True)
class IntervalLit:
    lo: "Node"
    hi: "Node"


@dataclass(frozen=True)
class FiniteSetLit:
    items: Tuple["Node", ...]


@dataclass(frozen=True)
class SetUnion:
    items: Tuple["Node", ...]


Node = Union[Num, Var, Neg, BinOp, Call, IntervalLit, FiniteSetLit, SetUnion]
SET_NODES = (IntervalLit, FiniteSetLit, SetUnion)


def to_text(node: Node) -> str:
    """Fully parenthesized source text; parsing it gives back ``node``."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, IntervalLit):
        return f"[{to_text(node.lo)}, {to_text(node.hi)}]"
    if isinstance(node, FiniteSetLit):
        return "{" + ", ".join(to_text(i) for i in node.items) + "}"
    if isinstance(node, SetUnion):
        return " | ".join(to_text(i) for i in node.items)
    raise TypeError(f"not an AST node: {node!r}")


# ---------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()\[\]{},;:|∪])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group()
            if val == "∪":
                val = "|"
            toks.append((kind, val, pos))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.variables = tuple(variables)

    # helpers
    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise DSLSyntaxError(msg, tok[2], self.text)

    def expect(self, val):
        tok = self.next()
        if tok[1] != val:
            self.error(f"expected {val!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def at_end(self):
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")

    # grammar
    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.next()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.next()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.next()
            return Neg(self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek()[1] == "^":
            self.next()
            node = BinOp("^", node, self.unary())
        return node

    def atom(self):
        kind, val, _ = tok = self.next()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            if val not in self.variables:
                allowed = ", ".join(self.variables) or "none"
                self.error(f"unknown name {val!r} (variables: {allowed})", tok)
            return Var(val)
        if val == "(":
            node = self.expr()
            self.expect(")")
            return node
        self.error(f"unexpected {val or 'end of input'!r}", tok)

    def setexpr(self):
        items = [self.setatom()]
        while self.peek()[1] == "|":
            self.next()
            items.append(self.setatom())
        return items[0] if len(items) == 1 else SetUnion(tuple(items))

    def setatom(self):
        tok = self.next()
        if tok[1] == "[":
            lo = self.expr()
            self.expect(",")
            hi = self.expr()
            self.expect("]")
            return IntervalLit(lo, hi)
        if tok[1] == "{":
            items = [self.expr()]
            while self.peek()[1] == ",":
                self.next()
                items.append(self.expr())
            self.expect("}")
            return FiniteSetLit(tuple(items))
        self.error("expected a set literal '[a, b]' or '{a, ...}'", tok)

    def value(self, want_set):
        if want_set is None:
            want_set = self.peek()[1] in ("[", "{")
        return self.setexpr() if want_set else self.expr()

    def constant(self):
        tok = self.peek()
        saved, self.variables = self.variables, ()
        try:
            node = self.expr()
        finally:
            self.variables = saved
        val = float(evaluate(node, {}))
        if not math.isfinite(val):
            self.error("condition bound is not finite", tok)
        return val

    def condition(self):
        tok = self.next()
        if tok[1] not in ("[", "("):
            self.error("expected '[' or '(' to open a condition interval", tok)
        lo = self.constant()
        self.expect(",")
        hi = self.constant()
        close = self.next()
        if close[1] not in ("]", ")"):
            self.error("expected ']' or ')' to close a condition interval", close)
        return Condition(lo, hi, tok[1] == "[", close[1] == "]")

    def piecewise(self, want_set):
        tok = self.next()
        if tok[1] != "piecewise":
            self.error("expected 'piecewise'", tok)
        self.expect("{")
        pieces = []
        while True:
            cond = self.condition()
            self.expect(":")
            pieces.append((cond, self.value(want_set)))
            if self.peek()[1] == ";":
                self.next()
                continue
            break
        self.expect("}")
        self.at_end()
        return pieces


def parse_node(text: str, variables: Sequence[str] = ("x",), kind: Optional[str] = None) -> Node:
    """Parse a bare expression.  ``kind`` is "scalar", "set" or None (auto)."""
    p = _Parser(text, variables)
    node = p.value(None if kind is None else kind == "set")
    p.at_end()
    return node


# ---------------------------------------------------------------------------
# Evaluation

def evaluate(node: Node, env: Dict[str, object]):
    """Evaluate a node.  Scalar nodes give an array (or numpy scalar); set
    nodes give a list of ``(lo, hi)`` pairs, one per literal piece."""
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        return np.asarray(env[node.name], dtype=float)
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, BinOp):
        a = evaluate(node.left, env)
        b = evaluate(node.right, env)
        with np.errstate(all="ignore"):
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if node.op == "/":
                return np.divide(a, b)
            return np.power(a, b)
    if isinstance(node, Call):
        with np.errstate(all="ignore"):
            return FUNCTIONS[node.func](evaluate(node.arg, env))
    if isinstance(node, IntervalLit):
        return [(evaluate(node.lo, env), evaluate(node.hi, env))]
    if isinstance(node, FiniteSetLit):
        out = []
        for item in node.items:
            v = evaluate(item, env)
            out.append((v, v))
        return out
    if isinstance(node, SetUnion):
        out = []
        for item in node.items:
            out.extend(evaluate(item, env))
        return out
    raise TypeError(f"not an AST node: {node!r}")


def _check_pieces(pieces, where=""):
    for lo, hi in pieces:
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise EvaluationError(f"set literal has a non-finite endpoint{where}")
        if np.any(np.asarray(lo) > np.asarray(hi)):
            raise EvaluationError(f"set literal [a, b] with a > b{where}")


class Expression:
    """A parsed expression in named variables, scalar- or set-valued."""

    def __init__(self, node: Node, variables: Sequence[str]):
        self.node = node
        self.variables = tuple(variables)
        self.is_set = isinstance(node, SET_NODES)

    @classmethod
    def parse(cls, text: str, variables: Sequence[str] = ("x",), kind: Optional[str] = None):
        return cls(parse_node(text, variables, kind), variables)

    def _env(self, args, kwargs):
        env = dict(zip(self.variables, args))
        env.update(kwargs)
        missing = [v for v in self.variables if v not in env]
        if missing:
            raise TypeError(f"missing values for {missing}")
        return env

    def __call__(self, *args, **kwargs):
        """Scalar expressions return floats (or arrays for array input);
        set expressions return a :class:`ClosedSet` for scalar input."""
        env = self._env(args, kwargs)
        val = evaluate(self.node, env)
        if self.is_set:
            _check_pieces(val)
            return ClosedSet([(float(lo), float(hi)) for lo, hi in val])
        shape = np.broadcast(*[np.asarray(v) for v in env.values()]).shape if env else ()
        if shape:
            val = np.array(np.broadcast_to(val, shape), dtype=float)
        if np.ndim(val) == 0:
            val = float(val)
            if not math.isfinite(val):
                raise EvaluationError(f"{self.text} is not finite at {env}")
            return val
        if not np.all(np.isfinite(val)):
            raise EvaluationError(f"{self.text} is not finite on the given points")
        return val

    def pieces(self, *args, **kwargs):
        """Vectorized set evaluation: list of (lo, hi) broadcast arrays."""
        if not self.is_set:
            raise TypeError("pieces() needs a set-valued expression")
        env = self._env(args, kwargs)
        shape = np.broadcast(*[np.asarray(v) for v in env.values()]).shape if env else ()
        out = [(np.broadcast_to(lo, shape).astype(float), np.broadcast_to(hi, shape).astype(float))
               for lo, hi in evaluate(self.node, env)]
        _check_pieces(out)
        return out

    @property
    def text(self) -> str:
        return to_text(self.node)

    def __eq__(self, other):
        return isinstance(other, Expression) and self.node == other.node

    def __hash__(self):
        return hash(self.node)

    def __repr__(self):
        return f"Expression({self.text!r})"


def parse_expr(text: str, variables: Sequence[str] = ("x",), kind: Optional[str] = None) -> Expression:
    return Expression.parse(text, variables, kind)


def parse_expr2(text: str, variables=("x", "y")) -> Expression:
    return Expression.parse(text, variables)


def parse_expr3(text: str, variables=("x", "y", "z")) -> Expression:
    return Expression.parse(text, variables)


# ---------------------------------------------------------------------------
# Piecewise maps

@dataclass(frozen=True)
class Condition:
    """Interval with open/closed end flags."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def contains(self, x: float) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def mask(self, xs):
        xs = np.asarray(xs)
        lo_ok = xs >= self.lo if self.lo_closed else xs > self.lo
        hi_ok = xs <= self.hi if self.hi_closed else xs < self.hi
        return lo_ok & hi_ok

    def owns_left_of(self, x0: float) -> bool:
        """Contains (x0 - eps, x0) for all small eps."""
        return self.lo < x0 <= self.hi

    def owns_right_of(self, x0: float) -> bool:
        return self.lo <= x0 < self.hi

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def __str__(self):
        return "{}{!r}, {!r}{}".format(
            "[" if self.lo_closed else "(", self.lo, self.hi, "]" if self.hi_closed else ")"
        )


@dataclass(frozen=True)
class Limits:
    """One-sided limits of a map at a point; ``None`` marks a missing side."""

    left: object
    at: object
    right: object

    @property
    def has_left(self):
        return self.left is not None

    @property
    def has_right(self):
        return self.right is not None


def _validate_conditions(conds):
    for c in conds:
        if c.lo > c.hi or (c.lo == c.hi and not (c.lo_closed and c.hi_closed)):
            raise CoverageError(f"condition {c} is empty")
    order = sorted(conds, key=lambda c: (c.lo, not c.lo_closed))
    if not order[0].lo_closed:
        raise CoverageError(f"left end of {order[0]} is not covered")
    if not order[-1].hi_closed:
        raise CoverageError(f"right end of {order[-1]} is not covered")
    for a, b in zip(order, order[1:]):
        if b.lo < a.hi:
            raise OverlapError(f"conditions {a} and {b} overlap")
        if b.lo == a.hi:
            if a.hi_closed and b.lo_closed:
                raise OverlapError(f"conditions {a} and {b} both own {a.hi!r}")
            if not (a.hi_closed or b.lo_closed):
                raise CoverageError(f"point {a.hi!r} between {a} and {b} is not covered")
        elif not (a.hi_closed and b.lo_closed):
            raise CoverageError(f"open end between {a} and {b} is not covered")


class _Piecewise:
    _set_valued = False
    VALIDATION_POINTS = 101

    def __init__(self, pieces):
        pieces = tuple(pieces)
        if not pieces:
            raise CoverageError("a piecewise map needs at least one piece")
        _validate_conditions([c for c, _ in pieces])
        self.pieces = tuple((c, e if isinstance(e, Expression) else Expression(e, ("x",)))
                            for c, e in pieces)
        for c, e in self.pieces:
            if e.is_set != self._set_valued:
                want = "set" if self._set_valued else "scalar"
                raise DSLError(f"piece {c} must be {want}-valued")
        self.domain = ClosedSet([(c.lo, c.hi) for c, _ in self.pieces])
        self._validate_values()

    def _validate_values(self):
        for c, e in self.pieces:
            xs = np.linspace(c.lo, c.hi, 1 if c.is_point else self.VALIDATION_POINTS)
            try:
                if self._set_valued:
                    e.pieces(x=xs)
                else:
                    e(x=xs)
            except EvaluationError as exc:
                raise EvaluationError(f"piece {c}: {exc}") from None

    @classmethod
    def parse(cls, text: str):
        return cls(_Parser(text, ("x",)).piecewise(cls._set_valued))

    @property
    def breakpoints(self) -> list:
        return sorted({v for c, _ in self.pieces for v in (c.lo, c.hi)})

    def piece_at(self, x: float):
        for c, e in self.pieces:
            if c.contains(x):
                return c, e
        raise DomainError(f"{x!r} is outside the domain {self.domain}")

    def __call__(self, x: float):
        return self.piece_at(float(x))[1](x=float(x))

    def limits(self, x0: float) -> Limits:
        """Limits from the left, value at, and limit from the right of x0.

        Expressions are continuous on the closure of their condition, so a
        one-sided limit is the adjacent piece's expression evaluated at x0.
        """
        x0 = float(x0)
        _, at_expr = self.piece_at(x0)
        left = right = None
        for c, e in self.pieces:
            if c.owns_left_of(x0):
                left = e(x=x0)
            if c.owns_right_of(x0):
                right = e(x=x0)
        return Limits(left, at_expr(x=x0), right)

    def to_text(self) -> str:
        body = " ; ".join(f"{c}: {to_text(e.node)}" for c, e in self.pieces)
        return f"piecewise{{ {body} }}"

    def __eq__(self, other):
        return type(self) is type(other) and self.pieces == other.pieces

    def __hash__(self):
        return hash(self.pieces)

    def __repr__(self):
        return f"{type(self).__name__}({self.to_text()!r})"


class PiecewiseMap(_Piecewise):
    """Single-valued map f: X -> R given by expression pieces in ``x``."""

    def evaluate_many(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        out = np.full(xs.shape, np.nan)
        for c, e in self.pieces:
            m = c.mask(xs)
            if np.any(m):
                out[m] = e(x=xs[m])
        if np.any(np.isnan(out)):
            bad = xs[np.isnan(out)][0]
            raise DomainError(f"{bad!r} is outside the domain {self.domain}")
        return out


class PiecewiseSetMap(_Piecewise):
    """Multi-valued map T: X -> CB(R) given by set-literal pieces in ``x``."""

    _set_valued = True

    @property
    def is_singleton_valued(self) -> bool:
        return all(
            isinstance(e.node, FiniteSetLit) and len(e.node.items) == 1 for _, e in self.pieces
        )


def parse_single(text: str) -> PiecewiseMap:
    return PiecewiseMap.parse(text)


def parse_multi(text: str) -> PiecewiseSetMap:
    return PiecewiseSetMap.parse(text)


def eval_single(fmap: PiecewiseMap, x: float) -> float:
    return fmap(x)


def eval_multi(tmap: PiecewiseSetMap, x: float) -> ClosedSet:
    return tmap(x)


def one_sided_limits(fmap, x0: float) -> Limits:
    return fmap.limits(x0)
