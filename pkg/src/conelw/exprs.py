"""A tiny arithmetic expression language over the variables ``t`` and ``y``.

Grammar (EBNF, whitespace ignored)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = atom [ "^" unary ] ;            (* right associative *)
    atom    = number | name | name "(" args ")" | "(" expr ")" ;
    args    = expr { "," expr } ;
    number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
            | "." digits [ exponent ] ;
    name    = "t" | "y" | function name ;

Functions: exp, log, sin, cos, sqrt, abs (one argument), min, max (two),
clamp(x, lo, hi) and ramp(x, x0, x1) = clamp((x - x0)/(x1 - x0), 0, 1).

Expressions evaluate on Python floats or on numpy arrays (broadcasting).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

__all__ = [
    "Expr", "Num", "Var", "BinOp", "Neg", "Call",
    "ExprError", "ParseError", "UnknownIdentifierError", "ArityError",
    "DomainError", "parse", "evaluate", "pretty", "FUNCTIONS", "VARIABLES",
]

VARIABLES = frozenset({"t", "y"})
FUNCTIONS = {
    "exp": 1, "log": 1, "sin": 1, "cos": 1, "sqrt": 1, "abs": 1,
    "min": 2, "max": 2, "clamp": 3, "ramp": 3,
}


class ExprError(Exception):
    """Base class for all expression errors."""


class ParseError(ExprError):
    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        detail = f"{message} at byte offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class UnknownIdentifierError(ParseError):
    pass


class ArityError(ParseError):
    pass


class DomainError(ExprError):
    def __init__(self, message, subexpr):
        self.subexpr = subexpr
        super().__init__(f"{message} in '{subexpr}'")


# --- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Node = Union[Num, Var, BinOp, Neg, Call]


def pretty(node: Node) -> str:
    """Fully parenthesized rendering that re-parses to the same tree."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{pretty(node.operand)})"
    if isinstance(node, BinOp):
        return f"({pretty(node.left)} {node.op} {pretty(node.right)})"
    return f"{node.name}({', '.join(pretty(a) for a in node.args)})"


def free_vars(node: Node) -> frozenset:
    if isinstance(node, Var):
        return frozenset({node.name})
    if isinstance(node, Num):
        return frozenset()
    if isinstance(node, Neg):
        return free_vars(node.operand)
    if isinstance(node, BinOp):
        return free_vars(node.left) | free_vars(node.right)
    out = frozenset()
    for a in node.args:
        out |= free_vars(a)
    return out


# --- tokenizer and parser --------------------------------------------------

_PUNCT = set("+-*/^(),")


def _tokenize(source: str):
    """Yield (kind, text, byte_offset). kinds: num, name, punct, end."""
    tokens = []
    i, n = 0, len(source)
    byte = 0

    def width(s):
        return len(s.encode("utf-8"))

    while i < n:
        ch = source[i]
        if ch.isspace():
            byte += width(ch)
            i += 1
            continue
        start, start_byte = i, byte
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            while i < n and source[i].isdigit():
                i += 1
            if i < n and source[i] == ".":
                i += 1
                while i < n and source[i].isdigit():
                    i += 1
            if i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j].isdigit():
                    i = j
                    while i < n and source[i].isdigit():
                        i += 1
            tokens.append(("num", source[start:i], start_byte))
        elif ch.isalpha() or ch == "_":
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            tokens.append(("name", source[start:i], start_byte))
        elif ch in _PUNCT:
            i += 1
            tokens.append(("punct", ch, start_byte))
        else:
            raise ParseError(f"unexpected character {ch!r}", start_byte,
                             {"number", "name", "(", "-"})
        byte += width(source[start:i])
    tokens.append(("end", "", byte))
    return tokens


_ATOM_START = {"number", "name", "(", "-"}


class _Parser:
    def __init__(self, source):
        self.tokens = _tokenize(source)
        self.pos = 0

    @property
    def tok(self):
        return self.tokens[self.pos]

    def _is(self, text):
        kind, value, _ = self.tok
        return kind == "punct" and value == text

    def _expect(self, text, also=()):
        if not self._is(text):
            self._fail({text, *also})
        self.pos += 1

    def _fail(self, expected):
        kind, value, offset = self.tok
        what = "end of input" if kind == "end" else f"token {value!r}"
        raise ParseError(f"unexpected {what}", offset, expected)

    def parse(self):
        node = self.expr()
        if self.tok[0] != "end":
            self._fail({"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self):
        node = self.term()
        while self._is("+") or self._is("-"):
            op = self.tok[1]
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self._is("*") or self._is("/"):
            op = self.tok[1]
            self.pos += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self._is("-"):
            self.pos += 1
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self._is("^"):
            self.pos += 1
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, value, offset = self.tok
        if kind == "num":
            self.pos += 1
            return Num(float(value))
        if kind == "name":
            self.pos += 1
            if self._is("("):
                if value not in FUNCTIONS:
                    raise UnknownIdentifierError(
                        f"unknown function {value!r}", offset, FUNCTIONS)
                self.pos += 1
                args = [self.expr()]
                while self._is(","):
                    self.pos += 1
                    args.append(self.expr())
                self._expect(")", {","})
                if len(args) != FUNCTIONS[value]:
                    raise ArityError(
                        f"{value} takes {FUNCTIONS[value]} argument(s), got {len(args)}",
                        offset)
                return Call(value, tuple(args))
            if value in VARIABLES:
                return Var(value)
            if value in FUNCTIONS:
                raise ArityError(f"function {value!r} used without arguments",
                                 offset, {"("})
            raise UnknownIdentifierError(f"unknown identifier {value!r}",
                                         offset, VARIABLES)
        if self._is("("):
            self.pos += 1
            node = self.expr()
            self._expect(")")
            return node
        self._fail(_ATOM_START)


# --- evaluation ------------------------------------------------------------

def _is_array(*xs):
    return any(isinstance(x, np.ndarray) for x in xs)


def _check(bad, message, text):
    if bad is True or (bad is not False and np.any(bad)):
        raise DomainError(message, text)


def _compile(node: Node) -> Callable:
    """Turn a node into a closure ``f(t, y)`` working on floats or arrays."""
    if isinstance(node, Num):
        v = float(node.value)
        return lambda t, y: v
    if isinstance(node, Var):
        if node.name == "t":
            return lambda t, y: t
        return lambda t, y: y
    text = pretty(node)
    if isinstance(node, Neg):
        inner = _compile(node.operand)
        return lambda t, y: -inner(t, y)
    if isinstance(node, BinOp):
        left, right = _compile(node.left), _compile(node.right)
        if node.op == "+":
            return lambda t, y: left(t, y) + right(t, y)
        if node.op == "-":
            return lambda t, y: left(t, y) - right(t, y)
        if node.op == "*":
            return lambda t, y: left(t, y) * right(t, y)
        if node.op == "/":
            def div(t, y):
                a, b = left(t, y), right(t, y)
                _check(b == 0, "division by zero", text)
                return a / b
            return div

        def power(t, y):
            a, b = left(t, y), right(t, y)
            _check(np.logical_and(np.less(a, 0), np.not_equal(np.floor(b), b)),
                   "negative base with non-integer exponent", text)
            _check(np.logical_and(np.equal(a, 0), np.less(b, 0)),
                   "zero raised to a negative power", text)
            if _is_array(a, b):
                with np.errstate(over="ignore"):
                    out = np.power(np.asarray(a, float), b)
                _check(~np.isfinite(out), "overflow", text)
                return out
            try:
                return float(a) ** float(b)
            except OverflowError:
                raise DomainError("overflow", text) from None
        return power

    args = [_compile(a) for a in node.args]
    name = node.name
    if name in ("exp", "sin", "cos", "abs"):
        (f,) = args
        npf = {"exp": np.exp, "sin": np.sin, "cos": np.cos, "abs": np.abs}[name]
        mf = {"exp": math.exp, "sin": math.sin, "cos": math.cos, "abs": abs}[name]

        def unary_fn(t, y):
            x = f(t, y)
            if _is_array(x):
                with np.errstate(over="ignore"):
                    out = npf(x)
                _check(~np.isfinite(out), "overflow", text)
                return out
            try:
                return mf(x)
            except OverflowError:
                raise DomainError("overflow", text) from None
        return unary_fn
    if name == "log":
        (f,) = args

        def log(t, y):
            x = f(t, y)
            _check(x <= 0, "log of non-positive value", text)
            return np.log(x) if _is_array(x) else math.log(x)
        return log
    if name == "sqrt":
        (f,) = args

        def sqrt(t, y):
            x = f(t, y)
            _check(x < 0, "sqrt of negative value", text)
            return np.sqrt(x) if _is_array(x) else math.sqrt(x)
        return sqrt
    if name in ("min", "max"):
        f, g = args
        npf, pyf = (np.minimum, min) if name == "min" else (np.maximum, max)

        def minmax(t, y):
            a, b = f(t, y), g(t, y)
            return npf(a, b) if _is_array(a, b) else pyf(a, b)
        return minmax

    f, lo_f, hi_f = args

    def clamp(x, lo, hi):
        if _is_array(x, lo, hi):
            return np.minimum(np.maximum(x, lo), hi)
        return min(max(x, lo), hi)

    if name == "clamp":
        return lambda t, y: clamp(f(t, y), lo_f(t, y), hi_f(t, y))

    def ramp(t, y):
        x, x0, x1 = f(t, y), lo_f(t, y), hi_f(t, y)
        width = x1 - x0
        _check(width == 0, "ramp with x0 == x1", text)
        return clamp((x - x0) / width, 0.0, 1.0)
    return ramp


class Expr:
    """Parsed, immutable expression. Call it as ``e(t, y)``."""

    __slots__ = ("ast", "source", "_fn", "_vars")

    def __init__(self, ast: Node, source: str | None = None):
        object.__setattr__(self, "ast", ast)
        object.__setattr__(self, "source", source if source is not None else pretty(ast))
        object.__setattr__(self, "_fn", _compile(ast))
        object.__setattr__(self, "_vars", free_vars(ast))

    def __setattr__(self, name, value):
        raise AttributeError("Expr is immutable")

    @property
    def free_vars(self) -> frozenset:
        return self._vars

    def __call__(self, t, y=0.0):
        return evaluate(self, t, y)

    def __eq__(self, other):
        return isinstance(other, Expr) and self.ast == other.ast

    def __hash__(self):
        return hash(self.ast)

    def __repr__(self):
        return f"Expr({self.source!r})"


def parse(source: str) -> Expr:
    """Parse ``source`` into an :class:`Expr`.

    Raises :class:`ParseError` (with byte offset and expected tokens),
    :class:`UnknownIdentifierError` or :class:`ArityError`.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    return Expr(_Parser(source).parse(), source)


def evaluate(e: Expr, t, y=0.0):
    """Evaluate ``e`` at ``(t, y)``.

    Scalars in give a float out; array arguments broadcast and give an array
    of the broadcast shape (constants are expanded). Domain violations raise
    :class:`DomainError` naming the offending subexpression.
    """
    if _is_array(t, y):
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = e._fn(t, y)
        out = np.asarray(out, dtype=float)
        shape = np.broadcast(t, y).shape
        if out.shape != shape:
            out = np.broadcast_to(out, shape).copy()
        if not np.all(np.isfinite(out)):
            raise DomainError("non-finite result", e.source)
        return out
    out = float(e._fn(float(t), float(y)))
    if not math.isfinite(out):
        raise DomainError("non-finite result", e.source)
    return out
