"""Scalar function DSL: parsing, printing, and forward-mode derivatives to order 3.

The DSL describes real functions of a single parameter ``s``.  It supports
numeric literals, the constant ``pi``, the operators ``+ - * / ^`` (with
``^`` right-associative and binding tighter than unary minus), and the
functions sin, cos, tan, atan, sqrt, exp, log, abs.  The grammar is in
``docs/grammar.ebnf``.

Evaluation returns a :class:`Jet3` carrying the value and the first three
derivatives with respect to ``s``, computed by truncated-Taylor arithmetic
(no finite differencing).  Third order is enough for curve torsion, which
needs the third derivative of the position.

Exponents must be constant expressions (no ``s``); a non-integer exponent
additionally requires a positive base.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union


# ---------------------------------------------------------------------------
# errors


class ExprError(Exception):
    """Base class for DSL errors."""


class ExprSyntaxError(ExprError):
    """Malformed source text.  Carries the byte offset and expected tokens."""

    def __init__(self, message: str, offset: int, expected=()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += " (expected: " + ", ".join(self.expected) + ")"
        super().__init__(detail)


class UnknownIdentifierError(ExprSyntaxError):
    """Identifier other than `s`, `pi`, or a known function name."""


class ExprDomainError(ExprError):
    """Evaluation left the real domain (log of nonpositive, zero divide, ...)."""

    def __init__(self, message: str, subexpr: "Expr | None" = None):
        self.subexpr = subexpr
        if subexpr is not None:
            message = f"{message} in '{to_string(subexpr)}'"
        super().__init__(message)


# ---------------------------------------------------------------------------
# jets


@dataclass(frozen=True, slots=True)
class Jet3:
    """Value and derivatives of orders 1..3 of a scalar function at a point."""

    value: float
    d1: float = 0.0
    d2: float = 0.0
    d3: float = 0.0

    @staticmethod
    def constant(v: float) -> "Jet3":
        return Jet3(float(v))

    @staticmethod
    def variable(v: float) -> "Jet3":
        return Jet3(float(v), 1.0)

    def __add__(self, other):
        o = _as_jet(other)
        return Jet3(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2, self.d3 + o.d3)

    __radd__ = __add__

    def __neg__(self):
        return Jet3(-self.value, -self.d1, -self.d2, -self.d3)

    def __sub__(self, other):
        return self + (-_as_jet(other))

    def __rsub__(self, other):
        return _as_jet(other) + (-self)

    def __mul__(self, other):
        o = _as_jet(other)
        a, b = self, o
        return Jet3(
            a.value * b.value,
            a.d1 * b.value + a.value * b.d1,
            a.d2 * b.value + 2.0 * a.d1 * b.d1 + a.value * b.d2,
            a.d3 * b.value + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.value * b.d3,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_jet(other)
        if o.value == 0.0:
            raise ExprDomainError("division by zero")
        return self * _reciprocal(o)

    def __rtruediv__(self, other):
        if self.value == 0.0:
            raise ExprDomainError("division by zero")
        return _as_jet(other) * _reciprocal(self)


def _as_jet(x) -> Jet3:
    if isinstance(x, Jet3):
        return x
    return Jet3.constant(x)


def compose(g: Jet3, f0: float, f1: float, f2: float, f3: float) -> Jet3:
    """Chain rule for f(g) given the derivatives of f at g.value."""
    return Jet3(
        f0,
        f1 * g.d1,
        f1 * g.d2 + f2 * g.d1 * g.d1,
        f1 * g.d3 + 3.0 * f2 * g.d1 * g.d2 + f3 * g.d1 ** 3,
    )


def _reciprocal(g: Jet3) -> Jet3:
    x = g.value
    return compose(g, 1.0 / x, -1.0 / x ** 2, 2.0 / x ** 3, -6.0 / x ** 4)


# ---------------------------------------------------------------------------
# syntax tree


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    """The parameter ``s``."""


@dataclass(frozen=True)
class Pi:
    """The constant pi."""


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Pi, Neg, BinOp, Call]

FUNCTIONS = ("sin", "cos", "tan", "atan", "sqrt", "exp", "log", "abs")


def contains_var(e: Expr) -> bool:
    match e:
        case Var():
            return True
        case Neg(operand):
            return contains_var(operand)
        case BinOp(_, left, right):
            return contains_var(left) or contains_var(right)
        case Call(_, arg):
            return contains_var(arg)
        case _:
            return False


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            # skip leading whitespace before reporting
            stripped = len(text) - len(text[pos:].lstrip())
            if stripped >= len(text):
                break
            raise ExprSyntaxError(f"unexpected character {text[stripped]!r}", stripped)
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        elif m.group("op") is not None:
            tokens.append(("op", m.group("op"), m.start("op")))
        else:  # pure whitespace tail
            break
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, off = self.peek()
        if kind == "op" and val == op:
            return self.advance()
        raise ExprSyntaxError(f"unexpected {val!r}" if val else "unexpected end of input",
                              off, expected=(repr(op),))

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {val!r}", off,
                                  expected=("operator", "end of input"))
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                e = BinOp(val, e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                e = BinOp(val, e, self.factor())
            else:
                return e

    def factor(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, val, off = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            exponent = self.factor()
            if contains_var(exponent):
                raise ExprSyntaxError("exponent must be a constant expression", off)
            return BinOp("^", base, exponent)
        return base

    def atom(self) -> Expr:
        kind, val, off = self.advance()
        if kind == "num":
            return Num(float(val))
        if kind == "ident":
            if val == "s":
                return Var()
            if val == "pi":
                return Pi()
            if val in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(val, arg)
            raise UnknownIdentifierError(
                f"unknown identifier {val!r}", off,
                expected=("s", "pi") + FUNCTIONS)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ExprSyntaxError(
            f"unexpected {val!r}" if val else "unexpected end of input", off,
            expected=("number", "identifier", "'('", "'-'"))


def parse(text: str) -> Expr:
    """Parse DSL source text into a syntax tree."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e: Expr) -> int:
    match e:
        case BinOp("+" | "-", _, _):
            return _PREC_ADD
        case BinOp("*" | "/", _, _):
            return _PREC_MUL
        case BinOp("^", _, _):
            return _PREC_POW
        case Neg(_):
            return _PREC_NEG
        case Num(v) if v < 0:
            return _PREC_NEG
        case _:
            return _PREC_ATOM


def _wrap(e: Expr, min_prec: int) -> str:
    s = to_string(e)
    if _prec(e) < min_prec:
        return "(" + s + ")"
    return s


def to_string(e: Expr) -> str:
    """Print a tree so that re-parsing reproduces it structurally."""
    match e:
        case Num(v):
            return repr(v) if v >= 0 else "-" + repr(-v)
        case Var():
            return "s"
        case Pi():
            return "pi"
        case Neg(operand):
            return "-" + _wrap(operand, _PREC_NEG)
        case BinOp("+" as op, left, right) | BinOp("-" as op, left, right):
            return _wrap(left, _PREC_ADD) + op + _wrap(right, _PREC_ADD + 1)
        case BinOp("*" as op, left, right) | BinOp("/" as op, left, right):
            return _wrap(left, _PREC_MUL) + op + _wrap(right, _PREC_MUL + 1)
        case BinOp("^", left, right):
            return _wrap(left, _PREC_ATOM) + "^" + _wrap(right, _PREC_NEG)
        case Call(func, arg):
            return f"{func}({to_string(arg)})"
    raise TypeError(f"not an Expr node: {e!r}")


# ---------------------------------------------------------------------------
# evaluation


def _falling_pow(g: Jet3, p: float, node: Expr) -> Jet3:
    x = g.value
    if x < 0 and p != round(p):
        raise ExprDomainError("negative base with non-integer exponent", node)
    fs = []
    coef = 1.0
    for k in range(4):
        if k:
            coef *= p - (k - 1)
        if coef == 0.0:
            fs.append(0.0)
            continue
        q = p - k
        if x == 0.0:
            if q < 0:
                raise ExprDomainError("zero base with negative exponent", node)
            fs.append(coef if q == 0 else 0.0)
        else:
            fs.append(coef * x ** q)
    return compose(g, *fs)


def _eval_call(name: str, g: Jet3, node: Expr) -> Jet3:
    x = g.value
    if name == "sin":
        s, c = math.sin(x), math.cos(x)
        return compose(g, s, c, -s, -c)
    if name == "cos":
        s, c = math.sin(x), math.cos(x)
        return compose(g, c, -s, -c, s)
    if name == "tan":
        t = math.tan(x)
        sec2 = 1.0 + t * t
        return compose(g, t, sec2, 2.0 * t * sec2, 2.0 * sec2 * (1.0 + 3.0 * t * t))
    if name == "atan":
        d = 1.0 + x * x
        return compose(g, math.atan(x), 1.0 / d, -2.0 * x / d ** 2,
                       (6.0 * x * x - 2.0) / d ** 3)
    if name == "sqrt":
        if x <= 0.0:
            raise ExprDomainError("sqrt needs a positive argument for differentiation",
                                  node)
        r = math.sqrt(x)
        return compose(g, r, 0.5 / r, -0.25 / (x * r), 0.375 / (x * x * r))
    if name == "exp":
        v = math.exp(x)
        return compose(g, v, v, v, v)
    if name == "log":
        if x <= 0.0:
            raise ExprDomainError("log of a non-positive value", node)
        return compose(g, math.log(x), 1.0 / x, -1.0 / x ** 2, 2.0 / x ** 3)
    if name == "abs":
        sgn = float((x > 0) - (x < 0))
        return compose(g, abs(x), sgn, 0.0, 0.0)
    raise ExprDomainError(f"unknown function {name}", node)


def eval_jet(e: "Expr | str", s: float) -> Jet3:
    """Evaluate an expression (tree or source text) at ``s`` with derivatives."""
    if isinstance(e, str):
        e = parse(e)
    return _eval(e, Jet3.variable(s))


def _eval(e: Expr, sj: Jet3) -> Jet3:
    match e:
        case Num(v):
            return Jet3.constant(v)
        case Pi():
            return Jet3.constant(math.pi)
        case Var():
            return sj
        case Neg(operand):
            return -_eval(operand, sj)
        case BinOp("+", left, right):
            return _eval(left, sj) + _eval(right, sj)
        case BinOp("-", left, right):
            return _eval(left, sj) - _eval(right, sj)
        case BinOp("*", left, right):
            return _eval(left, sj) * _eval(right, sj)
        case BinOp("/", left, right):
            denom = _eval(right, sj)
            if denom.value == 0.0:
                raise ExprDomainError("division by zero", right)
            return _eval(left, sj) * _reciprocal(denom)
        case BinOp("^", left, right):
            p = _eval(right, sj).value
            return _falling_pow(_eval(left, sj), p, e)
        case Call(func, arg):
            return _eval_call(func, _eval(arg, sj), e)
    raise TypeError(f"not an Expr node: {e!r}")
