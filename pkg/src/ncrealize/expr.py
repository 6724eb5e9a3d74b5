"""NC rational expressions: parsing, printing, compilation to FM realizations.

Grammar (whitespace is ignored)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | <juxtaposition>) unary)*
    unary   := '-' unary | factor
    factor  := base ('^-1')*
    base    := number | 'z' INT | '(' expr ')' | 'inv(' expr ')'

Numbers are real literals, optionally followed by ``i`` for an imaginary
literal; a parenthesised signed literal such as ``(1-2i)`` or ``(-3)`` is one
complex constant.  A numeric literal written directly in front of a factor
(``2z1``, ``(1+2i)(z1+z2)``) denotes scaling; an explicit ``*`` is an
ordinary product.  Products are never reordered.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import AlphabetError, NotInvertibleError, ParseError
from .fps import INVERSION_TOL, TruncatedSeries
from .realization import FMRealization, fm_add, fm_invert, fm_mul, fm_scale


class Expr:
    """Base class of expression nodes; use :func:`to_string` to print."""

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class Const(Expr):
    value: complex


@dataclass(frozen=True)
class Var(Expr):
    index: int


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Inv(Expr):
    arg: Expr


@dataclass(frozen=True)
class Scale(Expr):
    factor: complex
    arg: Expr


# -- lexer --------------------------------------------------------------------

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TOKEN = re.compile(
    rf"(?P<inv>inv\s*\()|(?P<pow>\^\s*-\s*1)|(?P<num>{_NUM})(?P<imag>i(?!nv))?|(?P<i>i(?!nv))|z(?P<var>\d+)|(?P<op>[-+*()])"
)
_LITERAL = re.compile(rf"\(\s*(?P<s1>[-+]?)\s*(?P<a>{_NUM})(?P<ai>i)?\s*(?:(?P<s2>[-+])\s*(?P<b>{_NUM})?i)?\s*\)")
_SPACE = re.compile(r"\s*")


@dataclass(frozen=True)
class _Tok:
    kind: str
    value: object
    pos: int


def _tokenize(text):
    toks = []
    pos = _SPACE.match(text, 0).end()
    while pos < len(text):
        lit = _LITERAL.match(text, pos)
        if lit:
            toks.append(_Tok("lit", _literal_value(lit), pos))
            pos = _SPACE.match(text, lit.end()).end()
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.group("inv"):
            toks.append(_Tok("inv", None, pos))
        elif m.group("pow"):
            toks.append(_Tok("pow", None, pos))
        elif m.group("num"):
            x = float(m.group("num"))
            toks.append(_Tok("num", complex(0, x) if m.group("imag") else complex(x), pos))
        elif m.group("i"):
            toks.append(_Tok("num", 1j, pos))
        elif m.group("var"):
            toks.append(_Tok("var", int(m.group("var")), pos))
        else:
            toks.append(_Tok(m.group("op"), None, pos))
        pos = _SPACE.match(text, m.end()).end()
    toks.append(_Tok("end", None, len(text)))
    return toks


def _literal_value(m):
    a = float(m.group("a"))
    if m.group("s1") == "-":
        a = -a
    first = complex(0, a) if m.group("ai") else complex(a, 0)
    if m.group("s2") is None:
        return first
    b = complex(0, float(m.group("b")) if m.group("b") else 1.0)
    return first + b if m.group("s2") == "+" else first - b


class _Parser:
    def __init__(self, text, d):
        self.text = text
        self.d = d
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        t = self.toks[self.i]
        if kind is not None and t.kind != kind:
            want = "')'" if kind == ")" else kind
            raise ParseError(f"expected {want}, found {self._describe(t)}", t.pos)
        self.i += 1
        return t

    def _describe(self, t):
        return "end of input" if t.kind == "end" else repr(self.text[t.pos:t.pos + 8])

    def parse(self):
        e = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected {self._describe(t)}", t.pos)
        return e

    def expr(self):
        e = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.take().kind
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def _starts_factor(self):
        return self.peek().kind in ("num", "lit", "var", "(", "inv")

    def term(self):
        e, literal = self.unary()
        while True:
            if self.peek().kind == "*":
                self.take()
                rhs, _ = self.unary()
                e, literal = Mul(e, rhs), False
            elif self._starts_factor():
                rhs, rhs_literal = self.unary()
                e = Scale(e.value, rhs) if literal else Mul(e, rhs)
                literal = False
            else:
                return e

    def unary(self):
        if self.peek().kind == "-":
            self.take()
            e, _ = self.unary()
            return Neg(e), False
        return self.factor()

    def factor(self):
        e, literal = self.base()
        while self.peek().kind == "pow":
            self.take()
            e, literal = Inv(e), False
        return e, literal

    def base(self):
        t = self.take()
        if t.kind in ("num", "lit"):
            return Const(t.value), True
        if t.kind == "var":
            if t.value < 1 or (self.d is not None and t.value > self.d):
                bound = f"1..{self.d}" if self.d is not None else "1.."
                raise ParseError(f"variable z{t.value} outside the alphabet {bound}", t.pos)
            return Var(t.value), False
        if t.kind == "(":
            e = self.expr()
            self.take(")")
            return e, False
        if t.kind == "inv":
            e = self.expr()
            self.take(")")
            return Inv(e), False
        raise ParseError(f"expected a number, variable, '(' or 'inv(', found {self._describe(t)}", t.pos)


def parse(text: str, d: int | None = None) -> Expr:
    """Parse ``text``; with ``d`` given, variable indices must lie in ``1..d``."""
    return _Parser(text, d).parse()


# -- printing -----------------------------------------------------------------


def _num(x):
    return repr(float(x))


def const_string(c: complex) -> str:
    """A spelling of ``c`` that parses back to exactly one :class:`Const`."""
    c = complex(c)
    re_neg = math.copysign(1.0, c.real) < 0
    im_neg = math.copysign(1.0, c.imag) < 0
    if c.imag == 0 and not im_neg and not re_neg:
        return _num(c.real)
    if c.real == 0 and not re_neg and not im_neg:
        return _num(c.imag) + "i"
    if c.imag == 0 and not im_neg:
        return f"({_num(c.real)})"
    if c.real == 0 and not re_neg:
        return f"({_num(c.imag)}i)"
    sign = "-" if im_neg else "+"
    return f"({_num(c.real)}{sign}{_num(abs(c.imag))}i)"


def _atomic(e):
    return isinstance(e, (Var, Inv, Const))


def _wrap(e, safe):
    w = f"({to_string(e, safe)})"
    if _LITERAL.fullmatch(w):
        # e.g. Neg(Const 1) or Add(Const 1, Const 2i): keep it from reading as one literal
        w = f"({to_string(e, True)})"
    return w


def to_string(e: Expr, safe: bool = False) -> str:
    """Print ``e`` so that ``parse(to_string(e)) == e``.

    With ``safe`` every constant is written in its parenthesised form.
    """
    if isinstance(e, Const):
        c = const_string(e.value)
        return c if not safe or c.startswith("(") else f"({c})"
    if isinstance(e, Var):
        return f"z{e.index}"
    if isinstance(e, Inv):
        return f"inv({to_string(e.arg, safe)})"
    if isinstance(e, (Add, Sub)):
        op = " + " if isinstance(e, Add) else " - "
        right = _wrap(e.right, safe) if isinstance(e.right, (Add, Sub)) else to_string(e.right, safe)
        return to_string(e.left, safe) + op + right
    if isinstance(e, Mul):
        left = _wrap(e.left, safe) if isinstance(e.left, (Add, Sub)) else to_string(e.left, safe)
        right = _wrap(e.right, safe) if isinstance(e.right, (Add, Sub, Mul, Scale, Neg)) else to_string(e.right, safe)
        return f"{left}*{right}"
    if isinstance(e, Neg):
        inner = to_string(e.arg, safe) if (_atomic(e.arg) or isinstance(e.arg, Neg)) else _wrap(e.arg, safe)
        return "-" + inner
    if isinstance(e, Scale):
        inner = to_string(e.arg, safe) if _atomic(e.arg) else _wrap(e.arg, safe)
        return const_string(e.factor) + " " + inner
    raise TypeError(f"not an expression node: {e!r}")


def to_dict(e: Expr):
    """Nested-dict form of the tree (for JSON)."""
    if isinstance(e, Const):
        return {"node": "Const", "value": [e.value.real, e.value.imag]}
    if isinstance(e, Var):
        return {"node": "Var", "index": e.index}
    if isinstance(e, Scale):
        return {"node": "Scale", "factor": [e.factor.real, e.factor.imag], "arg": to_dict(e.arg)}
    if isinstance(e, (Neg, Inv)):
        return {"node": type(e).__name__, "arg": to_dict(e.arg)}
    return {"node": type(e).__name__, "left": to_dict(e.left), "right": to_dict(e.right)}


def max_variable(e: Expr) -> int:
    if isinstance(e, Var):
        return e.index
    if isinstance(e, Const):
        return 0
    if isinstance(e, (Neg, Inv, Scale)):
        return max_variable(e.arg)
    return max(max_variable(e.left), max_variable(e.right))


def _check_vars(e, d):
    k = max_variable(e)
    if k > d:
        raise AlphabetError(f"expression uses z{k} but d={d}")


# -- compilation and the series oracle -------------------------------------------


def compile_expr(e: Expr, d: int, tol=INVERSION_TOL) -> FMRealization:
    """FM realization of ``e`` built bottom-up with the FM sum, product and inverse."""
    _check_vars(e, d)

    def go(e):
        if isinstance(e, Const):
            return FMRealization.constant(e.value, d)
        if isinstance(e, Var):
            return FMRealization.variable(e.index, d)
        if isinstance(e, Add):
            return fm_add(go(e.left), go(e.right))
        if isinstance(e, Sub):
            return fm_add(go(e.left), fm_scale(go(e.right), -1))
        if isinstance(e, Mul):
            return fm_mul(go(e.left), go(e.right))
        if isinstance(e, Neg):
            return fm_scale(go(e.arg), -1)
        if isinstance(e, Scale):
            return fm_scale(go(e.arg), e.factor)
        if isinstance(e, Inv):
            inner = go(e.arg)
            if abs(inner.D) <= tol:
                raise NotInvertibleError(f"{to_string(e.arg)} vanishes at 0, so its inverse is not analytic there")
            return fm_invert(inner, tol)
        raise TypeError(f"not an expression node: {e!r}")

    return go(e)


def interpret(e: Expr, d: int, degree_bound: int, tol=INVERSION_TOL) -> TruncatedSeries:
    """Truncated series of ``e`` computed directly with series arithmetic (the oracle)."""
    _check_vars(e, d)

    def go(e):
        if isinstance(e, Const):
            return TruncatedSeries.constant(e.value, d, degree_bound)
        if isinstance(e, Var):
            return TruncatedSeries.variable(e.index, d, degree_bound)
        if isinstance(e, Add):
            return go(e.left) + go(e.right)
        if isinstance(e, Sub):
            return go(e.left) - go(e.right)
        if isinstance(e, Mul):
            return go(e.left) * go(e.right)
        if isinstance(e, Neg):
            return -go(e.arg)
        if isinstance(e, Scale):
            return go(e.arg).scale(e.factor)
        if isinstance(e, Inv):
            inner = go(e.arg)
            if abs(inner[()]) <= tol:
                raise NotInvertibleError(f"{to_string(e.arg)} vanishes at 0, so its inverse is not analytic there")
            return inner.invert(tol)
        raise TypeError(f"not an expression node: {e!r}")

    return go(e)


def value_at_zero(e: Expr) -> complex:
    """Constant term of ``e`` (``nan`` if some inverse is taken of something vanishing at 0)."""
    if isinstance(e, Const):
        return complex(e.value)
    if isinstance(e, Var):
        return 0j
    if isinstance(e, Add):
        return value_at_zero(e.left) + value_at_zero(e.right)
    if isinstance(e, Sub):
        return value_at_zero(e.left) - value_at_zero(e.right)
    if isinstance(e, Mul):
        return value_at_zero(e.left) * value_at_zero(e.right)
    if isinstance(e, Neg):
        return -value_at_zero(e.arg)
    if isinstance(e, Scale):
        return e.factor * value_at_zero(e.arg)
    v = value_at_zero(e.arg)
    return 1.0 / v if v != 0 else complex("nan")


# -- random expressions ---------------------------------------------------------

_CONSTANTS = (1.0, 2.0, -1.0, 0.5, 1j, 0.5 - 0.5j, 1.5 + 1j)


def random_expression(rng: np.random.Generator, d: int, depth: int) -> Expr:
    """Random expression of the given maximal depth, regular at 0 by construction.

    Inverses are only taken of subexpressions whose constant term has modulus
    at least 1/2; otherwise a constant is added first.
    """

    def leaf():
        if rng.random() < 0.7:
            return Var(int(rng.integers(1, d + 1)))
        return Const(complex(_CONSTANTS[rng.integers(len(_CONSTANTS))]))

    def go(k):
        if k == 0 or rng.random() < 0.2:
            return leaf()
        kind = rng.choice(["add", "sub", "mul", "mul", "neg", "inv", "inv", "scale"])
        if kind in ("add", "sub", "mul"):
            cls = {"add": Add, "sub": Sub, "mul": Mul}[kind]
            return cls(go(k - 1), go(k - 1))
        if kind == "neg":
            return Neg(go(k - 1))
        if kind == "scale":
            return Scale(complex(_CONSTANTS[rng.integers(len(_CONSTANTS))]), go(k - 1))
        inner = go(k - 1)
        v = value_at_zero(inner)
        if not abs(v) >= 0.5:
            inner = Sub(Const(1.0 if abs(v - 1) >= 0.5 else 2.0), inner) if abs(v) < 0.25 else Add(Const(1.0), inner)
            if not abs(value_at_zero(inner)) >= 0.5:
                inner = Add(Const(2.0), inner)
        return Inv(inner)

    e = go(depth)
    return e


__all__ = [
    "Expr",
    "Const",
    "Var",
    "Add",
    "Sub",
    "Mul",
    "Neg",
    "Inv",
    "Scale",
    "parse",
    "to_string",
    "to_dict",
    "const_string",
    "compile_expr",
    "interpret",
    "value_at_zero",
    "random_expression",
    "max_variable",
]
