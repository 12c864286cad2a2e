"""Symbolic radial profiles over a single coordinate.

A small expression language for functions of one radial variable, used
for potentials and Bessel-pair profiles on model spaces. The grammar
(shared with the command line) is

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' exponent)?
    base   := number | 'r' | 'rho' | func '(' expr ')' | '(' expr ')'
    func   := exp | ln | sinh | cosh | coth

Numbers are decimal literals with an optional sign and an optional
fraction part, so 2, -0.25 and 3/2 are each a single token. An
exponent is a number, optionally parenthesized: r^2, r^(-1/2).

Trees are immutable. They evaluate pointwise on floats or numpy
arrays, differentiate symbolically, and print back to text the parser
accepts. Non-integer powers assume a positive argument; the radial
domain is (0, oo) throughout, so (f^p)^q may be collapsed to f^(p*q).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

__all__ = [
    "ProfileExpr",
    "ProfileSyntaxError",
    "Const",
    "Var",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "Exp",
    "Ln",
    "Sinh",
    "Cosh",
    "Coth",
    "parse_profile",
    "symbolic_derivative",
]

Real = Union[int, float, Fraction]

# printer precedence levels
_SUM, _PROD, _POW, _ATOM = 1, 2, 3, 4


class ProfileSyntaxError(ValueError):
    """Parse failure; ``position`` is the character offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"syntax error at offset {position}: {message}")
        self.position = position


def _as_number(x: Real) -> Union[Fraction, float]:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    f = float(x)
    return Fraction(int(f)) if f.is_integer() else f


def _num_str(x: Real) -> str:
    if isinstance(x, (int, Fraction)):
        return str(x)
    s = repr(float(x))
    if s.endswith(".0"):
        return s[:-2]
    if "e" in s or "E" in s:
        # exponent notation is not in the grammar; emit the exact ratio
        f = Fraction(float(x))
        return f"{f.numerator}/{f.denominator}"
    return s


class ProfileExpr:
    """A radial profile as an immutable expression tree.

    Arithmetic operators build new trees (with light constant
    folding); ``**`` takes a numeric exponent, never another tree.
    Calling the tree evaluates it pointwise.
    """

    def deriv(self) -> "ProfileExpr":
        """Symbolic derivative in the radial variable."""
        raise NotImplementedError

    def _eval(self, t: np.ndarray):
        raise NotImplementedError

    def _print(self, context: int) -> str:
        raise NotImplementedError

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = self._eval(arr)
        if np.ndim(out) == 0:
            return np.full(arr.shape, float(out)) if arr.ndim else float(out)
        return out

    def __str__(self) -> str:
        return self._print(0)

    def __add__(self, other) -> "ProfileExpr":
        return _add(self, _as_expr(other))

    def __radd__(self, other) -> "ProfileExpr":
        return _add(_as_expr(other), self)

    def __sub__(self, other) -> "ProfileExpr":
        return _sub(self, _as_expr(other))

    def __rsub__(self, other) -> "ProfileExpr":
        return _sub(_as_expr(other), self)

    def __mul__(self, other) -> "ProfileExpr":
        return _mul(self, _as_expr(other))

    def __rmul__(self, other) -> "ProfileExpr":
        return _mul(_as_expr(other), self)

    def __truediv__(self, other) -> "ProfileExpr":
        return _div(self, _as_expr(other))

    def __rtruediv__(self, other) -> "ProfileExpr":
        return _div(_as_expr(other), self)

    def __pow__(self, exponent: Real) -> "ProfileExpr":
        if isinstance(exponent, ProfileExpr):
            raise TypeError("exponents are numbers, not expressions")
        return _pow(self, exponent)

    def __neg__(self) -> "ProfileExpr":
        return _mul(Const(Fraction(-1)), self)


@dataclass(frozen=True)
class Const(ProfileExpr):
    value: Real

    def deriv(self) -> ProfileExpr:
        return Const(Fraction(0))

    def _eval(self, t):
        return float(self.value)

    def _print(self, context: int) -> str:
        return _num_str(self.value)


@dataclass(frozen=True)
class Var(ProfileExpr):
    name: str = "r"

    def deriv(self) -> ProfileExpr:
        return Const(Fraction(1))

    def _eval(self, t):
        return t

    def _print(self, context: int) -> str:
        return self.name


@dataclass(frozen=True)
class Add(ProfileExpr):
    left: ProfileExpr
    right: ProfileExpr

    def deriv(self) -> ProfileExpr:
        return _add(self.left.deriv(), self.right.deriv())

    def _eval(self, t):
        return self.left._eval(t) + self.right._eval(t)

    def _print(self, context: int) -> str:
        s = f"{self.left._print(_SUM)}+{self.right._print(_PROD)}"
        return f"({s})" if context > _SUM else s


@dataclass(frozen=True)
class Sub(ProfileExpr):
    left: ProfileExpr
    right: ProfileExpr

    def deriv(self) -> ProfileExpr:
        return _sub(self.left.deriv(), self.right.deriv())

    def _eval(self, t):
        return self.left._eval(t) - self.right._eval(t)

    def _print(self, context: int) -> str:
        s = f"{self.left._print(_SUM)}-{self.right._print(_PROD)}"
        return f"({s})" if context > _SUM else s


@dataclass(frozen=True)
class Mul(ProfileExpr):
    left: ProfileExpr
    right: ProfileExpr

    def deriv(self) -> ProfileExpr:
        return _add(
            _mul(self.left.deriv(), self.right),
            _mul(self.left, self.right.deriv()),
        )

    def _eval(self, t):
        return self.left._eval(t) * self.right._eval(t)

    def _print(self, context: int) -> str:
        s = f"{self.left._print(_PROD)}*{self.right._print(_POW)}"
        return f"({s})" if context > _PROD else s


@dataclass(frozen=True)
class Div(ProfileExpr):
    left: ProfileExpr
    right: ProfileExpr

    def deriv(self) -> ProfileExpr:
        num = _sub(
            _mul(self.left.deriv(), self.right),
            _mul(self.left, self.right.deriv()),
        )
        return _div(num, _pow(self.right, 2))

    def _eval(self, t):
        return self.left._eval(t) / self.right._eval(t)

    def _print(self, context: int) -> str:
        s = f"{self.left._print(_PROD)}/{self.right._print(_POW)}"
        return f"({s})" if context > _PROD else s


@dataclass(frozen=True)
class Pow(ProfileExpr):
    base: ProfileExpr
    exponent: Real

    def deriv(self) -> ProfileExpr:
        p = self.exponent
        outer = _mul(Const(p), _pow(self.base, p - 1))
        return _mul(outer, self.base.deriv())

    def _eval(self, t):
        return self.base._eval(t) ** float(self.exponent)

    def _print(self, context: int) -> str:
        e = _num_str(self.exponent)
        if e.startswith("-") or "/" in e:
            e = f"({e})"
        return f"{self.base._print(_ATOM)}^{e}"


@dataclass(frozen=True)
class Exp(ProfileExpr):
    arg: ProfileExpr

    def deriv(self) -> ProfileExpr:
        return _mul(Exp(self.arg), self.arg.deriv())

    def _eval(self, t):
        return np.exp(self.arg._eval(t))

    def _print(self, context: int) -> str:
        return f"exp({self.arg._print(0)})"


@dataclass(frozen=True)
class Ln(ProfileExpr):
    arg: ProfileExpr

    def deriv(self) -> ProfileExpr:
        return _div(self.arg.deriv(), self.arg)

    def _eval(self, t):
        return np.log(self.arg._eval(t))

    def _print(self, context: int) -> str:
        return f"ln({self.arg._print(0)})"


@dataclass(frozen=True)
class Sinh(ProfileExpr):
    arg: ProfileExpr

    def deriv(self) -> ProfileExpr:
        return _mul(Cosh(self.arg), self.arg.deriv())

    def _eval(self, t):
        return np.sinh(self.arg._eval(t))

    def _print(self, context: int) -> str:
        return f"sinh({self.arg._print(0)})"


@dataclass(frozen=True)
class Cosh(ProfileExpr):
    arg: ProfileExpr

    def deriv(self) -> ProfileExpr:
        return _mul(Sinh(self.arg), self.arg.deriv())

    def _eval(self, t):
        return np.cosh(self.arg._eval(t))

    def _print(self, context: int) -> str:
        return f"cosh({self.arg._print(0)})"


@dataclass(frozen=True)
class Coth(ProfileExpr):
    arg: ProfileExpr

    def deriv(self) -> ProfileExpr:
        # d coth = 1 - coth^2, same thing as -1/sinh^2
        outer = _sub(Const(Fraction(1)), _pow(Coth(self.arg), 2))
        return _mul(outer, self.arg.deriv())

    def _eval(self, t):
        return 1.0 / np.tanh(self.arg._eval(t))

    def _print(self, context: int) -> str:
        return f"coth({self.arg._print(0)})"


def _as_expr(x) -> ProfileExpr:
    if isinstance(x, ProfileExpr):
        return x
    if isinstance(x, (int, float, Fraction)):
        return Const(_as_number(x))
    raise TypeError(f"cannot use {type(x).__name__} as a profile")


def _is_const(e: ProfileExpr, value=None) -> bool:
    if not isinstance(e, Const):
        return False
    return value is None or e.value == value


def _split_const(e: ProfileExpr):
    """e as (coefficient, core) when a constant leads a product."""
    if isinstance(e, Mul) and isinstance(e.left, Const):
        return e.left.value, e.right
    return Fraction(1), e


def _base_exp(e: ProfileExpr):
    if isinstance(e, Pow):
        return e.base, e.exponent
    return e, Fraction(1)


def _add(a: ProfileExpr, b: ProfileExpr) -> ProfileExpr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    ca, xa = _split_const(a)
    cb, xb = _split_const(b)
    # like terms cancel exactly; iterated Laplacians of power profiles
    # otherwise leave pure float noise where a coefficient vanishes
    if xa == xb:
        return _mul(Const(ca + cb), xa)
    return Add(a, b)


def _sub(a: ProfileExpr, b: ProfileExpr) -> ProfileExpr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return _mul(Const(Fraction(-1)), b)
    ca, xa = _split_const(a)
    cb, xb = _split_const(b)
    if xa == xb:
        return _mul(Const(ca - cb), xa)
    return Sub(a, b)


def _mul(a: ProfileExpr, b: ProfileExpr) -> ProfileExpr:
    if isinstance(b, Const) and not isinstance(a, Const):
        a, b = b, a
    if isinstance(a, Const):
        if a.value == 0:
            return Const(Fraction(0))
        if a.value == 1:
            return b
        if isinstance(b, Const):
            return Const(a.value * b.value)
        # collapse constant chains so derivative towers stay readable
        if isinstance(b, Mul) and isinstance(b.left, Const):
            return _mul(Const(a.value * b.left.value), b.right)
        return Mul(a, b)
    ca, xa = _split_const(a)
    cb, xb = _split_const(b)
    if ca != 1 or cb != 1:
        return _mul(Const(ca * cb), _mul(xa, xb))
    pa, ea = _base_exp(a)
    pb, eb = _base_exp(b)
    if pa == pb:
        return _pow(pa, _as_number(ea) + _as_number(eb))
    return Mul(a, b)


def _div(a: ProfileExpr, b: ProfileExpr) -> ProfileExpr:
    if _is_const(a, 0):
        return Const(Fraction(0))
    if _is_const(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        if b.value == 0:
            raise ZeroDivisionError("constant zero denominator in profile")
        return Const(a.value / b.value)
    ca, xa = _split_const(a)
    cb, xb = _split_const(b)
    if (ca != 1 or cb != 1) and cb != 0:
        return _mul(Const(ca / cb), _div(xa, xb))
    pa, ea = _base_exp(a)
    pb, eb = _base_exp(b)
    if pa == pb:
        return _pow(pa, _as_number(ea) - _as_number(eb))
    return Div(a, b)


def _pow(base: ProfileExpr, exponent: Real) -> ProfileExpr:
    p = _as_number(exponent)
    if p == 0:
        return Const(Fraction(1))
    if p == 1:
        return base
    if isinstance(base, Const) and isinstance(p, Fraction) and p.denominator == 1:
        v = base.value
        if not (v == 0 and p < 0):
            return Const(v ** p.numerator)
    if isinstance(base, Pow):
        # sound on the positive axis, which is the whole domain here
        return _pow(base.base, _as_number(base.exponent) * p)
    return Pow(base, p)


_FUNCS = {"exp": Exp, "ln": Ln, "sinh": Sinh, "cosh": Cosh, "coth": Coth}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def parse(self) -> ProfileExpr:
        e = self.expr()
        self._skip_ws()
        if self.pos != len(self.text):
            raise ProfileSyntaxError("unexpected trailing input", self.pos)
        return e

    def _skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expect(self, ch: str) -> None:
        if self._peek() != ch:
            raise ProfileSyntaxError(f"expected '{ch}'", self.pos)
        self.pos += 1

    def expr(self) -> ProfileExpr:
        e = self.term()
        while True:
            self._skip_ws()
            op = self._peek()
            if op == "+":
                self.pos += 1
                e = _add(e, self.term())
            elif op == "-":
                self.pos += 1
                e = _sub(e, self.term())
            else:
                return e

    def term(self) -> ProfileExpr:
        e = self.factor()
        while True:
            self._skip_ws()
            op = self._peek()
            if op == "*":
                self.pos += 1
                e = _mul(e, self.factor())
            elif op == "/":
                self.pos += 1
                e = _div(e, self.factor())
            else:
                return e

    def factor(self) -> ProfileExpr:
        b = self.base()
        self._skip_ws()
        if self._peek() == "^":
            self.pos += 1
            self._skip_ws()
            if self._peek() == "(":
                self.pos += 1
                self._skip_ws()
                p = self.number()
                self._skip_ws()
                self._expect(")")
            else:
                p = self.number()
            return _pow(b, p)
        return b

    def base(self) -> ProfileExpr:
        self._skip_ws()
        ch = self._peek()
        if ch == "":
            raise ProfileSyntaxError("unexpected end of input", self.pos)
        if ch == "(":
            self.pos += 1
            e = self.expr()
            self._skip_ws()
            self._expect(")")
            return e
        nxt = self.text[self.pos + 1 : self.pos + 2]
        if ch.isdigit() or ch == "." or (ch in "+-" and (nxt.isdigit() or nxt == ".")):
            return Const(self.number())
        if ch.isalpha():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isalpha():
                self.pos += 1
            name = self.text[start : self.pos]
            if name in ("r", "rho"):
                return Var(name)
            if name in _FUNCS:
                self._skip_ws()
                self._expect("(")
                e = self.expr()
                self._skip_ws()
                self._expect(")")
                return _FUNCS[name](e)
            raise ProfileSyntaxError(f"unknown identifier '{name}'", start)
        raise ProfileSyntaxError(
            "expected a number, 'r', 'rho', a function, or '('", self.pos
        )

    def number(self) -> Fraction:
        start = self.pos
        value = self._decimal()
        # a '/' followed by a digit is part of the literal, per the grammar
        if self._peek() == "/":
            nxt = self.text[self.pos + 1 : self.pos + 2]
            if nxt.isdigit() or nxt == ".":
                self.pos += 1
                den = self._decimal()
                if den == 0:
                    raise ProfileSyntaxError("zero denominator", start)
                value = value / den
        return value

    def _decimal(self) -> Fraction:
        start = self.pos
        if self._peek() in "+-":
            self.pos += 1
        digits = 0
        while self._peek().isdigit():
            self.pos += 1
            digits += 1
        if self._peek() == ".":
            self.pos += 1
            while self._peek().isdigit():
                self.pos += 1
                digits += 1
        if digits == 0:
            raise ProfileSyntaxError("expected a number", start)
        text = self.text[start : self.pos]
        sign = 1
        if text[0] in "+-":
            sign = -1 if text[0] == "-" else 1
            text = text[1:]
        if "." in text:
            whole, frac = text.split(".")
            num = int(whole or "0") * 10 ** len(frac) + int(frac or "0")
            return sign * Fraction(num, 10 ** len(frac))
        return sign * Fraction(int(text))


def parse_profile(text: str) -> ProfileExpr:
    """Parse profile text into an expression tree.

    Raises ProfileSyntaxError (with a ``position`` attribute) on
    malformed input or an unknown identifier.
    """
    return _Parser(text).parse()


def symbolic_derivative(e: ProfileExpr, order: int = 1) -> ProfileExpr:
    """The order-th symbolic derivative of e."""
    if order < 0:
        raise ValueError("derivative order must be >= 0")
    for _ in range(order):
        e = e.deriv()
    return e
