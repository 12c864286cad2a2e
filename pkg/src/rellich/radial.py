"""Exact algebra of piecewise radial functions.

Functions are finite sums of terms c * r**p * (ln r)**q on finitely many
disjoint pieces of (0, oo), closed under addition, multiplication and
differentiation, with closed-form weighted integration.

Coefficients and exponents are kept exact (int/Fraction) whenever the
inputs are rational; evaluation of antiderivatives at piece endpointsuses
60-digit Decimal arithmetic so that the massive coefficient cancellation
of high-order bump polynomials never leaks into integral values.  Floats
enter only through genuinely irrational data (e.g. endpoints like e**-3)
and at the reporting boundary.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, NamedTuple, Union

import numpy as np

Scalar = Union[int, Fraction, float]

# Decimal working precision for endpoint evaluation.  Identity checks need
# ~30 digits of cancellation headroom at bump order 8; 60 leaves margin.
_DECIMAL_PREC = 60


class NonElementaryIntegral(ValueError):
    """The requested antiderivative leaves the term algebra."""


def is_exact(x: Scalar) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def _norm_exponent(p: Scalar) -> Scalar:
    # Integral values collapse to int so that dict keys merge exactly.
    if isinstance(p, Fraction) and p.denominator == 1:
        return int(p)
    if isinstance(p, float) and p.is_integer() and abs(p) < 2**53:
        return int(p)
    return p


class RadialTerm(NamedTuple):
    coeff: Scalar
    power: Scalar
    logpow: int


class RadialPoly:
    """Finite sum of c * r**p * (ln r)**q, keyed exactly by (p, q)."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[RadialTerm] | dict | None = None):
        acc: dict = {}
        if isinstance(terms, dict):
            for (p, q), c in terms.items():
                self._accumulate(acc, c, p, q)
        elif terms is not None:
            for t in terms:
                c, p, q = (t.coeff, t.power, t.logpow) if isinstance(t, RadialTerm) else t
                self._accumulate(acc, c, p, q)
        self._terms = {k: v for k, v in acc.items() if v != 0}

    @staticmethod
    def _accumulate(acc: dict, c: Scalar, p: Scalar, q: int) -> None:
        if int(q) != q:
            raise ValueError("logpow must be an integer")
        key = (_norm_exponent(p), int(q))
        acc[key] = acc.get(key, 0) + c

    @classmethod
    def zero(cls) -> "RadialPoly":
        return cls()

    @classmethod
    def monomial(cls, coeff: Scalar, power: Scalar = 0, logpow: int = 0) -> "RadialPoly":
        return cls([(coeff, power, logpow)])

    @classmethod
    def constant(cls, c: Scalar) -> "RadialPoly":
        return cls.monomial(c, 0, 0)

    def terms(self) -> tuple[RadialTerm, ...]:
        items = sorted(self._terms.items(), key=lambda kv: (float(kv[0][0]), kv[0][1]))
        return tuple(RadialTerm(c, p, q) for (p, q), c in items)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def min_logpow(self) -> int:
        return min((q for (_, q) in self._terms), default=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RadialPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        if self.is_zero:
            return "RadialPoly(0)"
        bits = []
        for c, p, q in self.terms():
            s = f"{c}"
            if p != 0:
                s += f"*r^{p}"
            if q != 0:
                s += f"*ln^{q}"
            bits.append(s)
        return "RadialPoly(" + " + ".join(bits) + ")"

    def __add__(self, other: "RadialPoly") -> "RadialPoly":
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, 0) + v
        out = RadialPoly()
        out._terms = {k: v for k, v in acc.items() if v != 0}
        return out

    def __neg__(self) -> "RadialPoly":
        out = RadialPoly()
        out._terms = {k: -v for k, v in self._terms.items()}
        return out

    def __sub__(self, other: "RadialPoly") -> "RadialPoly":
        return self + (-other)

    def scale(self, c: Scalar) -> "RadialPoly":
        if c == 0:
            return RadialPoly.zero()
        out = RadialPoly()
        out._terms = {k: c * v for k, v in self._terms.items()}
        return out

    def mul_term(self, coeff: Scalar, power: Scalar = 0, logpow: int = 0) -> "RadialPoly":
        """Multiply by the single term coeff * r**power * (ln r)**logpow."""
        if coeff == 0:
            return RadialPoly.zero()
        acc: dict = {}
        for (p, q), c in self._terms.items():
            self._accumulate(acc, c * coeff, _add_exp(p, power), q + logpow)
        out = RadialPoly()
        out._terms = {k: v for k, v in acc.items() if v != 0}
        return out

    def __mul__(self, other: "RadialPoly") -> "RadialPoly":
        acc: dict = {}
        for (p1, q1), c1 in self._terms.items():
            for (p2, q2), c2 in other._terms.items():
                self._accumulate(acc, c1 * c2, _add_exp(p1, p2), q1 + q2)
        out = RadialPoly()
        out._terms = {k: v for k, v in acc.items() if v != 0}
        return out

    def differentiate(self) -> "RadialPoly":
        # d/dr c r^p ln^q = c p r^(p-1) ln^q + c q r^(p-1) ln^(q-1); valid for q < 0 too.
        acc: dict = {}
        for (p, q), c in self._terms.items():
            pm1 = _add_exp(p, -1)
            if p != 0:
                self._accumulate(acc, c * p, pm1, q)
            if q != 0:
                self._accumulate(acc, c * q, pm1, q - 1)
        out = RadialPoly()
        out._terms = {k: v for k, v in acc.items() if v != 0}
        return out

    def antiderivative(self) -> "RadialPoly":
        """Term-by-term antiderivative; raises NonElementaryIntegral when a
        term has no antiderivative inside the algebra (negative logpow with
        power != -1, or the r^-1 (ln r)^-1 term)."""
        out = RadialPoly.zero()
        for (p, q), c in self._terms.items():
            out = out + _term_antiderivative(c, p, q)
        return out

    def eval(self, r):
        """Pointwise value; r is a float or ndarray of radii > 0."""
        arr = np.asarray(r, dtype=float)
        out = np.zeros_like(arr)
        if self._terms:
            logr = np.log(arr)
            for (p, q), c in self._terms.items():
                t = float(c) * np.power(arr, float(p))
                if q:
                    t = t * logr**q
                out = out + t
        return out if isinstance(r, np.ndarray) else float(out)


def _add_exp(a: Scalar, b: Scalar) -> Scalar:
    # Exact where both sides are exact; float contamination is deliberate.
    return a + b


def _term_antiderivative(c: Scalar, p: Scalar, q: int) -> RadialPoly:
    if p == -1:
        if q == -1:
            raise NonElementaryIntegral("antiderivative of r^-1 (ln r)^-1 is ln|ln r|")
        return RadialPoly.monomial(_div(c, q + 1), 0, q + 1)
    if q == 0:
        return RadialPoly.monomial(_div(c, _add_exp(p, 1)), _add_exp(p, 1), 0)
    if q < 0:
        raise NonElementaryIntegral(
            f"antiderivative of r^{p} (ln r)^{q} is not elementary")
    lead = RadialPoly.monomial(_div(c, _add_exp(p, 1)), _add_exp(p, 1), q)
    return lead + _term_antiderivative(_div(-c * q, _add_exp(p, 1)), p, q - 1)


def _div(a: Scalar, b: Scalar) -> Scalar:
    if is_exact(a) and is_exact(b):
        return Fraction(a, b) if isinstance(a, int) and isinstance(b, int) else Fraction(a) / Fraction(b)
    return a / b


def _to_decimal(x: Scalar) -> Decimal:
    if isinstance(x, int):
        return Decimal(x)
    if isinstance(x, Fraction):
        return Decimal(x.numerator) / Decimal(x.denominator)
    return Decimal(x)  # float: exact binary expansion


def _eval_antideriv_at(F: RadialPoly, e: Scalar):
    """Value of an antiderivative polynomial at endpoint e > 0.

    Returns an exact Fraction when every term allows it (integer powers,
    rational endpoint, log factors absent or killed by e == 1); otherwise
    a 60-digit Decimal.
    """
    exact_ok = is_exact(e)
    if exact_ok:
        for (p, q), c in F._terms.items():
            if not (is_exact(c) and isinstance(p, int)):
                exact_ok = False
                break
            if q != 0 and e != 1:
                exact_ok = False
                break
            if q < 0 and e == 1:
                raise ZeroDivisionError("negative log power evaluated at r = 1")
    if exact_ok:
        total = Fraction(0)
        fe = Fraction(e)
        for (p, q), c in F._terms.items():
            if q != 0:  # e == 1 here, so (ln e)^q = 0 for q >= 1
                continue
            total += Fraction(c) * fe**p
        return total
    with localcontext() as ctx:
        ctx.prec = _DECIMAL_PREC
        de = _to_decimal(e)
        ln_e = de.ln()
        by_logpow: dict[int, Decimal] = {}
        for (p, q), c in F._terms.items():
            if isinstance(p, int):
                val = _to_decimal(c) * de**p
            else:
                val = _to_decimal(c) * de**_to_decimal(p)
            by_logpow[q] = by_logpow.get(q, Decimal(0)) + val
        total = Decimal(0)
        for q, s in by_logpow.items():
            if q == 0:
                total += s
            elif ln_e == 0:
                if q < 0:
                    raise ZeroDivisionError("negative log power evaluated at r = 1")
                # q >= 1 contributes 0
            else:
                total += s * ln_e**q
        return total


class PiecewiseRadial:
    """Radial function given by disjoint pieces (a, b, RadialPoly), 0 < a < b,
    equal to zero outside all pieces."""

    __slots__ = ("_pieces",)

    def __init__(self, pieces: Iterable[tuple[Scalar, Scalar, RadialPoly]] = ()):
        cleaned = []
        for a, b, body in pieces:
            if not (a > 0 and b > a):
                raise ValueError(f"piece endpoints must satisfy 0 < a < b, got ({a}, {b})")
            if not body.is_zero:
                cleaned.append((a, b, body))
        cleaned.sort(key=lambda t: float(t[0]))
        for (a1, b1, _), (a2, _, _) in zip(cleaned, cleaned[1:]):
            if a2 < b1:
                raise ValueError("pieces must be pairwise disjoint")
        self._pieces = tuple(cleaned)

    @classmethod
    def zero(cls) -> "PiecewiseRadial":
        return cls()

    @classmethod
    def single(cls, a: Scalar, b: Scalar, body: RadialPoly) -> "PiecewiseRadial":
        return cls([(a, b, body)])

    @property
    def pieces(self) -> tuple[tuple[Scalar, Scalar, RadialPoly], ...]:
        return self._pieces

    @property
    def is_zero(self) -> bool:
        return not self._pieces

    def support(self) -> tuple[Scalar, Scalar] | None:
        if not self._pieces:
            return None
        return (self._pieces[0][0], self._pieces[-1][1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PiecewiseRadial):
            return NotImplemented
        return (self - other).is_zero_function()

    def __hash__(self):
        return hash(self._pieces)

    def is_zero_function(self) -> bool:
        return all(body.is_zero for _, _, body in self._pieces)

    def __repr__(self) -> str:
        if self.is_zero:
            return "PiecewiseRadial(0)"
        bits = [f"[{a}, {b}]: {body!r}" for a, b, body in self._pieces]
        return "PiecewiseRadial(" + "; ".join(bits) + ")"

    def _body_at(self, x: Scalar) -> RadialPoly:
        for a, b, body in self._pieces:
            if a <= x < b:
                return body
        return RadialPoly.zero()

    def __add__(self, other: "PiecewiseRadial") -> "PiecewiseRadial":
        cuts = sorted({p for piece in self._pieces + other._pieces for p in piece[:2]},
                      key=float)
        out = []
        for lo, hi in zip(cuts, cuts[1:]):
            body = self._body_at(lo) + other._body_at(lo)
            if not body.is_zero:
                out.append((lo, hi, body))
        return PiecewiseRadial(out)

    def __neg__(self) -> "PiecewiseRadial":
        return PiecewiseRadial([(a, b, -body) for a, b, body in self._pieces])

    def __sub__(self, other: "PiecewiseRadial") -> "PiecewiseRadial":
        return self + (-other)

    def scale(self, c: Scalar) -> "PiecewiseRadial":
        return PiecewiseRadial([(a, b, body.scale(c)) for a, b, body in self._pieces])

    def mul_term(self, coeff: Scalar, power: Scalar = 0, logpow: int = 0) -> "PiecewiseRadial":
        return PiecewiseRadial(
            [(a, b, body.mul_term(coeff, power, logpow)) for a, b, body in self._pieces])

    def __mul__(self, other: "PiecewiseRadial") -> "PiecewiseRadial":
        out = []
        for a1, b1, body1 in self._pieces:
            for a2, b2, body2 in other._pieces:
                lo = a1 if a1 >= a2 else a2
                hi = b1 if b1 <= b2 else b2
                if lo < hi:
                    body = body1 * body2
                    if not body.is_zero:
                        out.append((lo, hi, body))
        return PiecewiseRadial(out)

    def differentiate(self) -> "PiecewiseRadial":
        # Formal per-piece differentiation; no distributional boundary terms.
        return PiecewiseRadial(
            [(a, b, body.differentiate()) for a, b, body in self._pieces])

    def eval(self, r):
        arr = np.asarray(r, dtype=float)
        out = np.zeros_like(arr)
        for a, b, body in self._pieces:
            mask = (arr >= float(a)) & (arr < float(b))
            if mask.any():
                out[mask] = body.eval(arr[mask])
        return out if isinstance(r, np.ndarray) else float(out)

    def integrate_moment(self, gamma: Scalar = 0) -> Scalar:
        """Integral of self(r) * r**gamma over (0, oo), in closed form.

        Exact Fraction when all data is rational with integer powers;
        otherwise computed through 60-digit Decimals and returned as float.
        """
        parts = []
        for a, b, body in self._pieces:
            F = body.mul_term(1, gamma, 0).antiderivative()
            va = _eval_antideriv_at(F, a)
            vb = _eval_antideriv_at(F, b)
            if isinstance(va, Fraction) and isinstance(vb, Fraction):
                parts.append(vb - va)
            else:
                with localcontext() as ctx:
                    ctx.prec = _DECIMAL_PREC
                    da = va if isinstance(va, Decimal) else _to_decimal(va)
                    db = vb if isinstance(vb, Decimal) else _to_decimal(vb)
                    parts.append(db - da)
        if not parts:
            return Fraction(0)
        if all(isinstance(p, Fraction) for p in parts):
            return sum(parts, Fraction(0))
        with localcontext() as ctx:
            ctx.prec = _DECIMAL_PREC
            total = Decimal(0)
            for p in parts:
                total += p if isinstance(p, Decimal) else _to_decimal(p)
        return float(total)

    def scale_argument(self, lam: Scalar) -> "PiecewiseRadial":
        """The function r -> self(lam * r), supported on (a/lam, b/lam)."""
        if not lam > 0:
            raise ValueError("scaling factor must be positive")
        out = []
        log_lam = math.log(float(lam))
        for a, b, body in self._pieces:
            acc: dict = {}
            for (p, q), c in body._terms.items():
                if q < 0:
                    raise NonElementaryIntegral(
                        "argument scaling of negative log powers leaves the algebra")
                lam_p = lam**p if is_exact(lam) and isinstance(p, int) else float(lam)**float(p)
                for i in range(q + 1):
                    coeff = c * lam_p * math.comb(q, i)
                    if q - i:
                        coeff = coeff * log_lam**(q - i)
                    RadialPoly._accumulate(acc, coeff, p, i)
            poly = RadialPoly()
            poly._terms = {k: v for k, v in acc.items() if v != 0}
            out.append((_div_endpoint(a, lam), _div_endpoint(b, lam), poly))
        return PiecewiseRadial(out)


def _div_endpoint(x: Scalar, lam: Scalar) -> Scalar:
    if is_exact(x) and is_exact(lam):
        return Fraction(x) / Fraction(lam)
    return float(x) / float(lam)


# ---------------------------------------------------------------------------
# Module-level operation surface
# ---------------------------------------------------------------------------

def add(x: PiecewiseRadial, y: PiecewiseRadial) -> PiecewiseRadial:
    return x + y


def multiply(x: PiecewiseRadial, y: PiecewiseRadial) -> PiecewiseRadial:
    return x * y


def differentiate(x: PiecewiseRadial) -> PiecewiseRadial:
    return x.differentiate()


def integrate_moment(x: PiecewiseRadial, gamma: Scalar = 0) -> Scalar:
    return x.integrate_moment(gamma)


def weighted_norm_sq(x: PiecewiseRadial, beta: Scalar, n: int) -> Scalar:
    """Integral of x(r)^2 * r^(n-1-beta) dr over the pieces."""
    return (x * x).integrate_moment(_add_exp(n - 1, -beta))


def weighted_inner(x: PiecewiseRadial, y: PiecewiseRadial, beta: Scalar, n: int) -> Scalar:
    """Integral of x(r) y(r) * r^(n-1-beta) dr."""
    return (x * y).integrate_moment(_add_exp(n - 1, -beta))


def polybump(a: Scalar, b: Scalar, k: int) -> PiecewiseRadial:
    """The bump (r-a)^k (b-r)^k on [a, b], expanded exactly.

    C^(k-1) across the endpoints, so order-m operators need k >= 2m+2."""
    if k < 1:
        raise ValueError("bump order must be >= 1")
    if not (a > 0 and b > a):
        raise ValueError("bump interval must satisfy 0 < a < b")
    ea = Fraction(a) if is_exact(a) else a
    eb = Fraction(b) if is_exact(b) else b
    # (r - a)^k = sum_i C(k,i) (-a)^(k-i) r^i ; (b - r)^k = sum_j C(k,j) b^(k-j) (-1)^j r^j
    left = [math.comb(k, i) * (-ea)**(k - i) for i in range(k + 1)]
    right = [math.comb(k, j) * eb**(k - j) * (-1)**j for j in range(k + 1)]
    coeffs: dict[int, Scalar] = {}
    for i, ci in enumerate(left):
        for j, cj in enumerate(right):
            coeffs[i + j] = coeffs.get(i + j, 0) + ci * cj
    body = RadialPoly([(c, p, 0) for p, c in coeffs.items() if c != 0])
    return PiecewiseRadial.single(a, b, body)


def random_piecewise(rng: np.random.Generator, max_pieces: int = 3,
                     max_terms: int = 4, max_logpow: int = 3) -> PiecewiseRadial:
    """Seeded random function with mild exponents and O(1) coefficients,
    suitable for backend cross-validation."""
    n_pieces = int(rng.integers(1, max_pieces + 1))
    cuts = np.sort(rng.uniform(0.3, 3.5, size=2 * n_pieces))
    pieces = []
    for i in range(n_pieces):
        a, b = float(cuts[2 * i]), float(cuts[2 * i + 1])
        if b - a < 1e-2:
            b = a + 1e-2
        terms = []
        for _ in range(int(rng.integers(1, max_terms + 1))):
            c = float(rng.uniform(-3, 3))
            p = float(rng.uniform(-6, 6))
            q = int(rng.integers(0, max_logpow + 1))
            terms.append((c, p, q))
        pieces.append((a, b, RadialPoly(terms)))
    return PiecewiseRadial(pieces)
