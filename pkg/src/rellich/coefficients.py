"""Exact constants and coefficient recurrences.

A_beta, D_beta, the three coefficient families C, C_hat, C_tilde, the
product constants H_k, the half-integer factors gamma_j, the polyharmonic
power-rule constant, and the admissible-range predicates.

All recurrences run in exact rational arithmetic.  Float parameters are
converted exactly (every binary64 value is a dyadic rational), so a single
code path serves both exact and numeric callers; results come back as
Fraction and may be floated at the reporting boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

Scalar = Union[int, Fraction, float]


def _exactify(x: Scalar) -> Scalar:
    """Rational inputs (including whole floats) go to Fraction; other floats stay."""
    if isinstance(x, bool):
        raise TypeError("boolean is not a coefficient parameter")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if x == int(x):
            return Fraction(int(x))
        # floats are binary rationals; exact conversion keeps the shared
        # recurrence path deterministic for dyadic values like 2.5
        return Fraction(x)
    raise TypeError(f"unsupported parameter type {type(x)!r}")


def A_const(n: int, beta: Scalar) -> Fraction:
    """(n+beta)(n-4-beta)/4."""
    b = _exactify(beta)
    return (n + b) * (n - 4 - b) / 4


def D_const(n: int, beta: Scalar) -> Fraction:
    """((n+beta)^2 + (n-4-beta)^2)/4."""
    b = _exactify(beta)
    return ((n + b) ** 2 + (n - 4 - b) ** 2) / 4


@lru_cache(maxsize=None)
def _C_cached(j: int, m: int, alpha: Fraction, n: int) -> Fraction:
    if j < 0 or j > 2 * m:
        return Fraction(0)
    if m == 0:
        return Fraction(1) if j == 0 else Fraction(0)
    k = m - 1  # recurrence steps from level k to k+1
    A = A_const(n, alpha + 4 * k)
    D = D_const(n, alpha + 4 * k)
    return (A * A * _C_cached(j - 2, k, alpha, n)
            + D * _C_cached(j - 1, k, alpha, n)
            + _C_cached(j, k, alpha, n))


def C_coeff(j: int, m: int, alpha: Scalar, n: int) -> Fraction:
    """Coefficient C_{j,m} from the three-term recurrence; 0 outside 0 <= j <= 2m."""
    return _C_cached(j, m, _exactify(alpha), n)


def H_const(k: int, alpha: Scalar, n: int) -> Fraction:
    """Product of A_{alpha+4l}^2 over 0 <= l <= k; H_{-1} = 1."""
    if k < -1:
        raise ValueError("k must be >= -1")
    a = _exactify(alpha)
    out = Fraction(1)
    for ell in range(k + 1):
        out *= A_const(n, a + 4 * ell) ** 2
    return out


@lru_cache(maxsize=None)
def _C_hat_cached(j: int, m: int, alpha: Fraction, k: int, n: int) -> Fraction:
    # The recurrence shifts alpha between recursive calls, so the memo key
    # must carry alpha (and k) in full.
    if j < 0 or j > 2 * m:
        return Fraction(0)
    if m == 0:
        return Fraction(1) if j == 0 else Fraction(0)
    A = A_const(n, alpha + 2 * k + 2)
    D = D_const(n, alpha + 2 * k + 2)
    return (A * A * _C_hat_cached(j - 2, m - 1, alpha + 4, k, n)
            + D * _C_hat_cached(j - 1, m - 1, alpha + 2, k + 1, n)
            + _C_hat_cached(j, m - 1, alpha, k + 2, n))


def C_hat(j: int, m: int, alpha: Scalar, k: int, n: int) -> Fraction:
    """Coefficient C_hat_{j,m,alpha,k}; 0 outside 0 <= j <= 2m."""
    return _C_hat_cached(j, m, _exactify(alpha), k, n)


def C_tilde(j: int, m: int, alpha: Scalar, n: int) -> Fraction:
    """Coefficient of the radial-gradient decomposition:

        C_tilde_{j,m,alpha} = C_hat_{j,m,alpha,0} + ((n-2-alpha)/2)^2 * C_{j-1,m,alpha+2}.

    This is the combination produced by splitting |(d/dr) Delta_r^m u| with
    the first-order radial identity and expanding both halves; it makes the
    decomposition exact (validated to rational-zero residual by the
    identity suite).
    """
    a = _exactify(alpha)
    h = (n - 2 - a) / 2
    return C_hat(j, m, a, 0, n) + h * h * C_coeff(j - 1, m, a + 2, n)


def gamma_halfint(j: int) -> Fraction:
    """gamma_0 = 1, gamma_j = (2j-1)!! / 2^j."""
    if j < 0:
        raise ValueError("j must be >= 0")
    if j == 0:
        return Fraction(1)
    dfact = 1
    for i in range(1, 2 * j, 2):
        dfact *= i
    return Fraction(dfact, 2**j)


def power_rule_constant(n: int, sigma: Scalar, k: int) -> Fraction:
    """c with (-Laplacian)^k r^sigma = c * r^(sigma - 2k):

        c = prod_{l=0}^{k-1} [ -(sigma - 2l)(sigma - 2l + n - 2) ].
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    s = _exactify(sigma)
    out = Fraction(1)
    for ell in range(k):
        out *= -(s - 2 * ell) * (s - 2 * ell + n - 2)
    return out


@dataclass(frozen=True)
class RangeVerdict:
    predicate: str
    n: int
    alpha: float
    holds: bool
    lhs: float
    bound: float


_RANGE_IDS = ("rellich", "rellich_intro_variant", "grad_rellich", "tz2c")


def range_check(pred: str, n: int, alpha: Scalar) -> RangeVerdict:
    """Admissible-range predicates for the weighted inequalities.

    rellich:              |alpha+2| <= sqrt(n^2-2n+2)   (equivalent to 2A_alpha + n-1 >= 0)
    rellich_intro_variant:|alpha+2| <= 2 sqrt(n^2-2n+2) (looser printed variant, for comparison)
    grad_rellich:         |3 alpha + n + 4| <= 2 sqrt(n^2-n+1)
    tz2c:                 -n <= alpha <= (n^3-9n^2+25n-24)/(3n^2-11n+11), needs n >= 3
    """
    a = _exactify(alpha)
    if pred == "rellich":
        lhs = abs(a + 2)
        holds = lhs * lhs <= n * n - 2 * n + 2
        return RangeVerdict(pred, n, float(a), bool(holds), float(lhs),
                            math.sqrt(n * n - 2 * n + 2))
    if pred == "rellich_intro_variant":
        lhs = abs(a + 2)
        holds = lhs * lhs <= 4 * (n * n - 2 * n + 2)
        return RangeVerdict(pred, n, float(a), bool(holds), float(lhs),
                            2 * math.sqrt(n * n - 2 * n + 2))
    if pred == "grad_rellich":
        lhs = abs(3 * a + n + 4)
        holds = lhs * lhs <= 4 * (n * n - n + 1)
        return RangeVerdict(pred, n, float(a), bool(holds), float(lhs),
                            2 * math.sqrt(n * n - n + 1))
    if pred == "tz2c":
        if n < 3:
            raise ValueError("tz2c requires n >= 3")
        upper = Fraction(n**3 - 9 * n**2 + 25 * n - 24, 3 * n**2 - 11 * n + 11)
        holds = -n <= a <= upper
        return RangeVerdict(pred, n, float(a), bool(holds), float(a), float(upper))
    raise ValueError(f"unknown range predicate {pred!r}; know {_RANGE_IDS}")


@dataclass(frozen=True)
class CoefficientTable:
    """All C-family values at fixed (n, alpha) up to level m_max."""
    n: int
    alpha: Scalar
    kind: str  # C | C_hat | C_tilde
    m_max: int
    entries: dict

    @classmethod
    def build(cls, n: int, alpha: Scalar, kind: str, m_max: int, k: int = 0) -> "CoefficientTable":
        if kind not in ("C", "C_hat", "C_tilde"):
            raise ValueError(f"unknown table kind {kind!r}")
        entries = {}
        for m in range(0, m_max + 1):
            for j in range(0, 2 * m + 1):
                if kind == "C":
                    entries[(j, m)] = C_coeff(j, m, alpha, n)
                elif kind == "C_hat":
                    entries[(j, m)] = C_hat(j, m, alpha, k, n)
                else:
                    entries[(j, m)] = C_tilde(j, m, alpha, n)
        return cls(n, alpha, kind, m_max, entries)
