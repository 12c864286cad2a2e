"""Operator calculus on separable functions u = f(r) Y_l(sigma).

The first-order factor T_a, its compositions R_{a,k}, the radial Laplacian
restricted to a spherical mode, and the logarithmic correction G_{a,b} all
act on piecewise radial profiles and stay inside that algebra.  Angular
sums over the L_j family are never assembled pointwise: with Y_l taken
L2-normalized they reduce to weighted 1-D integrals of the profile, and the
reduction rules here are the only place that bookkeeping lives.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .radial import (
    PiecewiseRadial,
    Scalar,
    is_exact,
    weighted_norm_sq,
)

__all__ = [
    "Mode",
    "ModeFunction",
    "mu_eigenvalue",
    "apply_T",
    "apply_R",
    "apply_delta_r_mode",
    "apply_delta_power",
    "apply_G",
    "angular_sum_Lj_norm_sq",
    "angular_sum_T_of_Lj_norm_sq",
    "angular_defect_norm_sq",
]


def mu_eigenvalue(n: int, ell: int) -> int:
    """Eigenvalue mu = ell(ell + n - 2) of the sphere Laplacian at degree ell."""
    if not isinstance(n, int) or not isinstance(ell, int):
        raise TypeError("dimension and degree must be integers")
    if ell < 0:
        raise ValueError("angular degree must be >= 0")
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if n == 1 and ell > 0:
        raise ValueError("dimension 1 admits only the radial mode ell = 0")
    return ell * (ell + n - 2)


@dataclass(frozen=True)
class Mode:
    """A fixed dimension and spherical-harmonic degree."""

    n: int
    ell: int

    def __post_init__(self) -> None:
        mu_eigenvalue(self.n, self.ell)  # runs the admissibility checks

    @property
    def mu(self) -> int:
        return self.ell * (self.ell + self.n - 2)


@dataclass(frozen=True)
class ModeFunction:
    """Radial profile f of the separable function f(r) Y_l(sigma)."""

    mode: Mode
    profile: PiecewiseRadial


def _half(x: Scalar) -> Scalar:
    return Fraction(x, 2) if is_exact(x) else x / 2


def apply_T(alpha: Scalar, n: int, f: PiecewiseRadial) -> PiecewiseRadial:
    """T_a(f) = f' + (n - 2 - a)/(2r) f."""
    return f.differentiate() + f.mul_term(_half(n - 2 - alpha), -1)


def apply_R(alpha: Scalar, k: int, n: int, f: PiecewiseRadial) -> PiecewiseRadial:
    """R_{a,k} = T_a . T_{a+2} . ... . T_{a+2k}, the innermost factor first."""
    if k < 0:
        raise ValueError("composition length k must be >= 0")
    out = f
    for j in range(k, -1, -1):
        out = apply_T(alpha + 2 * j, n, out)
    return out


def apply_delta_r_mode(mode: Mode, f: PiecewiseRadial) -> PiecewiseRadial:
    """Laplacian on mode ell: f'' + (n-1) f'/r - mu f/r^2 (plain Delta_r at ell=0)."""
    d1 = f.differentiate()
    out = d1.differentiate() + d1.mul_term(mode.n - 1, -1)
    if mode.mu:
        out = out - f.mul_term(mode.mu, -2)
    return out


def apply_delta_power(mode: Mode, m: int, f: PiecewiseRadial) -> PiecewiseRadial:
    """m-fold iteration of the mode Laplacian."""
    if m < 1:
        raise ValueError("iteration count m must be >= 1")
    out = f
    for _ in range(m):
        out = apply_delta_r_mode(mode, out)
    return out


def apply_G(alpha: Scalar, b: Scalar, n: int, f: PiecewiseRadial) -> PiecewiseRadial:
    """G_{a,b}(f) = T_a(f) + (2b - 1)/(2 r ln r) f, with the signed log.

    The signed logarithm is what makes the square-splitting identity for
    |ln r|^b weights close on both sides of r = 1 (the cross term integrates
    by parts to exactly the shifted-norm coefficient there; an absolute
    value would flip it inside the unit ball).  Pieces must not straddle
    r = 1, where the correction is singular.
    """
    c = _half(2 * b - 1) if is_exact(b) else (2 * b - 1) / 2
    extra = []
    for a_i, b_i, body in f.pieces:
        if a_i < 1 < b_i:
            raise ValueError(
                f"piece ({a_i}, {b_i}) straddles r = 1; split it first"
            )
        if c != 0:
            extra.append((a_i, b_i, body.mul_term(c, -1, -1)))
    return apply_T(alpha, n, f) + PiecewiseRadial(extra)


def angular_sum_Lj_norm_sq(u: ModeFunction, beta: Scalar) -> Scalar:
    """Sum_j |L_j u|^2 integrated with weight index beta: mu N(f, beta+2)."""
    mu = u.mode.mu
    if mu == 0:
        return 0
    return mu * weighted_norm_sq(u.profile, beta + 2, u.mode.n)


def angular_sum_T_of_Lj_norm_sq(u: ModeFunction, beta: Scalar) -> Scalar:
    """Sum_j |T_b(L_j u)|^2 with weight index beta.

    L_j u = (f/r) h_j with Sum_j h_j^2 = mu Y_l^2 on the sphere, and
    T_b(f/r) = r^{-1} T_{b+2}(f), so the sum collapses to
    mu N(T_{b+2} f, beta+2).
    """
    mu = u.mode.mu
    if mu == 0:
        return 0
    shifted = apply_T(beta + 2, u.mode.n, u.profile)
    return mu * weighted_norm_sq(shifted, beta + 2, u.mode.n)


def angular_defect_norm_sq(u: ModeFunction, beta: Scalar) -> Scalar:
    """|(Delta - Delta_r) u|^2 with weight index beta: mu^2 N(f, beta+4)."""
    mu = u.mode.mu
    if mu == 0:
        return 0
    return mu * mu * weighted_norm_sq(u.profile, beta + 4, u.mode.n)
