"""Weighted polyharmonic Hardy-Rellich checks on radial model spaces.

The model geometries are Euclidean space (density r^{n-1}) and
hyperbolic space (density sinh^{n-1}), both reduced to one radial
coordinate. The alternating derivative ladder is

    D_{2m} u = Delta^m u,      D_{2m+1} u = (Delta^m u)'

with Delta f = f'' + (s'/s) f' the radial Laplacian, and adjoints

    D*_{2m} = Delta^m,         D*_{2m+1} X = -Delta^m (X' + (s'/s) X).

Profiles stay symbolic through the ladder; quotients such as
Delta f / f are never simplified symbolically, they are formed
pointwise at the quadrature nodes. Sign scans of the iterated
Laplacians gate each check: the identity route only needs the scanned
quantities to be nonvanishing, the inequality route needs strict
positivity of (-Delta)^l f, and the two gates are reported separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .profiles import (
    Const,
    Coth,
    Exp,
    ProfileExpr,
    Sinh,
    Var,
    parse_profile,
)
from .quadrature import integrate_adaptive
from .report import (
    ProfileCase,
    ResidualReport,
    identity_report,
    inequality_report,
    skipped_report,
)

__all__ = [
    "ModelSpace",
    "OperatorTower",
    "smooth_bump",
    "sample_profile",
    "bessel_weight",
    "check_HYequa1",
    "check_HRV",
    "probe_corollary15",
]

TOL_MANIFOLD = 1e-8
SCAN_POINTS = 256
_QTOL = 1e-12


def _as_profile(x) -> ProfileExpr:
    if isinstance(x, ProfileExpr):
        return x
    if isinstance(x, str):
        return parse_profile(x)
    if isinstance(x, (int, float, Fraction)):
        return Const(Fraction(x) if not isinstance(x, float) else x)
    raise TypeError(f"cannot interpret {type(x).__name__} as a profile")


@dataclass(frozen=True)
class ModelSpace:
    """Radial model geometry with volume density s > 0 on (0, oo)."""

    kind: str
    n: int

    def __post_init__(self) -> None:
        if self.kind not in ("euclidean", "hyperbolic"):
            raise ValueError(f"unknown model space kind {self.kind!r}")
        if self.n < 2:
            raise ValueError("dimension must be >= 2")

    @classmethod
    def euclidean(cls, n: int) -> "ModelSpace":
        return cls("euclidean", n)

    @classmethod
    def hyperbolic(cls, n: int) -> "ModelSpace":
        return cls("hyperbolic", n)

    @property
    def var(self) -> Var:
        return Var("r" if self.kind == "euclidean" else "rho")

    def density(self) -> ProfileExpr:
        base = self.var if self.kind == "euclidean" else Sinh(self.var)
        return base ** (self.n - 1)

    def drift(self) -> ProfileExpr:
        """s'/s: the first-order coefficient of the radial Laplacian."""
        c = Const(Fraction(self.n - 1))
        if self.kind == "euclidean":
            return c * self.var ** -1
        return c * Coth(self.var)

    def laplacian(self, e: ProfileExpr) -> ProfileExpr:
        d = e.deriv()
        return d.deriv() + self.drift() * d

    def integrate(self, fn: Callable, support) -> float:
        """Integral of fn(t) s(t) dt over the support interval."""
        a, b = (float(x) for x in support)
        s = self.density()
        res = integrate_adaptive(lambda t: fn(t) * s(t), a, b,
                                 abs_tol=_QTOL, rel_tol=_QTOL)
        return res.value

    def label(self) -> str:
        return f"{self.kind}({self.n})"


@dataclass(frozen=True)
class OperatorTower:
    """Iterated radial Laplacians of one profile, with derivatives.

    Entry l holds Delta^l applied to the base; gradient l is its
    radial derivative, so the full ladder D_0, D_1, ... is available as
    lap(l) and grad(l).
    """

    base: ProfileExpr
    space: ModelSpace
    laplacians: tuple
    gradients: tuple

    @classmethod
    def build(cls, base: ProfileExpr, space: ModelSpace,
              levels: int) -> "OperatorTower":
        laps = [base]
        for _ in range(levels):
            laps.append(space.laplacian(laps[-1]))
        return cls(base, space, tuple(laps), tuple(e.deriv() for e in laps))

    def lap(self, ell: int) -> ProfileExpr:
        return self.laplacians[ell]

    def grad(self, ell: int) -> ProfileExpr:
        return self.gradients[ell]

    def validate(self, window=(0.5, 2.5), points: int = 20) -> dict:
        """Max relative deviation of each entry from the one below it.

        "symbolic" re-applies the Laplacian to entry l and compares
        values against entry l+1; "finite_difference" rebuilds entry
        l+1 from 5-point stencils of entry l.
        """
        a, b = (float(x) for x in window)
        ts = np.linspace(a, b, points)
        h = 1e-3
        drift = self.space.drift()
        worst_sym = 0.0
        worst_fd = 0.0
        for ell in range(len(self.laplacians) - 1):
            lo, hi = self.laplacians[ell], self.laplacians[ell + 1]
            scale = np.abs(hi(ts)).max() + 1e-30
            resym = self.space.laplacian(lo)
            worst_sym = max(worst_sym,
                            np.abs(resym(ts) - hi(ts)).max() / scale)
            f2, f1, f0 = lo(ts + 2 * h), lo(ts + h), lo(ts)
            g1, g2 = lo(ts - h), lo(ts - 2 * h)
            d1 = (-f2 + 8 * f1 - 8 * g1 + g2) / (12 * h)
            d2 = (-f2 + 16 * f1 - 30 * f0 + 16 * g1 - g2) / (12 * h * h)
            fd = d2 + drift(ts) * d1
            worst_fd = max(worst_fd, np.abs(fd - hi(ts)).max() / scale)
        return {"symbolic": worst_sym, "finite_difference": worst_fd}


def smooth_bump(a, b, var: str = "r") -> ProfileExpr:
    """exp(-1/((t-a)(b-t))): compactly supported on [a, b], smooth."""
    t = Var(var)
    return Exp(Const(Fraction(-1)) / ((t - a) * (b - t)))


def sample_profile(e: ProfileExpr, points) -> np.ndarray:
    """Evaluate e at points, rejecting division blowups."""
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    vals = np.atleast_1d(e(pts))
    bad = ~np.isfinite(vals)
    if bad.any():
        raise ValueError(f"singular sample at t={pts[bad][0]:g}")
    return vals


def bessel_weight(V, f, space: ModelSpace) -> ProfileExpr:
    """The induced Hardy weight W = -div(V grad f)/f on the model space.

    Spelled out, W = -(V/f)[f'' + (s'/s + V'/V) f'] with the density
    drift in place of the Euclidean (n-1)/r. The result is symbolic;
    evaluate it through sample_profile to surface singular points.
    """
    V, f = _as_profile(V), _as_profile(f)
    flux = V * f.deriv()
    divergence = flux.deriv() + space.drift() * flux
    return -divergence / f


def _sign_scan(e: ProfileExpr, support, points: int = SCAN_POINTS):
    """Strict sign of e on the open interval, or None.

    Samples interior points plus the symbolic expression at the
    midpoint. A scan is a precondition gate, not a proof.
    """
    a, b = (float(x) for x in support)
    ts = np.linspace(a, b, points + 2)[1:-1]
    vals = np.append(np.atleast_1d(e(ts)), e(0.5 * (a + b)))
    if not np.isfinite(vals).all():
        return None
    if (vals > 0).all():
        return 1
    if (vals < 0).all():
        return -1
    return None


def _is_unit(e: ProfileExpr) -> bool:
    return isinstance(e, Const) and e.value == 1


def check_HYequa1(V, f, u, space: ModelSpace, *, support=(1, 2),
                  tolerance: float = TOL_MANIFOLD) -> ResidualReport:
    """First-order weighted identity on a model space.

    int V u'^2 = -int (div(V grad f)/f) u^2 + int V (u' - (u/f) f')^2,
    all against the volume density. f must not vanish on the support.
    """
    V, f, u = _as_profile(V), _as_profile(f), _as_profile(u)
    case = ProfileCase("HYequa1", space.label(), k=1,
                       V=str(V), f=str(f), u=str(u))
    if _sign_scan(f, support) is None:
        raise ValueError("f vanishes on the support of u")

    du, df, Vp = u.deriv(), f.deriv(), V.deriv()
    drift = space.drift()
    div = V * f.deriv().deriv() + Vp * df + drift * V * df

    lhs = space.integrate(lambda t: V(t) * du(t) ** 2, support)
    bessel = space.integrate(
        lambda t: -(div(t) / f(t)) * u(t) ** 2, support)
    remainder = space.integrate(
        lambda t: V(t) * (du(t) - u(t) / f(t) * df(t)) ** 2, support)
    return identity_report(case, lhs, [("bessel", bessel),
                                       ("remainder", remainder)], tolerance)


def _hrv_terms(k: int, V: ProfileExpr, f_tower: OperatorTower,
               u_tower: OperatorTower, space: ModelSpace, support):
    """The general-weight assembly: (bessel, grad_sum, lap_sum, last)."""
    m, q = k // 2, (k - 1) // 2
    f_expr = f_tower.base
    Dk_f = f_tower.lap(m) if k % 2 == 0 else f_tower.grad(m)
    Dk_u = u_tower.lap(m) if k % 2 == 0 else u_tower.grad(m)

    G = V * Dk_f
    adj_base = G if k % 2 == 0 else G.deriv() + space.drift() * G
    adj = OperatorTower.build(adj_base, space, m)

    def dstar(j: int) -> ProfileExpr:
        # j has the parity of k by construction
        if j % 2 == 0:
            return adj.lap(j // 2)
        return -adj.lap((j - 1) // 2)

    bessel = space.integrate(
        lambda t, c=dstar(k): c(t) / f_expr(t) * u_tower.base(t) ** 2,
        support)

    grad_sum = 0.0
    for ell in range(0, (k - 2) // 2 + 1 if k >= 2 else 0):
        def fn(t, c=dstar(k - 2 - 2 * ell), fl=f_tower.lap(ell),
               fg=f_tower.grad(ell), ul=u_tower.lap(ell),
               ug=u_tower.grad(ell)):
            w = ug(t) - ul(t) / fl(t) * fg(t)
            return c(t) / fl(t) * w * w
        grad_sum += -2.0 * space.integrate(fn, support)

    lap_sum = 0.0
    for ell in range(1, q + 1):
        def fn(t, c=dstar(k - 2 * ell), fl=f_tower.lap(ell),
               fp=f_tower.lap(ell - 1), ul=u_tower.lap(ell),
               up=u_tower.lap(ell - 1)):
            w = ul(t) - up(t) / fp(t) * fl(t)
            return c(t) / fl(t) * w * w
        lap_sum += space.integrate(fn, support)

    def last_fn(t, fl=f_tower.lap(q), ul=u_tower.lap(q)):
        w = Dk_u(t) - ul(t) / fl(t) * Dk_f(t)
        return V(t) * w * w

    last = space.integrate(last_fn, support)
    return bessel, grad_sum, lap_sum, last


def _hrv_unit_terms(k: int, f_tower: OperatorTower, u_tower: OperatorTower,
                    space: ModelSpace, support):
    """The unit-weight simplification: ratios of (-Delta)^l f."""
    m, q = k // 2, (k - 1) // 2
    f_expr = f_tower.base
    Dk_f = f_tower.lap(m) if k % 2 == 0 else f_tower.grad(m)
    Dk_u = u_tower.lap(m) if k % 2 == 0 else u_tower.grad(m)
    sign_k = -1.0 if k % 2 else 1.0

    bessel = space.integrate(
        lambda t, top=f_tower.lap(k): sign_k * top(t) / f_expr(t)
        * u_tower.base(t) ** 2,
        support)

    grad_sum = 0.0
    for ell in range(0, (k - 2) // 2 + 1 if k >= 2 else 0):
        def fn(t, c=f_tower.lap(k - 1 - ell), fl=f_tower.lap(ell),
               fg=f_tower.grad(ell), ul=u_tower.lap(ell),
               ug=u_tower.grad(ell)):
            w = ug(t) - ul(t) / fl(t) * fg(t)
            return c(t) / fl(t) * w * w
        grad_sum += -2.0 * sign_k * space.integrate(fn, support)

    lap_sum = 0.0
    for ell in range(1, q + 1):
        def fn(t, c=f_tower.lap(k - ell), fl=f_tower.lap(ell),
               fp=f_tower.lap(ell - 1), ul=u_tower.lap(ell),
               up=u_tower.lap(ell - 1)):
            w = ul(t) - up(t) / fp(t) * fl(t)
            return c(t) / fl(t) * w * w
        lap_sum += sign_k * space.integrate(fn, support)

    def last_fn(t, fl=f_tower.lap(q), ul=u_tower.lap(q)):
        w = Dk_u(t) - ul(t) / fl(t) * Dk_f(t)
        return w * w

    last = space.integrate(last_fn, support)
    return bessel, grad_sum, lap_sum, last


def _rel_gap(a: float, b: float) -> float:
    return abs(a - b) / (abs(a) + abs(b) + 1e-300)


def check_HRV(k: int, V, f, u, space: ModelSpace, *, support=(1, 2),
              tolerance: float = TOL_MANIFOLD) -> ResidualReport:
    """Order-k general-weight identity for a radial u on a model space.

    Reports int V (D_k u)^2 against the weighted mass term plus the
    signed defect sums. Iterated Laplacians of f that enter a
    denominator are sign-scanned first (the nonvanishing gate); a
    failed scan skips the case with a diagnostic. A unit weight
    switches to the simplified assembly with (-Delta)^l f ratios and
    cross-checks it against the general one.
    """
    if not isinstance(k, int) or not 1 <= k <= 5:
        raise ValueError("order k must be an integer in 1..5")
    V, f, u = _as_profile(V), _as_profile(f), _as_profile(u)
    case = ProfileCase("HRV", space.label(), k=k,
                       V=str(V), f=str(f), u=str(u))

    unit = _is_unit(V)
    f_tower = OperatorTower.build(f, space, k if unit else (k + 1) // 2)
    u_tower = OperatorTower.build(u, space, (k + 1) // 2)

    for ell in range((k + 1) // 2):  # exactly the levels with 2*ell < k
        if _sign_scan(f_tower.lap(ell), support) is None:
            return skipped_report(
                case, f"nonvanishing gate: Delta^{ell} f changes sign or "
                      f"vanishes on the support")

    m = k // 2
    Dk_u = u_tower.lap(m) if k % 2 == 0 else u_tower.grad(m)
    lhs = space.integrate(lambda t: V(t) * Dk_u(t) ** 2, support)

    general = _hrv_terms(k, V, f_tower, u_tower, space, support)
    if unit:
        simplified = _hrv_unit_terms(k, f_tower, u_tower, space, support)
        gap = max(_rel_gap(a, b) for a, b in zip(general, simplified))
        bessel, grad_sum, lap_sum, last = simplified
        note = f"unit-weight form; general-assembly gap {gap:.2e}"
        extra_fail = gap > tolerance
    else:
        bessel, grad_sum, lap_sum, last = general
        note = "nonvanishing gate ok"
        extra_fail = False

    terms = [("bessel", bessel)]
    if k >= 2:
        terms.append(("grad_defects", grad_sum))
    if (k - 1) // 2 >= 1:
        terms.append(("lap_defects", lap_sum))
    terms.append(("last_defect", last))
    return identity_report(case, lhs, terms, tolerance, note=note,
                           extra_fail=extra_fail)


def probe_corollary15(k: int, f, u, space: ModelSpace, *, support=(1, 2),
                      tolerance: float = TOL_MANIFOLD) -> ResidualReport:
    """Slack of int (D_k u)^2 >= int ((-Delta)^k f / f) u^2.

    Gated on the positivity scan (-Delta)^l f > 0 for l < k, which is
    stricter than the nonvanishing gate of the identity route.
    """
    if not isinstance(k, int) or not 1 <= k <= 5:
        raise ValueError("order k must be an integer in 1..5")
    f, u = _as_profile(f), _as_profile(u)
    case = ProfileCase("cor15", space.label(), k=k, f=str(f), u=str(u))

    f_tower = OperatorTower.build(f, space, k)
    for ell in range(k):
        want = 1 if ell % 2 == 0 else -1
        if _sign_scan(f_tower.lap(ell), support) != want:
            return skipped_report(
                case, f"positivity gate: (-Delta)^{ell} f is not strictly "
                      f"positive on the support", kind="inequality")

    m = k // 2
    u_tower = OperatorTower.build(u, space, (k + 1) // 2)
    Dk_u = u_tower.lap(m) if k % 2 == 0 else u_tower.grad(m)
    sign_k = -1.0 if k % 2 else 1.0

    lhs = space.integrate(lambda t: Dk_u(t) ** 2, support)
    bound = space.integrate(
        lambda t, top=f_tower.lap(k): sign_k * top(t) / f(t) * u(t) ** 2,
        support)
    return inequality_report(case, lhs, [("bessel_bound", bound)],
                             tolerance, note="positivity gate ok")
