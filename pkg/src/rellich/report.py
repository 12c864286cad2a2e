"""Residual reports for identity and inequality checks.

A check assembles a left-hand side and a named list of right-hand summands,
then records absolute and relative residuals.  Inequality probes report the
slack LHS - RHS instead, passing when it is not meaningfully negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .radial import Scalar

# Guards the relative-residual denominator; far below any value the suite
# produces, so a genuine 0 = 0 check still reports residual 0.
EPS = 1e-300

IDENTITY_IDS = (
    "rHR1a", "HR1a", "T0", "newT1", "newT2", "kA", "kB", "newR1", "iteRak",
    "HR13", "rHR2a", "HR2a", "rHRma", "rHRmad", "HRm", "LrL", "sphere_gap",
    "TZ1", "TZ2", "new58", "HR32", "HR34", "HRln2a", "HR21ln", "ineHR2ma",
    "ineHR2m1", "HR21r",
)

# Checks parameterized by profile expressions on a model space rather than
# by (n, alpha) weight exponents.
PROFILE_IDS = (
    "HYequa1", "HRV", "cor15", "HR2hyper", "hyp", "newhyp1",
    "HRhyper1", "HRhyper1_split", "HRhyper2",
)


@dataclass(frozen=True)
class IdentityCase:
    """One identity id with its parameters and a test-function descriptor."""

    ident: str
    n: int
    alpha: Scalar
    ell: int = 0
    m: int = 1
    k: int = 0
    b: Scalar | None = None
    profile: str = ""

    def __post_init__(self) -> None:
        if self.ident not in IDENTITY_IDS:
            raise ValueError(f"unknown identity id {self.ident!r}")

    def params(self) -> dict:
        out = {"n": self.n, "alpha": float(self.alpha), "ell": self.ell,
               "m": self.m, "k": self.k}
        if self.b is not None:
            out["b"] = float(self.b)
        if self.profile:
            out["profile"] = self.profile
        return out

    def label(self) -> str:
        bits = [f"n={self.n}", f"alpha={float(self.alpha):g}",
                f"ell={self.ell}", f"m={self.m}", f"k={self.k}"]
        if self.b is not None:
            bits.append(f"b={float(self.b):g}")
        if self.profile:
            bits.append(self.profile)
        return f"{self.ident}[{','.join(bits)}]"

    def sort_key(self) -> tuple:
        return (self.ident, self.n, float(self.alpha), self.ell, self.m,
                self.k, -1.0 if self.b is None else float(self.b),
                self.profile)


@dataclass(frozen=True)
class ProfileCase:
    """A profile-driven check: named expressions on a model space."""

    ident: str
    space: str
    k: int = 0
    ell: int = 0
    V: str = ""
    f: str = ""
    u: str = ""

    def __post_init__(self) -> None:
        if self.ident not in PROFILE_IDS:
            raise ValueError(f"unknown profile check id {self.ident!r}")

    def params(self) -> dict:
        out = {"space": self.space, "k": self.k, "ell": self.ell}
        for name in ("V", "f", "u"):
            if getattr(self, name):
                out[name] = getattr(self, name)
        return out

    def label(self) -> str:
        bits = [self.space, f"k={self.k}", f"ell={self.ell}"]
        bits += [f"{name}={getattr(self, name)}" for name in ("V", "f", "u")
                 if getattr(self, name)]
        return f"{self.ident}[{','.join(bits)}]"

    def sort_key(self) -> tuple:
        return (self.ident, self.space, self.k, self.ell, self.V, self.f,
                self.u)


Case = IdentityCase | ProfileCase


@dataclass(frozen=True)
class ResidualReport:
    case: Case
    kind: str                       # "identity" or "inequality"
    lhs: Scalar
    rhs: Scalar
    terms: tuple[tuple[str, Scalar], ...]
    abs_residual: Scalar
    rel_residual: float
    slack: Scalar | None
    tolerance: float
    status: str                     # "pass", "fail" or "skipped"
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {
            "id": self.case.label(),
            "identity": self.case.ident,
            "kind": self.kind,
            "params": self.case.params(),
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "terms": {name: float(v) for name, v in self.terms},
            "abs_residual": float(self.abs_residual),
            "rel_residual": float(self.rel_residual),
            "slack": None if self.slack is None else float(self.slack),
            "tolerance": self.tolerance,
            "status": self.status,
            "note": self.note,
        }

    def __str__(self) -> str:
        if self.status == "skipped":
            return f"{self.case.label()}: skipped ({self.note})"
        tag = "slack" if self.kind == "inequality" else "rel"
        val = self.slack if self.kind == "inequality" else self.rel_residual
        return f"{self.case.label()}: {self.status} ({tag}={float(val):.3e})"


def _sum_terms(terms) -> Scalar:
    total: Scalar = 0
    for _, v in terms:
        total = total + v
    return total


def identity_report(case: Case, lhs: Scalar, terms,
                    tolerance: float = 1e-9, note: str = "",
                    extra_fail: bool = False) -> ResidualReport:
    """Report lhs against the sum of the named summands."""
    terms = tuple(terms)
    rhs = _sum_terms(terms)
    abs_res = abs(lhs - rhs)
    rel_res = float(abs_res) / (abs(float(lhs)) + abs(float(rhs)) + EPS)
    ok = rel_res <= tolerance and not extra_fail
    return ResidualReport(case=case, kind="identity", lhs=lhs, rhs=rhs,
                          terms=terms, abs_residual=abs_res,
                          rel_residual=rel_res, slack=None,
                          tolerance=tolerance,
                          status="pass" if ok else "fail", note=note)


def inequality_report(case: Case, lhs: Scalar, terms,
                      tolerance: float = 1e-10,
                      note: str = "",
                      extra_fail: bool = False) -> ResidualReport:
    """Report the slack lhs - sum(terms); passes when slack >= -tolerance."""
    terms = tuple(terms)
    rhs = _sum_terms(terms)
    slack = lhs - rhs
    abs_res = abs(slack)
    rel_res = float(abs_res) / (abs(float(lhs)) + abs(float(rhs)) + EPS)
    ok = float(slack) >= -tolerance and not extra_fail
    return ResidualReport(case=case, kind="inequality", lhs=lhs, rhs=rhs,
                          terms=terms, abs_residual=abs_res,
                          rel_residual=rel_res, slack=slack,
                          tolerance=tolerance,
                          status="pass" if ok else "fail", note=note)


def skipped_report(case: Case, reason: str,
                   kind: str = "identity") -> ResidualReport:
    return ResidualReport(case=case, kind=kind, lhs=0, rhs=0, terms=(),
                          abs_residual=0, rel_residual=0.0, slack=None,
                          tolerance=0.0, status="skipped", note=reason)
