"""Hyperbolic-space checks: coordinate conversion, the radial Laplacian,
mode norms, the second-order identity, and the Rellich-type slack probes."""

import math
from fractions import Fraction as F

import numpy as np
import pytest

from rellich.hyperbolic import (
    HypFunction,
    check_hyp_equality,
    check_identity_HR2hyper,
    check_newhyp1,
    delta_rho_H,
    hyp_norms,
    probe_hyper_inequalities,
    rho_r_convert,
    seeded_bumps,
)
from rellich.manifold import ModelSpace, smooth_bump
from rellich.modes import mu_eigenvalue
from rellich.profiles import Const, parse_profile
from rellich.quadrature import integrate_adaptive

BUMP = smooth_bump(1, 2, var="rho")


# ----------------------------------------------------------------- conversion

def test_convert_known_values():
    assert rho_r_convert(0.0, "to_rho") == 0.0
    assert rho_r_convert(0.0, "to_r") == 0.0
    r = (math.e - 1) / (math.e + 1)
    assert math.isclose(rho_r_convert(r, "to_rho"), 1.0, rel_tol=1e-14)
    assert math.isclose(rho_r_convert(1.0, "to_r"), r, rel_tol=1e-14)


def test_convert_round_trip():
    rng = np.random.default_rng(7)
    for r in rng.uniform(0.01, 0.99, size=10):
        rho = rho_r_convert(float(r), "to_rho")
        assert math.isclose(rho_r_convert(rho, "to_r"), r, rel_tol=1e-14)
    for rho in rng.uniform(0.05, 8.0, size=10):
        r = rho_r_convert(float(rho), "to_r")
        assert math.isclose(rho_r_convert(r, "to_rho"), rho, rel_tol=1e-14)


def test_convert_domain_errors():
    with pytest.raises(ValueError):
        rho_r_convert(1.0, "to_rho")
    with pytest.raises(ValueError):
        rho_r_convert(-0.1, "to_rho")
    with pytest.raises(ValueError):
        rho_r_convert(-1.0, "to_r")
    with pytest.raises(ValueError):
        rho_r_convert(0.5, "sideways")


# ------------------------------------------------------------ radial operator

def test_delta_rho_constants_and_cosh():
    assert delta_rho_H(4, 1) == Const(0)
    lc = delta_rho_H(6, "cosh(rho)")
    t = np.linspace(0.2, 2.5, 9)
    assert np.allclose(lc(t), 6 * np.cosh(t), rtol=1e-13)


def test_derivative_adjoint_against_density():
    # <df, h> + <f, dh> + (n-1) <f, coth h> = 0 for compact bumps
    for n in (3, 5):
        space = ModelSpace.hyperbolic(n)
        f = smooth_bump(0.8, 1.9, var="rho")
        h = smooth_bump(1.0, 1.7, var="rho")
        df, dh = f.deriv(), h.deriv()
        drift = space.drift()
        total = space.integrate(
            lambda t: df(t) * h(t) + f(t) * dh(t) + drift(t) * f(t) * h(t),
            (1.0, 1.7),
        )
        assert abs(total) <= 1e-9


# ----------------------------------------------------------------- mode norms

def test_hyp_function_validation():
    with pytest.raises(ValueError):
        HypFunction(1, 0, BUMP)
    with pytest.raises(ValueError):
        HypFunction(3, -1, BUMP)
    with pytest.raises(ValueError):
        HypFunction(3, 0, BUMP, support=(2.0, 1.0))
    hf = HypFunction(4, 2, "rho^2", support=(0.5, 1.5))
    assert hf.mu == mu_eigenvalue(4, 2)
    assert hf.profile == parse_profile("rho^2")


def test_hyp_norms_entries():
    hf = HypFunction(3, 1, BUMP)
    norms = hyp_norms(hf)
    assert all(v >= 0 for v in norms.values())
    assert norms["sum_Lj"] == hf.mu * norms["u_over_sh"]
    assert norms["sum_Lj_over_sh"] == hf.mu * norms["u_over_sh2"]
    # n = 3 density is sh^2, so the 1/sh norm is the plain L2 mass in rho
    plain = integrate_adaptive(lambda t: BUMP(t) ** 2, 1, 2,
                               abs_tol=1e-13, rel_tol=1e-13).value
    assert np.isclose(norms["u_over_sh"], plain, rtol=1e-11)


def test_hyp_norms_radial_mode_has_no_angular_content():
    norms = hyp_norms(HypFunction(5, 0, BUMP))
    assert norms["sum_Lj"] == 0
    assert norms["sum_dLj"] == 0


# ------------------------------------------------------- second-order identity

def test_identity_degenerates_at_ell_zero():
    rep = check_identity_HR2hyper(4, 0, BUMP)
    assert rep.status == "pass"
    assert rep.rel_residual == 0.0
    terms = dict(rep.terms)
    assert terms["angular"] == 0.0
    assert terms["modes"] == 0.0


@pytest.mark.parametrize("n,ell", [(2, 1), (3, 1), (4, 2), (5, 2)])
def test_identity_modes(n, ell):
    rep = check_identity_HR2hyper(n, ell, BUMP)
    assert rep.status == "pass"
    assert rep.rel_residual <= 1e-8


def test_identity_polynomial_profile():
    rep = check_identity_HR2hyper(3, 1, "((rho-1)*(2-rho))^6")
    assert rep.status == "pass"
    assert rep.rel_residual <= 1e-8


# --------------------------------------------------------- first-order equality

def test_hyp_equality_zero_function():
    rep = check_hyp_equality(5, 0)
    assert rep.status == "pass"
    assert rep.lhs == 0


def test_hyp_equality_n3_drops_sh_term():
    rep = check_hyp_equality(3, BUMP)
    assert rep.status == "pass"
    assert rep.rel_residual <= 1e-8
    assert dict(rep.terms)["sh_correction"] == 0


@pytest.mark.parametrize("n", [2, 5, 6])
def test_hyp_equality_dimensions(n):
    rep = check_hyp_equality(n, BUMP)
    assert rep.status == "pass"
    assert rep.rel_residual <= 1e-8
    assert dict(rep.terms)["remainder"] >= 0


# --------------------------------------------------------- substituted identity

def test_newhyp1_zero_function():
    rep = check_newhyp1(4, 0)
    assert rep.status == "pass"
    assert rep.lhs == 0


def test_newhyp1_n3_constant_A():
    # A = 1 identically, so every (n-3)-weighted bracket vanishes
    rep = check_newhyp1(3, BUMP)
    assert rep.status == "pass"
    terms = dict(rep.terms)
    assert terms["sh4"] == 0.0
    assert terms["sh2"] == 0.0
    assert terms["w_gradient"] == 0.0


@pytest.mark.parametrize("n", [3, 5, 6])
def test_newhyp1_dimensions(n):
    rep = check_newhyp1(n, BUMP)
    assert rep.status == "pass"
    assert rep.rel_residual <= 1e-8


# ------------------------------------------------------------- slack probes

def test_probe_requires_n_at_least_three():
    with pytest.raises(ValueError):
        probe_hyper_inequalities(2, 1, [BUMP])


def test_probe_report_structure():
    reps = probe_hyper_inequalities(4, 1, [BUMP])
    assert [r.case.ident for r in reps] == ["HRhyper1", "HRhyper1_split", "HRhyper2"]
    assert all(r.kind == "inequality" for r in reps)
    assert "coth-form gap" in reps[1].note
    assert reps[2].note.startswith("three-term display slack")


def test_probe_radial_mode_saturates_comparison():
    # ell = 0 kills every mode term, so the first bound is an equality
    reps = probe_hyper_inequalities(5, 0, [BUMP])
    assert reps[0].slack == 0.0
    assert reps[0].status == "pass"


@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("ell", [0, 1, 2])
def test_probe_slacks_nonnegative(n, ell):
    reps = probe_hyper_inequalities(n, ell, seeded_bumps(3, seed=100 * n + ell))
    assert len(reps) == 9
    for r in reps:
        assert r.status == "pass"
        assert float(r.slack) >= -1e-8


def test_probe_n3_reduces_to_display():
    reps = probe_hyper_inequalities(3, 1, [BUMP])
    r2 = reps[2]
    assert "1, 1/2, 9/16" in r2.note
    terms = dict(r2.terms)
    norms = hyp_norms(HypFunction(3, 1, BUMP))
    assert terms["mass"] == norms["u"]
    assert terms["hardy"] == F(1, 2) * norms["u_over_rho"]
    assert terms["hardy2"] == F(9, 16) * norms["u_over_rho2"]
    assert terms["sh2"] == 0
    assert terms["sh"] == 0
    assert terms["rho_sh"] == 0


def test_probe_accepts_hyp_functions():
    hf = HypFunction(4, 1, BUMP, support=(1.0, 2.0))
    reps = probe_hyper_inequalities(4, 1, [hf])
    assert len(reps) == 3
    with pytest.raises(ValueError):
        probe_hyper_inequalities(5, 1, [hf])


def test_seeded_bumps_reproducible():
    first = seeded_bumps(4, seed=11)
    second = seeded_bumps(4, seed=11)
    assert [(str(p), s) for p, s in first] == [(str(p), s) for p, s in second]
    assert all(0 < a < b for _, (a, b) in first)


# ------------------------------------------------------------------ invariants

def test_mode_eigenvalue_defect_bound():
    # mu^2 >= (n-1) mu with equality exactly at ell = 1
    for n in (3, 4, 5, 8):
        for ell in (1, 2, 3, 5):
            mu = mu_eigenvalue(n, ell)
            assert mu * mu >= (n - 1) * mu
            assert (mu * mu == (n - 1) * mu) == (ell == 1)


def test_rho_dominated_by_sh():
    t = np.linspace(1e-6, 12.0, 4001)
    assert np.all(t ** 2 <= np.sinh(t) ** 2)
