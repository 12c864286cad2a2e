"""Mode-level operator algebra: T, R, the mode Laplacian, G, angular sums."""

import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from rellich.modes import (
    Mode,
    ModeFunction,
    angular_defect_norm_sq,
    angular_sum_Lj_norm_sq,
    angular_sum_T_of_Lj_norm_sq,
    apply_G,
    apply_R,
    apply_T,
    apply_delta_power,
    apply_delta_r_mode,
    mu_eigenvalue,
)
from rellich.quadrature import integrate_adaptive
from rellich.radial import (
    PiecewiseRadial,
    RadialPoly,
    is_exact,
    polybump,
    weighted_inner,
    weighted_norm_sq,
)

dims = st.integers(2, 9)
small_fraction = st.builds(F, st.integers(-8, 8), st.sampled_from([1, 2, 4]))
half_int = st.builds(F, st.integers(-4, 4), st.just(2))


def monomial_piece(a, b, coeff, power, logpow=0):
    return PiecewiseRadial.single(a, b, RadialPoly.monomial(coeff, power, logpow))


def assert_same_value(lhs, rhs):
    # Moments whose weight exponent lands on r^{-1} pick up log endpoint
    # values and leave the rational fast path; everything else stays exact.
    if is_exact(lhs) and is_exact(rhs):
        assert lhs == rhs
    else:
        assert math.isclose(float(lhs), float(rhs), rel_tol=1e-12, abs_tol=1e-20)


# ---------------------------------------------------------------- eigenvalues

def test_mu_values():
    assert mu_eigenvalue(3, 1) == 2
    assert mu_eigenvalue(3, 2) == 6
    assert mu_eigenvalue(5, 1) == 4  # first nonzero eigenvalue is n-1
    assert mu_eigenvalue(1, 0) == 0
    assert mu_eigenvalue(2, 3) == 9


def test_mu_rejects_bad_modes():
    with pytest.raises(ValueError):
        mu_eigenvalue(1, 1)
    with pytest.raises(ValueError):
        mu_eigenvalue(0, 0)
    with pytest.raises(ValueError):
        mu_eigenvalue(3, -1)
    with pytest.raises(TypeError):
        mu_eigenvalue(3.0, 1)


def test_mode_carries_mu():
    assert Mode(4, 2).mu == 8
    assert Mode(7, 0).mu == 0
    with pytest.raises(ValueError):
        Mode(1, 2)


@given(n=dims, ell=st.integers(0, 6))
def test_mu_vanishes_only_at_degree_zero(n, ell):
    assert (Mode(n, ell).mu == 0) == (ell == 0)


# ------------------------------------------------------------------------- T

def test_T_on_constant_profile():
    f = monomial_piece(1, 2, 1, 0)
    assert apply_T(0, 3, f) == monomial_piece(1, 2, F(1, 2), -1)


def test_T_annihilates_its_kernel_power():
    for n, a in ((5, 0), (3, -2), (8, F(3, 2))):
        f = monomial_piece(1, 2, 1, -F(n - 2 - a, 2))
        assert apply_T(a, n, f).is_zero_function()


def test_T_linear_profile():
    f = monomial_piece(1, 2, 1, 1)
    assert apply_T(2, 5, f) == monomial_piece(1, 2, F(3, 2), 0)


# ------------------------------------------------------------------------- R

def test_R_order_zero_is_T():
    f = polybump(1, 2, 2)
    assert apply_R(3, 0, 4, f) == apply_T(3, 4, f)


def test_R_composition_unfolds_to_nested_T():
    f = polybump(1, 2, 3)
    n, a = 6, -1
    nested = apply_T(a, n, apply_T(a + 2, n, apply_T(a + 4, n, f)))
    assert apply_R(a, 2, n, f) == nested


def test_R_killed_by_inner_kernel():
    n = 5
    f = monomial_piece(1, 3, 1, -F(n - 4, 2))
    assert apply_R(0, 1, n, f).is_zero_function()


def test_R_rejects_negative_length():
    with pytest.raises(ValueError):
        apply_R(0, -1, 3, polybump(1, 2, 2))


@given(n=dims, alpha=st.integers(-3, 3), k=st.integers(0, 3), beta=half_int)
def test_R_power_scaling_law(n, alpha, k, beta):
    f = polybump(1, 2, k + 2)
    lhs = apply_R(alpha, k, n, f.mul_term(1, beta))
    rhs = apply_R(alpha - 2 * beta, k, n, f).mul_term(1, beta)
    assert lhs == rhs


def test_T_power_shift_as_operators():
    f = polybump(1, 2, 2)
    sigma = F(3, 4)
    lhs = apply_T(5, 4, f.mul_term(1, sigma))
    rhs = apply_T(5 - 2 * sigma, 4, f).mul_term(1, sigma)
    assert lhs == rhs


# -------------------------------------------------------------- mode Laplacian

def test_delta_r_on_square_power():
    for n in (2, 3, 7):
        out = apply_delta_r_mode(Mode(n, 0), monomial_piece(1, 2, 1, 2))
        assert out == monomial_piece(1, 2, 2 * n, 0)


def test_delta_r_kills_harmonic_profiles():
    for n, ell in ((3, 1), (4, 2), (6, 3)):
        f = monomial_piece(1, 2, 1, ell)
        assert apply_delta_r_mode(Mode(n, ell), f).is_zero_function()


def test_delta_r_kills_fundamental_power():
    f = monomial_piece(1, 2, 1, -1)
    assert apply_delta_r_mode(Mode(3, 0), f).is_zero_function()


def test_delta_power_single_step_matches():
    f = polybump(1, 2, 4)
    mode = Mode(5, 2)
    assert apply_delta_power(mode, 1, f) == apply_delta_r_mode(mode, f)


def test_delta_power_on_quartic():
    out = apply_delta_power(Mode(5, 0), 2, monomial_piece(1, 2, 1, 4))
    assert out == monomial_piece(1, 2, 280, 0)


def test_delta_power_iterates_through_kernel():
    f = monomial_piece(1, 2, 1, -1)
    assert apply_delta_power(Mode(3, 0), 3, f).is_zero_function()


def test_delta_power_rejects_zero_iterations():
    with pytest.raises(ValueError):
        apply_delta_power(Mode(3, 0), 0, polybump(1, 2, 2))


# ------------------------------------------------------------------------- G

def test_G_at_half_reduces_to_T():
    f = polybump(math.exp(-3), math.exp(-1), 2)
    assert apply_G(1, F(1, 2), 4, f) == apply_T(1, 4, f)


def test_G_below_one_direct_substitution():
    # With b = 0 the correction is -1/(2 r ln r); the signed log keeps the
    # term coefficient -1/2 on both sides of r = 1, and on (0,1) the value
    # is positive since ln r < 0 there.
    f = monomial_piece(math.exp(-2), math.exp(-1), 1, 0)
    out = apply_G(0, 0, 3, f)
    body = RadialPoly([(F(1, 2), -1, 0), (F(-1, 2), -1, -1)])
    assert out == PiecewiseRadial.single(math.exp(-2), math.exp(-1), body)


def test_G_above_one_direct_substitution():
    f = monomial_piece(2, 4, 2, 0)
    out = apply_G(1, F(3, 2), 4, f)
    body = RadialPoly([(1, -1, 0), (2, -1, -1)])
    assert out == PiecewiseRadial.single(2, 4, body)


def test_G_rejects_straddling_piece():
    f = monomial_piece(F(1, 2), 2, 1, 0)
    with pytest.raises(ValueError):
        apply_G(0, 0, 3, f)


def test_G_allows_pieces_touching_one():
    below = monomial_piece(F(1, 2), 1, 1, 0)
    above = monomial_piece(1, 2, 1, 0)
    apply_G(0, 0, 3, below)
    apply_G(0, 0, 3, above)


# ---------------------------------------------------------------- angular sums

def test_angular_sums_vanish_for_radial_mode():
    u = ModeFunction(Mode(6, 0), polybump(1, 2, 2))
    assert angular_sum_Lj_norm_sq(u, 1) == 0
    assert angular_sum_T_of_Lj_norm_sq(u, 1) == 0
    assert angular_defect_norm_sq(u, 1) == 0


def test_Lj_sum_example():
    u = ModeFunction(Mode(3, 1), monomial_piece(1, 2, 1, 0))
    assert angular_sum_Lj_norm_sq(u, 0) == 2


def test_defect_example():
    u = ModeFunction(Mode(3, 1), monomial_piece(1, 2, 1, 0))
    assert angular_defect_norm_sq(u, 0) == 2


def test_T_of_Lj_killed_by_shifted_kernel():
    n, beta = 6, 0
    f = monomial_piece(1, 2, 1, -F(n - 4 - beta, 2))
    for ell in (0, 1, 2):
        u = ModeFunction(Mode(n, ell), f)
        assert angular_sum_T_of_Lj_norm_sq(u, beta) == 0


def test_gradient_decomposition_against_quadrature():
    n, ell, beta = 4, 2, 1
    f = polybump(1, 2, 3)
    u = ModeFunction(Mode(n, ell), f)
    mu = u.mode.mu
    fp = f.differentiate()
    closed = weighted_norm_sq(fp, beta, n) + angular_sum_Lj_norm_sq(u, beta)
    quad = integrate_adaptive(
        lambda r: (fp.eval(r) ** 2 + mu * f.eval(r) ** 2 / r**2) * r ** (n - 1 - beta),
        1.0, 2.0)
    assert quad.converged
    assert math.isclose(float(closed), quad.value, rel_tol=1e-11)


def test_T_of_Lj_sum_against_direct_quadrature():
    # Assemble sum_j |T_b(L_j u)|^2 from the separable form: each L_j u has
    # radial factor f/r, and the h_j squares add up to mu on the sphere.
    n, ell, beta = 5, 1, -1
    f = polybump(1, 2, 3)
    u = ModeFunction(Mode(n, ell), f)
    t = apply_T(beta, n, f.mul_term(1, -1))
    quad = integrate_adaptive(
        lambda r: t.eval(r) ** 2 * r ** (n - 1 - beta), 1.0, 2.0)
    closed = angular_sum_T_of_Lj_norm_sq(u, beta)
    assert math.isclose(float(closed), u.mode.mu * quad.value, rel_tol=1e-11)


def test_defect_dominates_Lj_sum_at_matching_weights():
    f = polybump(1, 2, 2)
    beta = 0
    for n in range(2, 7):
        for ell in range(0, 5):
            u = ModeFunction(Mode(n, ell), f)
            lhs = angular_defect_norm_sq(u, beta)
            rhs = (n - 1) * angular_sum_Lj_norm_sq(u, beta + 2)
            assert lhs >= rhs
            assert (lhs == rhs) == (ell in (0, 1))


# ------------------------------------------------------- norm-level identities

@given(n=dims, alpha=st.integers(-4, 4), beta=small_fraction)
def test_T_index_shift_in_norm(n, alpha, beta):
    f = polybump(1, 2, 3)
    lhs = weighted_norm_sq(apply_T(beta, n, f), alpha, n)
    rhs = (weighted_norm_sq(apply_T(alpha, n, f), alpha, n)
           + (beta - alpha) ** 2 / F(4) * weighted_norm_sq(f, alpha + 2, n))
    assert_same_value(lhs, rhs)


@given(n=dims, alpha=st.integers(-3, 3), beta=small_fraction, sigma=half_int)
def test_power_shift_in_norm(n, alpha, beta, sigma):
    f = polybump(1, 2, 3)
    lhs = weighted_norm_sq(apply_T(beta, n, f.mul_term(1, sigma)), alpha, n)
    rhs = weighted_norm_sq(apply_T(beta - 2 * sigma, n, f), alpha - 2 * sigma, n)
    assert_same_value(lhs, rhs)


@given(n=dims, alpha=st.integers(-4, 4))
def test_cross_inner_product_reduction(n, alpha):
    f = polybump(1, 2, 3)
    fp = f.differentiate()
    lhs = weighted_inner(apply_T(alpha, n, fp), apply_T(alpha + 2, n, f),
                         alpha + 1, n)
    rhs = F(4 + alpha - n, 2) * weighted_norm_sq(apply_T(alpha + 2, n, f),
                                                 alpha + 2, n)
    assert_same_value(lhs, rhs)


@given(n=dims, alpha=st.integers(-3, 3), k=st.integers(0, 4))
def test_R_split_on_derivative(n, alpha, k):
    f = polybump(1, 2, k + 3)
    fp = f.differentiate()
    lhs = weighted_norm_sq(apply_R(alpha, k, n, fp), alpha, n)
    rhs = (F(n - 2 * k - 4 - alpha, 2) ** 2
           * weighted_norm_sq(apply_R(alpha + 2, k, n, f), alpha + 2, n)
           + weighted_norm_sq(apply_R(alpha, k + 1, n, f), alpha, n))
    assert_same_value(lhs, rhs)


@given(n=dims, alpha=st.integers(-3, 3), k=st.integers(0, 4))
def test_R_cross_term_on_derivative(n, alpha, k):
    f = polybump(1, 2, k + 3)
    fp = f.differentiate()
    lhs = weighted_inner(apply_R(alpha, k, n, fp), apply_R(alpha + 2, k, n, f),
                         alpha + 1, n)
    rhs = F(alpha + 2 * k + 4 - n, 2) * weighted_norm_sq(
        apply_R(alpha + 2, k, n, f), alpha + 2, n)
    assert_same_value(lhs, rhs)


@given(n=dims, alpha=st.integers(-4, 4))
def test_radial_laplacian_norm_split(n, alpha):
    f = polybump(1, 2, 4)
    fp = f.differentiate()
    df = apply_delta_r_mode(Mode(n, 0), f)
    lhs = weighted_norm_sq(df, alpha, n)
    rhs = (F(n + alpha, 2) ** 2 * weighted_norm_sq(fp, alpha + 2, n)
           + weighted_norm_sq(apply_T(alpha, n, fp), alpha, n))
    assert_same_value(lhs, rhs)


def test_norm_split_at_half_integer_weight():
    n, alpha = 5, F(5, 2)
    f = polybump(1, 2, 4)
    fp = f.differentiate()
    df = apply_delta_r_mode(Mode(n, 0), f)
    lhs = weighted_norm_sq(df, alpha, n)
    rhs = (F(n + alpha, 2) ** 2 * weighted_norm_sq(fp, alpha + 2, n)
          + weighted_norm_sq(apply_T(alpha, n, fp), alpha, n))
    assert math.isclose(float(lhs), float(rhs), rel_tol=1e-12)
