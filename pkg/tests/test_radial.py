import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rellich.radial import (
    NonElementaryIntegral,
    PiecewiseRadial,
    RadialPoly,
    add,
    differentiate,
    integrate_moment,
    multiply,
    polybump,
    random_piecewise,
    weighted_inner,
    weighted_norm_sq,
)

F = Fraction


def mono(c, p=0, q=0, a=1, b=2):
    return PiecewiseRadial.single(a, b, RadialPoly.monomial(c, p, q))


# --- construction and algebra ----------------------------------------------

def test_add_additive_inverse_is_zero():
    x = mono(1, 1)
    y = mono(-1, 1)
    assert add(x, y).is_zero_function()


def test_add_disjoint_supports_keeps_both_pieces():
    s = add(mono(1, 0, 0, 1, 2), mono(1, 0, 0, 2, 3))
    assert len(s.pieces) == 2
    assert s.eval(1.5) == 1.0 and s.eval(2.5) == 1.0
    assert s.eval(3.5) == 0.0


def test_add_refines_overlapping_pieces():
    s = add(mono(1, 1, 0, 1, 3), mono(1, 2, 0, 2, 4))
    # r on [1,3] plus r^2 on [2,4]; at 2.5 both alive
    assert s.eval(2.5) == pytest.approx(2.5 + 6.25)
    assert s.eval(1.5) == pytest.approx(1.5)
    assert s.eval(3.5) == pytest.approx(12.25)


def test_multiply_adds_exponents():
    x = mono(1, F(1, 2))
    assert multiply(x, x) == mono(1, 1)
    lg = mono(1, 0, 1, 1, 2)
    assert multiply(lg, lg) == mono(1, 0, 2, 1, 2)


def test_multiply_polynomials():
    a = PiecewiseRadial.single(2, 3, RadialPoly([(2, 1, 0), (1, 0, 0)]))
    b = PiecewiseRadial.single(2, 3, RadialPoly([(1, 1, 0), (-1, 0, 0)]))
    prod = multiply(a, b)
    assert prod.eval(2.0) == pytest.approx(5.0)  # (2r+1)(r-1) at r=2
    assert prod == PiecewiseRadial.single(
        2, 3, RadialPoly([(2, 2, 0), (-1, 1, 0), (-1, 0, 0)]))


def test_differentiate_product_rule_with_log():
    x = mono(1, F(1, 2), 1)
    d = differentiate(x)
    expected = PiecewiseRadial.single(
        1, 2, RadialPoly([(F(1, 2), F(-1, 2), 1), (1, F(-1, 2), 0)]))
    assert d == expected


def test_differentiate_constant_is_zero():
    assert differentiate(mono(1)).is_zero_function()


def test_pieces_must_be_disjoint_and_positive():
    with pytest.raises(ValueError):
        PiecewiseRadial([(1, 3, RadialPoly.constant(1)), (2, 4, RadialPoly.constant(1))])
    with pytest.raises(ValueError):
        PiecewiseRadial([(0, 1, RadialPoly.constant(1))])
    with pytest.raises(ValueError):
        PiecewiseRadial([(2, 2, RadialPoly.constant(1))])


# --- closed-form integration -----------------------------------------------

def test_integrate_constant_moment():
    assert integrate_moment(mono(1), 2) == F(7, 3)


def test_integrate_log_square_over_r():
    x = PiecewiseRadial.single(1, math.e, RadialPoly.monomial(1, 0, 2))
    assert integrate_moment(x, -1) == pytest.approx(F(1, 3), abs=1e-15)


def test_integrate_exponents_summing_to_one():
    x = mono(1, 0.3)
    assert integrate_moment(x, 0.7) == pytest.approx(1.5, abs=1e-14)


def test_integrate_half_power_goes_through_decimal_path():
    # int_1^2 sqrt(r) dr = (4 sqrt(2) - 2)/3, sympy-checked
    x = mono(1, F(1, 2))
    assert integrate_moment(x, 0) == pytest.approx(1.21895141649746006506891829895, abs=1e-14)


def test_integrate_mixed_terms_matches_sympy():
    # (3/2) r^2 ln^3 - 2 r^-3 against weight r^(-1/2) on [1/2, 2]; sympy oracle
    body = RadialPoly([(F(3, 2), 2, 3), (-2, -3, 0)])
    x = PiecewiseRadial.single(F(1, 2), 2, body)
    assert integrate_moment(x, -0.5) == pytest.approx(-4.04763505357145649890164983848, rel=1e-14)


def test_integrate_fractional_power_log_matches_sympy():
    # int_1^3 r^(5/2) ln^2 dr, sympy oracle
    x = PiecewiseRadial.single(1, 3, RadialPoly.monomial(1, F(5, 2), 2))
    assert integrate_moment(x, 0) == pytest.approx(9.87343476642923466480494688320, rel=1e-14)


def test_integrate_inverse_log_square_at_power_minus_one():
    # int r^-1 (ln r)^-2 on (e^-3, e^-1) = 2/3 exactly
    x = PiecewiseRadial.single(math.exp(-3), math.exp(-1), RadialPoly.monomial(1, -1, -2))
    assert integrate_moment(x, 0) == pytest.approx(2.0 / 3.0, rel=1e-14)


def test_nonelementary_integrals_raise():
    with pytest.raises(NonElementaryIntegral):
        integrate_moment(mono(1, 2, -1), 0)
    with pytest.raises(NonElementaryIntegral):
        integrate_moment(mono(1, -1, -1), 0)


def test_exact_rational_path_returns_fractions():
    v = integrate_moment(mono(1, 3), 1)  # int_1^2 r^4 dr = 31/5
    assert isinstance(v, Fraction) and v == F(31, 5)


def test_high_order_bump_norm_is_exact():
    # ||polybump(1,2,4)^2 with weight r^4|| = 41/1711710, sympy oracle
    f = polybump(1, 2, 4)
    v = weighted_norm_sq(f, 0, 5)
    assert isinstance(v, Fraction)
    assert v == F(41, 1711710)


def test_weighted_norm_examples():
    assert weighted_norm_sq(mono(1), 0, 3) == F(7, 3)
    assert weighted_norm_sq(PiecewiseRadial.zero(), 0, 3) == 0
    assert weighted_norm_sq(mono(1, 1), 0, 3) == F(31, 5)


def test_weighted_inner_examples():
    assert weighted_inner(mono(1), mono(1, 1), 0, 3) == F(15, 4)
    assert weighted_inner(mono(1), PiecewiseRadial.zero(), 0, 3) == 0


# --- invariants --------------------------------------------------------------

@st.composite
def rational_polys(draw):
    n = draw(st.integers(1, 4))
    terms = []
    for _ in range(n):
        c = F(draw(st.integers(-9, 9)), draw(st.integers(1, 5)))
        p = draw(st.integers(-4, 6))
        q = draw(st.integers(0, 3))
        terms.append((c, p, q))
    return RadialPoly(terms)


@given(rational_polys())
def test_round_trip_differentiate_antiderivative(poly):
    assert poly.antiderivative().differentiate() == poly


@given(rational_polys(), rational_polys())
def test_integration_by_parts(p1, p2):
    # x, y supported on [1,2] and forced to vanish at both ends by a bump factor
    cut = polybump(1, 2, 1)
    x = multiply(PiecewiseRadial.single(1, 2, p1), cut)
    y = multiply(PiecewiseRadial.single(1, 2, p2), cut)
    lhs = integrate_moment(multiply(differentiate(x), y), 0)
    rhs = integrate_moment(multiply(x, differentiate(y)), 0)
    assert float(abs(lhs + rhs)) <= 1e-12 * (1 + abs(float(lhs)) + abs(float(rhs)))


@given(rational_polys(), rational_polys(), st.integers(-3, 3), st.integers(-3, 3))
def test_bilinearity(p1, p2, c1, c2):
    x1 = PiecewiseRadial.single(1, 2, p1)
    x2 = PiecewiseRadial.single(F(3, 2), F(5, 2), p2)
    y = polybump(1, 3, 2)
    lhs = weighted_inner(add(x1.scale(c1), x2.scale(c2)), y, 1, 4)
    rhs = c1 * weighted_inner(x1, y, 1, 4) + c2 * weighted_inner(x2, y, 1, 4)
    assert float(abs(lhs - rhs)) <= 1e-12 * (1 + abs(float(rhs)))


@given(rational_polys())
def test_norm_positivity(p):
    x = PiecewiseRadial.single(1, 2, p)
    v = weighted_norm_sq(x, 2, 5)
    assert v >= 0
    assert (v == 0) == x.is_zero_function()


@given(rational_polys(), rational_polys())
def test_inner_symmetry(p1, p2):
    x = PiecewiseRadial.single(1, 2, p1)
    y = PiecewiseRadial.single(1, 2, p2)
    assert weighted_inner(x, y, 1, 3) == weighted_inner(y, x, 1, 3)


# --- bumps and scaling --------------------------------------------------------

def test_polybump_values_and_smoothness():
    f = polybump(1, 2, 3)
    assert f.eval(1.5) == pytest.approx(0.5**6)
    assert f.eval(1.0) == 0.0
    # C^2 at the edges: first two derivatives vanish there
    d1 = differentiate(f)
    d2 = differentiate(d1)
    for r in (1.0 + 1e-9, 2.0 - 1e-9):
        assert abs(d1.eval(r)) < 1e-6
        assert abs(d2.eval(r)) < 1e-3


def test_polybump_exact_coefficients():
    f = polybump(F(1, 2), 3, 2)
    (a, b, body) = f.pieces[0]
    assert all(isinstance(t.coeff, (int, Fraction)) for t in body.terms())
    assert f.eval(1.75) == pytest.approx(((1.75 - 0.5) * (3 - 1.75)) ** 2)


def test_scale_argument_pointwise():
    f = polybump(1, 2, 3)
    g = f.scale_argument(F(1, 2))  # g(r) = f(r/2), support (2, 4)
    assert g.support() == (2, 4)
    assert g.eval(3.0) == pytest.approx(f.eval(1.5))


def test_scale_argument_exact_for_polynomials():
    f = polybump(1, 2, 4)
    g = f.scale_argument(2)
    assert all(isinstance(t.coeff, (int, Fraction))
               for _, _, body in g.pieces for t in body.terms())
    assert weighted_norm_sq(g, 0, 3) == weighted_norm_sq(f, 0, 3) / Fraction(8)


def test_random_piecewise_is_seeded_deterministic():
    a = random_piecewise(np.random.default_rng(7))
    b = random_piecewise(np.random.default_rng(7))
    assert a == b


def test_eval_vectorized_matches_scalar():
    f = polybump(1, 2, 2)
    rs = np.linspace(0.5, 2.5, 17)
    vals = f.eval(rs)
    for r, v in zip(rs, vals):
        assert v == pytest.approx(f.eval(float(r)))
