"""Tests for the radial profile expression language."""

from fractions import Fraction as F

import numpy as np
import pytest
import sympy

from rellich.profiles import (
    Add,
    Const,
    Cosh,
    Coth,
    Div,
    Exp,
    Ln,
    Mul,
    Pow,
    ProfileSyntaxError,
    Sinh,
    Sub,
    Var,
    parse_profile,
    symbolic_derivative,
)

R = Var("r")
RHO = Var("rho")


class TestParsing:
    def test_power_node(self):
        assert parse_profile("r^(-1/2)") == Pow(R, F(-1, 2))

    def test_unparenthesized_fraction_exponent(self):
        assert parse_profile("r^-1/2") == Pow(R, F(-1, 2))
        assert parse_profile("r^3/2") == Pow(R, F(3, 2))

    def test_nested_tree(self):
        e = parse_profile("exp(-1/((r-1)*(2-r)))")
        inner = Mul(Sub(R, Const(F(1))), Sub(Const(F(2)), R))
        assert e == Exp(Div(Const(F(-1)), inner))

    def test_decimal_literals_exact(self):
        assert parse_profile("0.1") == Const(F(1, 10))
        assert parse_profile("-2.5") == Const(F(-5, 2))
        assert parse_profile(".5") == Const(F(1, 2))

    def test_fraction_literal_single_token(self):
        # 1/2*r is (1/2)*r under greedy number lexing, same value either way
        assert parse_profile("1/2*r") == Mul(Const(F(1, 2)), R)

    def test_signed_number_after_operator(self):
        assert parse_profile("r*-2") == Mul(Const(F(-2)), R)

    def test_variables(self):
        assert parse_profile("rho") == RHO
        assert parse_profile("coth(rho)") == Coth(RHO)

    def test_whitespace(self):
        assert parse_profile(" r ^ 2 + ln( r ) ") == Add(Pow(R, F(2)), Ln(R))

    def test_functions(self):
        assert parse_profile("sinh(rho)*cosh(rho)") == Mul(Sinh(RHO), Cosh(RHO))

    def test_dangling_caret_position(self):
        with pytest.raises(ProfileSyntaxError) as exc:
            parse_profile("r^")
        assert exc.value.position == 2
        assert "offset 2" in str(exc.value)

    def test_unknown_identifier(self):
        with pytest.raises(ProfileSyntaxError) as exc:
            parse_profile("sin(r)")
        assert exc.value.position == 0
        assert "sin" in str(exc.value)

    def test_unclosed_paren(self):
        with pytest.raises(ProfileSyntaxError):
            parse_profile("(r+1")

    def test_trailing_garbage(self):
        with pytest.raises(ProfileSyntaxError):
            parse_profile("r r")

    def test_empty_input(self):
        with pytest.raises(ProfileSyntaxError) as exc:
            parse_profile("")
        assert exc.value.position == 0

    def test_bare_minus_is_not_a_base(self):
        with pytest.raises(ProfileSyntaxError):
            parse_profile("-r")

    def test_zero_denominator_literal(self):
        with pytest.raises(ProfileSyntaxError):
            parse_profile("1/0")


ROUND_TRIP = [
    "r^(-1/2)",
    "exp(-1/((r-1)*(2-r)))",
    "1/2*r^2-3*ln(r)",
    "coth(rho)^2-1",
    "2*sinh(rho)*cosh(rho)",
    "r^2.5",
    "(1+r)^3/(2-r)",
    "-2*rho+1/3",
    "exp(-2*rho)",
    "r^(-4)",
]


@pytest.mark.parametrize("text", ROUND_TRIP)
def test_print_round_trip(text):
    tree = parse_profile(text)
    assert parse_profile(str(tree)) == tree


def test_derivative_trees_round_trip():
    for text in ROUND_TRIP:
        d = symbolic_derivative(parse_profile(text), 2)
        assert parse_profile(str(d)) == d


class TestFolding:
    def test_neutral_elements(self):
        assert parse_profile("0+r") == R
        assert parse_profile("r-0") == R
        assert parse_profile("1*r") == R
        assert parse_profile("r/1") == R

    def test_power_special_cases(self):
        assert parse_profile("r^1") == R
        assert parse_profile("r^0") == Const(F(1))
        assert parse_profile("(r^2)^3") == Pow(R, F(6))

    def test_constant_arithmetic_exact(self):
        assert parse_profile("2*3+1/2") == Const(F(13, 2))
        assert parse_profile("2^-2") == Const(F(1, 4))

    def test_constant_chain_collapse(self):
        assert parse_profile("2*(3*r)") == Mul(Const(F(6)), R)


class TestOperators:
    def test_arithmetic_builds_trees(self):
        e = (R + 1) * 2
        assert e == Mul(Const(F(2)), Add(R, Const(F(1))))
        assert 1 - R == Sub(Const(F(1)), R)
        assert R / 3 == Div(R, Const(F(3)))
        assert -R == Mul(Const(F(-1)), R)

    def test_pow_takes_numbers_only(self):
        assert R ** F(1, 2) == Pow(R, F(1, 2))
        with pytest.raises(TypeError):
            R ** R

    def test_foreign_operand_rejected(self):
        with pytest.raises(TypeError):
            R + "r"


class TestDerivatives:
    def test_sinh(self):
        assert symbolic_derivative(Sinh(RHO)) == Cosh(RHO)

    def test_coth(self):
        d = symbolic_derivative(Coth(RHO))
        assert d == parse_profile("1-coth(rho)^2")
        x = np.linspace(0.3, 2.0, 7)
        np.testing.assert_allclose(d(x), -1.0 / np.sinh(x) ** 2, rtol=1e-13)

    def test_fourth_derivative_of_power(self):
        d4 = symbolic_derivative(parse_profile("r^(-3/2)"), 4)
        assert d4 == Mul(Const(F(945, 16)), Pow(R, F(-11, 2)))

    def test_order_zero_and_negative(self):
        e = parse_profile("r^2")
        assert symbolic_derivative(e, 0) is e
        with pytest.raises(ValueError):
            symbolic_derivative(e, -1)

    def test_exact_constants_survive_differentiation(self):
        d = symbolic_derivative(parse_profile("r^(-1/2)"), 2)
        assert d == Mul(Const(F(3, 4)), Pow(R, F(-5, 2)))


SYMPY_CASES = [
    ("r^(-3/2)", (0.3, 2.5)),
    ("exp(-2*r)", (0.3, 2.5)),
    ("ln(r)*r^2", (0.3, 2.5)),
    ("coth(rho)", (0.3, 2.5)),
    ("sinh(rho)^3-cosh(rho)/r", (0.3, 2.5)),
    ("1/((r-1)*(2-r))", (1.2, 1.8)),
    ("r^2.5+r^(-1/3)", (0.3, 2.5)),
    ("exp(-1/((r-1)*(2-r)))", (1.2, 1.8)),
]


@pytest.mark.parametrize("text,window", SYMPY_CASES)
@pytest.mark.parametrize("order", [1, 2, 3])
def test_derivative_against_sympy(text, window, order):
    # sympy reads the same formula once '^' becomes '**'; both variables
    # denote the single radial coordinate
    t = sympy.Symbol("t", positive=True)
    expr = sympy.sympify(text.replace("^", "**"))
    expr = expr.subs({sympy.Symbol("r"): t, sympy.Symbol("rho"): t})
    oracle = sympy.lambdify(t, sympy.diff(expr, t, order), "numpy")

    ours = symbolic_derivative(parse_profile(text), order)
    x = np.linspace(*window, 11)
    np.testing.assert_allclose(ours(x), oracle(x), rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("text", ["r^(-3/2)", "exp(-2*rho)", "coth(rho)", "ln(r)"])
def test_derivative_against_central_differences(text):
    e = parse_profile(text)
    d = symbolic_derivative(e)
    h = 1e-5
    for x in (0.4, 0.9, 1.7):
        fd = (e(x + h) - e(x - h)) / (2 * h)
        assert abs(d(x) - fd) <= 1e-6 * max(1.0, abs(d(x)))


class TestEvaluation:
    def test_array_evaluation(self):
        e = parse_profile("r^2+1")
        x = np.array([1.0, 2.0, 3.0])
        np.testing.assert_allclose(e(x), [2.0, 5.0, 10.0])

    def test_scalar_evaluation(self):
        assert parse_profile("exp(-1/((r-1)*(2-r)))")(1.5) == pytest.approx(
            np.exp(-4.0)
        )

    def test_constant_broadcasts_over_arrays(self):
        one = parse_profile("1")
        out = one(np.linspace(0, 1, 5))
        assert out.shape == (5,)
        np.testing.assert_allclose(out, 1.0)

    def test_negative_base_integer_power(self):
        e = parse_profile("(r-2)^3")
        assert e(1.0) == pytest.approx(-1.0)

    def test_singular_points_yield_nonfinite(self):
        e = parse_profile("1/(r-1)")
        assert not np.isfinite(e(np.array([1.0]))).any()
