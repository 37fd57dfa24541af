import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasequant.coeff import HBAR, Coeff
from phasequant.errors import DegreeCapError, ParseError, UnknownVariableError
from phasequant.symbols import (
    GaussianMeasure,
    PhaseSymbol,
    evaluate_symbol,
    format_symbol,
    gaussian_moment_exact,
    gaussian_moment_integral,
    parse_symbol,
    poisson_bracket,
)

from conftest import real_symbols, symbols

x, p = PhaseSymbol.x(), PhaseSymbol.p()
alpha, abar = PhaseSymbol.alpha(), PhaseSymbol.alpha_bar()


def test_x_squared_in_alpha_form():
    expected = (alpha * alpha + alpha * abar * 2 + abar * abar) * (HBAR / 2)
    assert parse_symbol("x^2") == expected
    assert format_symbol(parse_symbol("x^2")) == "x^2"
    assert format_symbol(parse_symbol("x^2"), "alpha") == "hbar/2*a^2 + hbar*a*abar + hbar/2*abar^2"


def test_x_squared_numeric_cross_check(rng):
    f = parse_symbol("x^2")
    for z in rng.normal(size=10) + 1j * rng.normal(size=10):
        for hbar in (0.5, 1.0, 2.0):
            assert evaluate_symbol(f, [z], hbar) == pytest.approx(2 * hbar * z.real**2)


def test_commuting_variables_cancel():
    assert parse_symbol("x*p - p*x").is_zero()


def test_conventions():
    assert parse_symbol("zbar", convention="paperZ") == alpha
    assert parse_symbol("z", convention="paperZ") == abar
    assert parse_symbol("z", convention="alpha") == alpha
    with pytest.raises(UnknownVariableError):
        parse_symbol("z")


def test_multimode_indices():
    f = parse_symbol("x1*p2 + a2", mode_count=2)
    assert f == PhaseSymbol.x(1, 2) * PhaseSymbol.p(2, 2) + PhaseSymbol.alpha(2, 2)
    with pytest.raises(UnknownVariableError):
        parse_symbol("x3", mode_count=2)


@pytest.mark.parametrize(
    "text, error",
    [
        ("x +", ParseError),
        ("(x", ParseError),
        ("x^-1", ParseError),
        ("x^p", ParseError),
        ("x/p", ParseError),
        ("q", UnknownVariableError),
        ("x^17", DegreeCapError),
        ("(x*p)^9", DegreeCapError),
    ],
)
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_symbol(text)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as info:
        parse_symbol("x + * p")
    assert info.value.position == 4


def test_degree_cap_is_configurable():
    assert parse_symbol("x^20", degree_cap=20).degree() == 20


def test_grammar_extras():
    assert parse_symbol("-x/2 + 0.5*x").is_zero()
    assert parse_symbol("sqrt(4)*i*p") == p * Coeff.rational(0, 2)


@given(symbols(max_degree=5))
def test_print_parse_round_trip(f):
    for form in ("auto", "alpha"):
        assert parse_symbol(format_symbol(f, form)) == f


@given(symbols(max_degree=3, mode_count=2))
def test_print_parse_round_trip_two_modes(f):
    assert parse_symbol(format_symbol(f), mode_count=2) == f


def test_printing_is_deterministic():
    f = parse_symbol("p^2 + x^2 + 3*x*p")
    g = parse_symbol("3*p*x + x^2 + p^2")
    assert format_symbol(f) == format_symbol(g) == "x^2 + 3*x*p + p^2"


# -- Poisson bracket ---------------------------------------------------------------------

@pytest.mark.parametrize(
    "f, g, expected",
    [("x", "p", "1"), ("x^2", "p^2", "4*x*p"), ("x^3", "p^3", "9*x^2*p^2"), ("a", "abar", "-i/hbar")],
)
def test_bracket_examples(f, g, expected):
    assert poisson_bracket(parse_symbol(f), parse_symbol(g)) == parse_symbol(expected)


@given(symbols(), symbols())
def test_bracket_antisymmetry(f, g):
    assert poisson_bracket(f, g) == -poisson_bracket(g, f)


@given(symbols(), symbols(), symbols())
def test_bracket_jacobi(f, g, h):
    total = (
        poisson_bracket(f, poisson_bracket(g, h))
        + poisson_bracket(g, poisson_bracket(h, f))
        + poisson_bracket(h, poisson_bracket(f, g))
    )
    assert total.is_zero()


@given(symbols(max_degree=3), symbols(max_degree=3), symbols(max_degree=3))
def test_bracket_leibniz(f, g, h):
    assert poisson_bracket(f, g * h) == poisson_bracket(f, g) * h + g * poisson_bracket(f, h)


# -- Gaussian moments --------------------------------------------------------------------

@pytest.mark.parametrize("text, value", [("1", 1), ("a*abar", 1), ("a^2", 0), ("a^3*abar^3", 6)])
def test_gaussian_moments(text, value):
    assert gaussian_moment_integral(parse_symbol(text), 1.0) == pytest.approx(value)


@given(st.integers(0, 6), st.integers(0, 6))
def test_monomial_orthogonality(m, n):
    f = PhaseSymbol.monomial([(m, n)])
    assert gaussian_moment_exact(f) == Coeff.coerce(math.factorial(n) if m == n else 0)


@given(symbols(), symbols(), st.integers(-3, 3))
def test_gaussian_moment_linearity(f, g, c):
    for hbar in (0.5, 2.0):
        lhs = gaussian_moment_integral(f * c + g, hbar)
        rhs = c * gaussian_moment_integral(f, hbar) + gaussian_moment_integral(g, hbar)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@given(real_symbols())
def test_gaussian_moment_real_for_real_symbols(f):
    assert f.is_real()
    assert gaussian_moment_integral(f, 1.0).imag == pytest.approx(0.0, abs=1e-12)


def test_gaussian_measure_mass_and_sb_norms():
    for hbar in (0.5, 1.0, 2.0):
        mu = GaussianMeasure(hbar, 1)
        assert mu.total_mass() == pytest.approx(1.0)
        # ||z^n||^2 = n! hbar^n under z = sqrt(hbar) * conj(alpha), by polar quadrature
        r = np.linspace(0, 12 * math.sqrt(hbar), 20001)
        for n in range(4):
            dens = mu.density(r[:, None].astype(complex))
            integrand = r ** (2 * n) * dens * 2 * np.pi * r
            assert np.trapezoid(integrand, r) == pytest.approx(math.factorial(n) * hbar**n, rel=1e-6)


@pytest.mark.parametrize(
    "text, point, value",
    [("a", 2 + 1j, 2 + 1j), ("x^2", 1.0, 2.0), ("a*abar", 3j, 9.0)],
)
def test_evaluate(text, point, value):
    assert evaluate_symbol(parse_symbol(text), [point], 1.0) == pytest.approx(value)
