import itertools
import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasequant.coeff import HBAR
from phasequant.errors import DegreeCapError, TruncationWarning
from phasequant.operators import LadderExpr, to_matrix
from phasequant.quadrature import QuadratureGrid
from phasequant.quantization import (
    Scheme,
    convert_scheme,
    divisible_by_hbar_power,
    groenewold_residual,
    quantize,
    symbol_of,
    toeplitz_deviation,
    toeplitz_matrix,
    weyl_monomial,
)
from phasequant.symbols import PhaseSymbol, parse_symbol

from conftest import coeffs, real_symbols, symbols

X, P = LadderExpr.position(), LadderExpr.momentum()
one = LadderExpr.identity()
HALF_HBAR = one * (HBAR / 2)
SCHEMES = list(Scheme)


def test_x_squared_triple():
    f = parse_symbol("x^2")
    assert quantize(f, "weyl") == X * X
    assert quantize(f, "wick") == X * X - HALF_HBAR
    assert quantize(f, "antiwick") == X * X + HALF_HBAR


def test_p_squared_triple():
    f = parse_symbol("p^2")
    assert quantize(f, "weyl") == P * P
    assert quantize(f, "wick") == P * P - HALF_HBAR
    assert quantize(f, "antiwick") == P * P + HALF_HBAR


def test_weyl_symmetrizes_xp():
    assert quantize(parse_symbol("x*p"), Scheme.WEYL) == (X * P + P * X) * Fraction(1, 2)


@pytest.mark.parametrize("j, k", [(2, 1), (1, 2), (2, 2), (3, 1)])
def test_weyl_matches_permutation_average(j, k):
    letters = [X] * j + [P] * k
    total = LadderExpr.zero()
    perms = list(itertools.permutations(letters))
    for perm in perms:
        word = one
        for op in perm:
            word = word * op
        total = total + word
    assert weyl_monomial(j, k) * len(perms) == total


def test_scheme_names():
    assert [str(s) for s in Scheme] == ["weyl", "wick", "antiwick"]


def test_degree_cap():
    with pytest.raises(DegreeCapError):
        quantize(parse_symbol("x^10"), "weyl", degree_cap=8)


@pytest.mark.parametrize(
    "expr, scheme, text",
    [
        (X * X, Scheme.ANTIWICK, "x^2 - hbar/2"),
        (X * X, Scheme.WICK, "x^2 + hbar/2"),
        (one, Scheme.WEYL, "1"),
        (one, Scheme.WICK, "1"),
        (LadderExpr.annihilation() * LadderExpr.creation(), Scheme.ANTIWICK, "a*abar"),
    ],
)
def test_symbol_of(expr, scheme, text):
    assert symbol_of(expr, scheme) == parse_symbol(text)


def test_abs_alpha_squared_is_quadratic_form():
    assert parse_symbol("a*abar") == parse_symbol("(x^2 + p^2)/(2*hbar)")


def test_conversion_examples():
    assert convert_scheme(parse_symbol("x^2"), "weyl", "antiwick") == parse_symbol("x^2 - hbar/2")
    assert convert_scheme(parse_symbol("x^2 + p^2"), "weyl", "antiwick") == parse_symbol("x^2 + p^2 - hbar")


@given(symbols(max_degree=6), st.sampled_from(SCHEMES))
def test_inverse_property(f, scheme):
    assert symbol_of(quantize(f, scheme), scheme) == f


@given(symbols(max_degree=5), st.sampled_from(SCHEMES))
def test_convert_to_self_is_identity(f, scheme):
    assert convert_scheme(f, scheme, scheme) == f


@given(symbols(max_degree=4), st.sampled_from(SCHEMES), st.sampled_from(SCHEMES), st.sampled_from(SCHEMES))
def test_conversions_compose(f, s1, s2, s3):
    assert convert_scheme(convert_scheme(f, s1, s2), s2, s3) == convert_scheme(f, s1, s3)


@given(symbols(max_degree=4), symbols(max_degree=4), coeffs(), st.sampled_from(SCHEMES))
def test_linearity(f, g, c, scheme):
    assert quantize(f * c + g, scheme) == quantize(f, scheme) * c + quantize(g, scheme)


@given(real_symbols(max_degree=5), st.sampled_from(SCHEMES))
def test_realness_preserved(f, scheme):
    assert quantize(f, scheme).is_self_adjoint()


@given(symbols(max_degree=3, mode_count=2), st.sampled_from(SCHEMES))
def test_inverse_property_two_modes(f, scheme):
    assert symbol_of(quantize(f, scheme), scheme) == f


def test_ordering_separation():
    f = parse_symbol("a*abar")
    assert quantize(f, "antiwick") - quantize(f, "wick") == one


# -- Groenewold ----------------------------------------------------------------------------

@pytest.mark.parametrize("f, g", [("x^2", "p^2"), ("x", "p"), ("x*p", "x^3*p^2"), ("x^2 + 3*p", "p^5*x")])
def test_groenewold_vanishes_at_low_degree(f, g):
    assert groenewold_residual(parse_symbol(f), parse_symbol(g)).is_zero()


def test_groenewold_cubic_residual():
    r = groenewold_residual(parse_symbol("x^3"), parse_symbol("p^3"))
    assert not r.is_zero()
    assert divisible_by_hbar_power(r, 2)
    # frozen from a dense-matrix permutation-average oracle at hbar = 1 and 0.5
    assert r == one * (HBAR * HBAR * -3 / 2)


@given(real_symbols(max_degree=2), real_symbols(max_degree=6))
def test_groenewold_property(f, g):
    assert groenewold_residual(f, g).is_zero()


# -- Toeplitz operators ----------------------------------------------------------------------

def test_toeplitz_x_squared_matches_symbolic():
    f = parse_symbol("x^2")
    quad = toeplitz_matrix(f, QuadratureGrid(1, 40), 6, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        sym = to_matrix(quantize(f, "antiwick"), 6, 1.0)
    assert toeplitz_deviation(quad, sym, 2) <= 1e-7
    n = np.arange(4)
    assert np.allclose(np.diag(quad.entries)[:4], n + 1, atol=1e-10)
    assert quad.entries[0, 2] == pytest.approx(math.sqrt(2) / 2)


def test_toeplitz_resolution_of_identity():
    m = toeplitz_matrix(PhaseSymbol.constant(1), QuadratureGrid(1, 40), 6, 1.0)
    assert np.max(np.abs(m.entries - np.eye(6))) <= 1e-8


def test_toeplitz_number_plus_one():
    m = toeplitz_matrix(parse_symbol("a*abar"), QuadratureGrid(1, 40), 6, 1.0)
    assert np.allclose(m.protected_block(2), np.diag(np.arange(1, 5)), atol=1e-7)


def test_toeplitz_two_modes():
    f = parse_symbol("x1*p2 + a1*abar2", mode_count=2)
    m = toeplitz_matrix(f, QuadratureGrid(1, 30), 4, 0.5)
    assert m.truncation_warning is None


def test_toeplitz_flags_coarse_grid():
    with pytest.warns(TruncationWarning):
        m = toeplitz_matrix(parse_symbol("x^6"), QuadratureGrid(1, 3), 8, 1.0)
    assert "deviates" in m.truncation_warning
