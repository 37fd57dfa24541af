import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasequant.coeff import HBAR, I
from phasequant.errors import ParseError, TruncationWarning
from phasequant.operators import (
    LadderExpr,
    antinormal_order_form,
    commutator,
    format_antinormal,
    format_ladder,
    from_antinormal,
    normal_order,
    parse_ladder,
    to_matrix,
)

from conftest import coeffs, ladders

a, ad = LadderExpr.annihilation(), LadderExpr.creation()
X, P, N = LadderExpr.position(), LadderExpr.momentum(), LadderExpr.number()
one = LadderExpr.identity()


def test_single_commutation():
    assert a * ad == ad * a + one
    assert format_ladder(a * ad) == "ad*a + 1"


def test_double_commutation():
    assert a * a * ad * ad == ad * ad * a * a + ad * a * 4 + one * 2


def test_double_commutation_matches_matrices():
    # compare on the block below the truncation edge
    lhs = to_matrix(a * a * ad * ad, 12, 1.0).entries[:8, :8]
    n = np.arange(8)
    assert np.allclose(lhs, np.diag((n + 1) * (n + 2)))


def test_words_in_normal_order():
    word = [("a", 1), ("a", 1), ("ad", 1), ("ad", 1)]
    assert normal_order([(1, word)]) == a * a * ad * ad


def test_canonical_commutator():
    assert commutator(X, P) == one * (I * HBAR)
    assert commutator(a, ad) == one
    assert commutator(N, ad) == ad
    assert commutator(X, X).is_zero()


@pytest.mark.parametrize(
    "expr, text",
    [(ad * a, "a*ad - 1"), (one, "1"), (ad * ad * a * a, "a^2*ad^2 - 4*a*ad + 2")],
)
def test_antinormal_form(expr, text):
    assert format_antinormal(antinormal_order_form(expr), 1) == text


@given(ladders(max_degree=8))
def test_antinormal_round_trip(e):
    assert from_antinormal(antinormal_order_form(e), 1) == e


@given(ladders(max_degree=3, mode_count=2))
def test_antinormal_round_trip_two_modes(e):
    assert from_antinormal(antinormal_order_form(e), 2) == e


@given(ladders(), ladders(), coeffs())
def test_commutator_bilinear_antisymmetric(x, y, c):
    assert commutator(x, y) == -commutator(y, x)
    assert commutator(x * c + y, y) == commutator(x, y) * c


@given(ladders(max_degree=3), ladders(max_degree=3), ladders(max_degree=3))
def test_commutator_jacobi(x, y, z):
    total = commutator(x, commutator(y, z)) + commutator(y, commutator(z, x)) + commutator(z, commutator(x, y))
    assert total.is_zero()


@given(ladders(), ladders(), ladders())
def test_product_associative(x, y, z):
    assert (x * y) * z == x * (y * z)


@given(ladders(), ladders())
def test_adjoint_properties(x, y):
    assert x.adjoint().adjoint() == x
    assert (x * y).adjoint() == y.adjoint() * x.adjoint()
    assert (x + x.adjoint()).is_self_adjoint()


def test_modes_commute():
    a1, a2 = LadderExpr.annihilation(1, 2), LadderExpr.annihilation(2, 2)
    ad2 = LadderExpr.creation(2, 2)
    assert commutator(a1, ad2).is_zero()
    assert commutator(a2, ad2) == LadderExpr.identity(2)


# -- parsing -------------------------------------------------------------------------------

def test_parse_ladder_tokens():
    assert parse_ladder("X*P - P*X") == one * (I * HBAR)
    assert parse_ladder("N") == ad * a
    assert parse_ladder("a1*ad2", 2) == LadderExpr.annihilation(1, 2) * LadderExpr.creation(2, 2)
    with pytest.raises(ParseError):
        parse_ladder("a*")


@given(ladders(max_degree=5))
def test_ladder_print_parse_round_trip(e):
    assert parse_ladder(format_ladder(e)) == e


# -- matrices ------------------------------------------------------------------------------

def test_annihilation_matrix():
    m = to_matrix(a, 3, 1.0).entries
    expected = np.zeros((3, 3))
    expected[0, 1], expected[1, 2] = 1.0, np.sqrt(2)
    assert np.array_equal(m, expected)


def test_number_matrix():
    assert np.array_equal(to_matrix(N, 4, 1.0).entries, np.diag([0, 1, 2, 3]))


def test_antiwick_x_squared_matrix():
    m = to_matrix(X * X + one * (HBAR / 2), 4, 1.0).entries
    n = np.arange(4)
    expected = np.diag(n + 1.0).astype(complex)
    for k in range(2):
        expected[k, k + 2] = expected[k + 2, k] = 0.5 * np.sqrt((k + 1) * (k + 2))
    assert np.allclose(m, expected, rtol=0, atol=1e-15)


def test_truncation_warning():
    with pytest.warns(TruncationWarning):
        m = to_matrix(a * a * a, 3, 1.0)
    assert m.truncation_warning
    assert not np.any(m.entries)


def test_matrices_are_read_only():
    m = to_matrix(N, 3, 1.0)
    with pytest.raises(ValueError):
        m.entries[0, 0] = 1.0


@given(ladders(max_degree=3), ladders(max_degree=3), st.sampled_from([0.5, 1.0, 2.0]))
def test_matrix_homomorphism_on_protected_block(x, y, hbar):
    cutoff = 10
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        prod = to_matrix(x * y, cutoff, hbar)
        mx, my = to_matrix(x, cutoff, hbar), to_matrix(y, cutoff, hbar)
    margin = x.mode_degree() + y.mode_degree()
    keep = cutoff - margin
    got = (mx.entries @ my.entries)[:keep, :keep]
    assert np.max(np.abs(got - prod.entries[:keep, :keep]), initial=0.0) <= 1e-12 * max(1.0, np.abs(got).max(initial=0))


@given(ladders(max_degree=4, mode_count=2))
def test_adjoint_matrix_exact(e):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        m = to_matrix(e, (4, 3), 0.5).entries
        madj = to_matrix(e.adjoint(), (4, 3), 0.5).entries
    assert np.array_equal(madj, m.conj().T)


def test_multimode_layout_is_row_major():
    a2 = LadderExpr.annihilation(2, 2)
    m = to_matrix(a2, (2, 3), 1.0).entries
    # |n1, n2> sits at index n1 * 3 + n2
    assert m[0 * 3 + 0, 0 * 3 + 1] == 1.0
    assert m[1 * 3 + 1, 1 * 3 + 2] == pytest.approx(np.sqrt(2))
