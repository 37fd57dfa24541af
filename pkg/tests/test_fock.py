import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasequant.errors import CutoffError, TruncationWarning
from phasequant.fock import (
    FockState,
    coherent_state,
    coherent_tail,
    expectation,
    fock_state,
    hermite_functions,
    minimal_coherent_cutoff,
    parse_state,
    position_wavefunction,
    segal_bargmann_transform,
    vacuum,
)
from phasequant.operators import LadderExpr
from phasequant.quadrature import QuadratureGrid, line_rule
from phasequant.quantization import quantize
from phasequant.symbols import parse_symbol

from conftest import ladders, states

a, ad = LadderExpr.annihilation(), LadderExpr.creation()
complex_points = st.complex_numbers(max_magnitude=2.5, allow_nan=False, allow_infinity=False)


def test_coherent_zero_is_vacuum():
    psi = coherent_state(0.0, cutoff=4)
    assert np.array_equal(psi.coefficients, [1, 0, 0, 0])


def test_coherent_amplitudes_closed_form():
    psi = coherent_state(1.0, cutoff=20)
    n = np.arange(20)
    expected = math.exp(-0.5) / np.sqrt([math.factorial(k) for k in n])
    assert np.allclose(psi.coefficients, expected, rtol=1e-14)
    assert abs(psi.norm - 1) <= 1e-12


def test_coherent_cutoff_error_reports_minimum():
    with pytest.raises(CutoffError) as info:
        coherent_state(3.0, cutoff=5)
    need = info.value.minimal_cutoff
    assert need == minimal_coherent_cutoff(3.0)
    assert coherent_tail(3.0, need) < 1e-14 <= coherent_tail(3.0, need - 1)
    coherent_state(3.0, cutoff=need)


@given(complex_points)
def test_coherent_eigenvalue(alpha):
    # one protection level for the degree-1 operator
    psi = coherent_state(alpha, minimal_coherent_cutoff(alpha) + 1)
    assert expectation(psi, a) == pytest.approx(alpha, abs=1e-10)


@given(complex_points, complex_points)
def test_coherent_overlap(alpha, beta):
    cut = max(minimal_coherent_cutoff(alpha), minimal_coherent_cutoff(beta))
    u, v = coherent_state(alpha, cut), coherent_state(beta, cut)
    assert abs(np.vdot(u.coefficients, v.coefficients)) ** 2 == pytest.approx(
        math.exp(-abs(alpha - beta) ** 2), abs=1e-10
    )


def test_expectation_examples():
    assert expectation(vacuum(cutoff=3), LadderExpr.number()) == 0
    x2 = quantize(parse_symbol("x^2"), "antiwick")
    assert expectation(vacuum(cutoff=3), x2) == pytest.approx(1.0)
    X = LadderExpr.position()
    assert expectation(coherent_state(1.0), X) == pytest.approx(math.sqrt(2), abs=1e-10)


@given(states(pad=3), ladders(max_degree=3))
def test_expectation_conjugate_symmetric(psi, e):
    assert expectation(psi, e.adjoint()) == pytest.approx(np.conj(expectation(psi, e)), abs=1e-9)


def test_expectation_warns_near_cutoff():
    psi = fock_state(2, 3)
    with pytest.warns(TruncationWarning):
        expectation(psi, a * a * ad * ad)
    with warnings.catch_warnings():
        warnings.simplefilter("error", TruncationWarning)
        expectation(psi.with_cutoffs(7), a * a * ad * ad)


def test_mode_limit():
    with pytest.raises(ValueError):
        FockState(np.ones(16), (2, 2, 2, 2))


# -- Segal-Bargmann ----------------------------------------------------------------------

def test_sb_vacuum_is_constant():
    F = segal_bargmann_transform(vacuum())
    assert np.allclose(F(np.array([[0.3 - 2j], [5.0]])), 1.0)


@pytest.mark.parametrize("hbar", [0.5, 1.0, 2.0])
def test_sb_first_level_is_scaled_identity(hbar):
    F = segal_bargmann_transform(fock_state(1, hbar=hbar))
    z = np.array([[1 + 1j], [-0.4 + 2j]])
    assert np.allclose(F(z), z[:, 0] / math.sqrt(hbar))


@given(states(max_levels=7), st.sampled_from([0.5, 1.0, 2.0]))
def test_sb_parseval(psi, hbar):
    psi = FockState(psi.coefficients, psi.cutoffs, hbar)
    F = segal_bargmann_transform(psi)
    assert F.norm == pytest.approx(psi.norm, rel=1e-12)
    # int |F(z)|^2 mu_hbar(z) d^2z with z = sqrt(hbar) w and w Gaussian-distributed
    grid = QuadratureGrid(1, 16)
    sq = np.sum(grid.gaussian_weights() * np.abs(F(math.sqrt(hbar) * grid.points())) ** 2)
    assert sq == pytest.approx(psi.norm**2, rel=1e-12)
    levels = range(psi.cutoffs[0])
    coefs = [F.monomial_coefficient([n]) * math.sqrt(math.factorial(n) * psi.hbar**n) for n in levels]
    assert np.allclose(coefs, psi.coefficients)


# -- position representation ---------------------------------------------------------------

def test_vacuum_wavefunction():
    assert position_wavefunction(vacuum(), 0.0) == pytest.approx(math.pi**-0.25)
    assert position_wavefunction(fock_state(1), 0.0) == pytest.approx(0.0)


@given(states(max_levels=8), st.sampled_from([0.5, 1.0, 2.0]))
def test_wavefunction_normalized(psi, hbar):
    psi = FockState(psi.coefficients, psi.cutoffs, hbar)
    xs, ws = line_rule(60, 0.0, math.sqrt(hbar))
    total = np.sum(ws * np.abs(position_wavefunction(psi, xs)) ** 2)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_hermite_functions_orthonormal_at_high_level():
    xs, ws = line_rule(150, 0.0, 1.0)
    h = hermite_functions(120, xs)
    gram = (h * ws) @ h.T
    assert np.allclose(gram, np.eye(120), atol=1e-9)
    assert np.all(np.isfinite(hermite_functions(400, np.array([30.0]))))


# -- literals and serialisation ----------------------------------------------------------------

def test_parse_state_literals():
    assert np.array_equal(parse_state("fock:2").coefficients, [0, 0, 1])
    assert parse_state("vacuum", cutoff=4).cutoffs == (4,)
    two = parse_state("fock:1 & vacuum")
    assert two.mode_count == 2
    sup = parse_state("superpose:1@vacuum;1j@fock:2")
    assert np.allclose(sup.coefficients, np.array([1, 0, 1j]) / math.sqrt(2))
    assert np.array_equal(parse_state("superpose:1@vacuum;2i@fock:1").coefficients,
                          parse_state("superpose:1@vacuum;2j@fock:1").coefficients)
    with pytest.raises(ValueError):
        parse_state("squeezed:1")
    with pytest.raises(ValueError, match="weight"):
        parse_state("superpose:1+x@vacuum")


def test_json_round_trip():
    psi = parse_state("superpose:1@fock:1;0.5-2j@coherent:0.3,0.1", hbar=0.5)
    back = FockState.from_json(psi.to_json())
    assert np.array_equal(back.coefficients, psi.coefficients)
    assert back.cutoffs == psi.cutoffs and back.hbar == psi.hbar
    header = psi.to_json()
    assert '"modeCount": 1' in header and '"cutoff"' in header and '"hbar": 0.5' in header
