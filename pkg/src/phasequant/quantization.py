"""Weyl, Wick and anti-Wick quantization of polynomial symbols, and their inverses."""

from __future__ import annotations

import math
import warnings
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .coeff import Coeff, HBAR, I, ONE, S, ZERO
from .errors import DegreeCapError, TruncationWarning
from .operators import (
    LadderExpr,
    OperatorMatrix,
    antinormal_order_form,
    commutator,
    embed,
    from_antinormal,
    to_matrix,
)
from .quadrature import QuadratureGrid
from .symbols import DEFAULT_DEGREE_CAP, PhaseSymbol, poisson_bracket


class Scheme(str, Enum):
    WEYL = "weyl"
    WICK = "wick"
    ANTIWICK = "antiwick"

    def __str__(self) -> str:
        return self.value


def _check_cap(f, cap: int) -> None:
    if f.mode_degree() > cap:
        raise DegreeCapError(f"symbol degree {f.mode_degree()} exceeds the cap {cap}", cap)


@lru_cache(maxsize=None)
def _word_sum(j: int, k: int) -> LadderExpr:
    """Sum over all distinct words with j copies of X and k copies of P (one mode).

    Built from the first letter: W(j, k) = X W(j-1, k) + P W(j, k-1).
    """
    if j == 0 and k == 0:
        return LadderExpr.identity(1)
    out = LadderExpr.zero(1)
    if j:
        out = out + LadderExpr.position() * _word_sum(j - 1, k)
    if k:
        out = out + LadderExpr.momentum() * _word_sum(j, k - 1)
    return out


@lru_cache(maxsize=None)
def weyl_monomial(j: int, k: int) -> LadderExpr:
    """Q_Weyl(x^j p^k) for one mode: the average over all orderings.

    Every one of the (j+k)! permutations produces one of the C(j+k, j) distinct
    words exactly j! k! times, so the permutation average equals the word average.
    """
    return _word_sum(j, k) * Fraction(1, math.comb(j + k, j))


def quantize(f: PhaseSymbol, scheme: Scheme | str, degree_cap: int = DEFAULT_DEGREE_CAP) -> LadderExpr:
    scheme = Scheme(scheme)
    _check_cap(f, degree_cap)
    n = f.mode_count
    if scheme is Scheme.ANTIWICK:
        # alpha^j abar^k -> a^j (a^dagger)^k
        return from_antinormal(f.terms, n)
    if scheme is Scheme.WICK:
        # alpha^j abar^k -> (a^dagger)^k a^j
        return LadderExpr(n, {tuple((k, j) for j, k in key): c for key, c in f.terms.items()})
    out = LadderExpr.zero(n)
    for key, c in f.xp_terms().items():
        term = LadderExpr.identity(n, c)
        for mode, (j, k) in enumerate(key, start=1):
            if j or k:
                term = term * embed(weyl_monomial(j, k), mode, n)
        out = out + term
    return out


def _heat(f: PhaseSymbol, t: Fraction) -> PhaseSymbol:
    """exp(t * Laplacian) f; terminates because f is polynomial."""
    out = f
    term = f
    r = 1
    while True:
        term = term.laplacian() * Fraction(t) * Fraction(1, r)
        if term.is_zero():
            return out
        out = out + term
        r += 1


def symbol_of(expr: LadderExpr, scheme: Scheme | str) -> PhaseSymbol:
    """The symbol that ``scheme`` maps to ``expr``.

    Wick: read off the normal form. Anti-Wick: read off the anti-normal form.
    Weyl: the Weyl symbol is exp(-Laplacian/2) applied to the Wick symbol.
    """
    scheme = Scheme(scheme)
    n = expr.mode_count
    if scheme is Scheme.ANTIWICK:
        return PhaseSymbol(n, antinormal_order_form(expr))
    wick = PhaseSymbol(n, {tuple((an, cr) for cr, an in key): c for key, c in expr.terms.items()})
    if scheme is Scheme.WICK:
        return wick
    return _heat(wick, Fraction(-1, 2))


def convert_scheme(
    f: PhaseSymbol, source: Scheme | str, target: Scheme | str, degree_cap: int = DEFAULT_DEGREE_CAP
) -> PhaseSymbol:
    return symbol_of(quantize(f, source, degree_cap), target)


def groenewold_residual(
    f: PhaseSymbol, g: PhaseSymbol, degree_cap: int = DEFAULT_DEGREE_CAP
) -> LadderExpr:
    """(1/(i hbar)) [Q(f), Q(g)] - Q({f, g}) with Weyl Q, exactly."""
    lhs = commutator(quantize(f, Scheme.WEYL, degree_cap), quantize(g, Scheme.WEYL, degree_cap))
    lhs = lhs * (I * HBAR).inverse()
    return lhs - quantize(poisson_bracket(f, g), Scheme.WEYL, degree_cap)


def divisible_by_hbar_power(expr: LadderExpr, power: int) -> bool:
    """True when every coefficient is hbar^power times a polynomial in sqrt(hbar)."""
    return all(c.min_power() >= 2 * power for c in expr.terms.values())


# -- quadrature route ------------------------------------------------------------

def _single_mode_toeplitz(j: int, k: int, cutoff: int, grid: QuadratureGrid) -> np.ndarray:
    """int alpha^j abar^k |alpha><alpha| d^2alpha / pi by quadrature."""
    alpha = grid.points()[:, 0]
    w = grid.lebesgue_weights()
    levels = np.arange(cutoff)
    log_fact = np.array([math.lgamma(n + 1) for n in levels])
    # <n|alpha> = exp(-|alpha|^2/2) alpha^n / sqrt(n!)
    amps = np.exp(-np.abs(alpha)[:, None] ** 2 / 2 - 0.5 * log_fact[None, :]) * alpha[:, None] ** levels
    f = alpha**j * np.conj(alpha) ** k
    return np.einsum("p,pm,pn->mn", w * f / np.pi, amps, np.conj(amps))


def toeplitz_matrix(
    f: PhaseSymbol,
    grid: QuadratureGrid | None = None,
    cutoff: int | tuple = 6,
    hbar: float = 1.0,
    tolerance: float = 1e-7,
) -> OperatorMatrix:
    """Coherent-state projector integral int f(alpha) |alpha><alpha| d^2n alpha / pi^n.

    The integral factorises over modes term by term; each single-mode block is
    computed by Gauss-Hermite quadrature. The result is compared against the
    symbolic anti-Wick matrix on the block untouched by truncation, and a
    warning is raised when they diverge by more than ``tolerance``.
    """
    n = f.mode_count
    grid = grid or QuadratureGrid(1)
    if grid.mode_count != 1:
        grid = QuadratureGrid(1, grid.nodes, (grid.center[0],), grid.scale)
    cutoffs = (cutoff,) * n if isinstance(cutoff, int) else tuple(cutoff)
    dim = int(np.prod(cutoffs))
    out = np.zeros((dim, dim), dtype=complex)
    for key, c in f.terms.items():
        block = np.ones((1, 1))
        for (j, k), N in zip(key, cutoffs):
            block = np.kron(block, _single_mode_toeplitz(j, k, N, grid))
        out += c.evaluate(hbar) * block
    out.setflags(write=False)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        symbolic = to_matrix(quantize(f, Scheme.ANTIWICK), cutoffs, hbar)
    result = OperatorMatrix(out, cutoffs, float(hbar))
    margin = f.mode_degree()
    dev = toeplitz_deviation(result, symbolic, margin)
    message = None
    if dev > tolerance:
        message = f"quadrature Toeplitz matrix deviates from the symbolic route by {dev:.3e}"
        warnings.warn(message, TruncationWarning, stacklevel=2)
    return OperatorMatrix(out, cutoffs, float(hbar), message)


def toeplitz_deviation(a: OperatorMatrix, b: OperatorMatrix, margin: int) -> float:
    """Max entrywise difference on the protected block (0.0 if the block is empty)."""
    pa, pb = a.protected_block(margin), b.protected_block(margin)
    return float(np.max(np.abs(pa - pb))) if pa.size else 0.0
