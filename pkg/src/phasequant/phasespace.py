"""Husimi and Wigner functions, phase-space averages and marginals.

Two normalisations of the Husimi function are used:

* ``alpha``: Q(alpha) = |<alpha|psi>|^2 / pi^n, a density for d^2n alpha;
* ``xp``:    Q(x, p) = Q(alpha) / (2 hbar)^n, a density for dx dp,

related by d^2 alpha = dx dp / (2 hbar) per mode.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import ModeMismatchError
from .fock import (
    FockState,
    SBFunction,
    coherent_amplitudes,
    expectation,
    hermite_functions,
    position_wavefunction,
    segal_bargmann_transform,
)
from .quadrature import DEFAULT_NODES, QuadratureGrid, gauss_hermite, line_rule
from .quantization import Scheme, quantize
from .symbols import PhaseSymbol, evaluate_symbol_grid, parse_symbol

WIGNER_NODES = 100


class Normalization(str, Enum):
    ALPHA = "alphaDensity"
    XP = "xpDensity"


def alpha_from_xp(x, p, hbar: float):
    return (np.asarray(x) + 1j * np.asarray(p)) / math.sqrt(2 * hbar)


def _overlaps(psi: FockState, alpha: np.ndarray) -> np.ndarray:
    """<alpha|psi> at points of shape (P, n) by the closed-form coherent amplitudes."""
    out = psi.tensor()
    P = alpha.shape[0]
    letters = "abc"[: psi.mode_count]
    bases = []
    for m, N in enumerate(psi.cutoffs):
        a = alpha[:, m]
        n = np.arange(N)
        # conj(<n|alpha>) = exp(-|a|^2/2) abar^n / sqrt(n!)
        bases.append(np.exp(-np.abs(a)[:, None] ** 2 / 2 - 0.5 * gammaln(n + 1)) * np.conj(a)[:, None] ** n)
    spec = letters + "," + ",".join("p" + l for l in letters) + "->p"
    return np.einsum(spec, out, *bases).reshape(P)


def husimi_q(
    psi: FockState,
    alpha: Sequence[complex] | np.ndarray,
    normalization: Normalization | str = Normalization.ALPHA,
) -> float | np.ndarray:
    """Q_psi at one amplitude vector or at an array of shape (P, mode_count).

    The coherent amplitudes are evaluated in closed form for every level below
    the state's cutoff, so no coherent-state truncation error enters.
    """
    normalization = Normalization(normalization)
    arr = np.asarray(alpha, dtype=complex)
    single = arr.ndim <= 1
    pts = arr.reshape(1, -1) if single else arr
    if pts.shape[-1] != psi.mode_count:
        raise ModeMismatchError("point dimension does not match the state's mode count")
    q = np.abs(_overlaps(psi, pts)) ** 2 / np.pi**psi.mode_count
    if normalization is Normalization.XP:
        q = q / (2 * psi.hbar) ** psi.mode_count
    return float(q[0]) if single else q


def husimi_q_xp(psi: FockState, x, p) -> np.ndarray:
    """Single-mode Q(x, p) in the dx dp normalisation; broadcasts over x and p."""
    x, p = np.broadcast_arrays(np.asarray(x, float), np.asarray(p, float))
    a = alpha_from_xp(x, p, psi.hbar).reshape(-1, 1)
    return husimi_q(psi, a, Normalization.XP).reshape(x.shape)


def q_bound(hbar: float, mode_count: int = 1, normalization: Normalization | str = Normalization.XP) -> float:
    if Normalization(normalization) is Normalization.XP:
        return 1.0 / (2 * np.pi * hbar) ** mode_count
    return 1.0 / np.pi**mode_count


@dataclass(frozen=True)
class HusimiDensity:
    state: FockState
    normalization: Normalization = Normalization.ALPHA

    def __call__(self, alpha):
        return husimi_q(self.state, alpha, self.normalization)

    @property
    def bound(self) -> float:
        return q_bound(self.state.hbar, self.state.mode_count, self.normalization)


# -- Q = |F|^2 mu -----------------------------------------------------------------

def sb_route_q(F: SBFunction, alpha: np.ndarray) -> np.ndarray:
    """|F(z)|^2 mu_hbar(z) hbar^n at z = sqrt(hbar) * conj(alpha): the alpha-density.

    The factor hbar^n converts the measure dz on C^n to d^2n alpha.
    """
    z = math.sqrt(F.hbar) * np.conj(alpha)
    mu = np.exp(-np.sum(np.abs(z) ** 2, axis=-1) / F.hbar) / (np.pi * F.hbar) ** F.mode_count
    return np.abs(F(z)) ** 2 * mu * F.hbar**F.mode_count


def q_equals_sb_check(psi: FockState, points: np.ndarray) -> float:
    """Sup deviation between the coherent-overlap Q and |F|^2 mu at the points."""
    pts = np.asarray(points, dtype=complex).reshape(-1, psi.mode_count)
    # coherent-state route: explicit coherent vectors, inner product with psi
    direct = np.empty(pts.shape[0])
    for i, a in enumerate(pts):
        vec = np.ones(1, dtype=complex)
        for m, N in enumerate(psi.cutoffs):
            vec = np.kron(vec, coherent_amplitudes(complex(a[m]), N))
        direct[i] = abs(np.vdot(vec, psi.coefficients)) ** 2 / np.pi**psi.mode_count
    sb = sb_route_q(segal_bargmann_transform(psi), pts)
    return float(np.max(np.abs(direct - sb)))


# -- averages ------------------------------------------------------------------------

def exact_q_average(f: PhaseSymbol, psi: FockState) -> complex:
    """int f(alpha) Q_psi(alpha) d^2n alpha by exact Gaussian moments.

    With Q = exp(-|alpha|^2)/pi^n * sum_{m,n} conj(c_m) c_n alpha^m abar^n / sqrt(m! n!),
    each term of f times each pair (m, n) integrates to a product of moments
    int alpha^(j+m) abar^(k+n) exp(-|alpha|^2) d^2alpha / pi.
    """
    if f.mode_count != psi.mode_count:
        raise ModeMismatchError("symbol and state mode counts differ")
    c = psi.tensor()
    total = 0j
    for key, coeff in f.terms.items():
        # alpha^j abar^k * alpha^m abar^n survives only for n = m + j - k in every mode
        src, dst, weights = [], [], []
        for (j, k), N in zip(key, psi.cutoffs):
            shift = j - k
            m_lo, m_hi = max(0, -shift), min(N, N - shift)
            if m_lo >= m_hi:
                break
            m = np.arange(m_lo, m_hi)
            # (m+j)! / sqrt(m! n!) with n = m + shift
            weights.append(np.exp(gammaln(m + j + 1) - 0.5 * (gammaln(m + 1) + gammaln(m + shift + 1))))
            src.append(slice(m_lo, m_hi))
            dst.append(slice(m_lo + shift, m_hi + shift))
        else:
            weight = weights[0]
            for w in weights[1:]:
                weight = np.multiply.outer(weight, w)
            pair = np.conj(c[tuple(src)]) * c[tuple(dst)]
            total += coeff.evaluate(psi.hbar) * np.sum(weight * pair)
    return complex(total)


def quadrature_q_average(
    f: PhaseSymbol,
    psi: FockState,
    grid: QuadratureGrid | None = None,
    with_error: bool = False,
):
    """int f Q_psi d^2n alpha on a Gauss-Hermite grid.

    Centering defaults to the mean displacement <a> of the state.
    """
    if f.mode_count != psi.mode_count:
        raise ModeMismatchError("symbol and state mode counts differ")
    if grid is None:
        center = tuple(mean_displacement(psi))
        grid = QuadratureGrid(psi.mode_count, DEFAULT_NODES, center)
    if grid.mode_count != psi.mode_count:
        raise ModeMismatchError("grid dimension does not match the state")

    def integrand(pts):
        return evaluate_symbol_grid(f, pts, psi.hbar) * husimi_q(psi, pts)

    if with_error:
        return grid.integrate_with_error(integrand)
    return grid.integrate(integrand)


def mean_displacement(psi: FockState) -> np.ndarray:
    """<a_m> per mode, computed directly from the coefficient tensor."""
    t = psi.tensor()
    out = []
    for m, N in enumerate(psi.cutoffs):
        lo = [slice(None)] * psi.mode_count
        hi = [slice(None)] * psi.mode_count
        lo[m], hi[m] = slice(0, N - 1), slice(1, N)
        shape = [1] * psi.mode_count
        shape[m] = N - 1
        root = np.sqrt(np.arange(1, N)).reshape(shape)
        out.append(np.sum(np.conj(t[tuple(lo)]) * root * t[tuple(hi)]))
    return np.array(out, dtype=complex)


def reproducing_apply(
    F: SBFunction, z: Sequence[complex], grid: QuadratureGrid | None = None
) -> complex:
    """int exp(z . conj(w) / hbar) F(w) mu_hbar(w) dw by quadrature.

    With w = sqrt(hbar) * alpha the measure mu_hbar(w) dw is exp(-|alpha|^2) d^2n alpha / pi^n,
    and the grid is recentred at alpha = z / sqrt(hbar) where the integrand peaks.
    """
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.size != F.mode_count:
        raise ModeMismatchError("point dimension does not match the function")
    grid = grid or QuadratureGrid(F.mode_count, DEFAULT_NODES)
    grid = grid.recentered(tuple(z / math.sqrt(F.hbar)))
    h = F.hbar

    def integrand(alpha):
        w = math.sqrt(h) * alpha
        kernel = np.exp(np.sum(z[None, :] * np.conj(w), axis=-1) / h)
        gauss = np.exp(-np.sum(np.abs(alpha) ** 2, axis=-1)) / np.pi**F.mode_count
        return kernel * F(w) * gauss

    return grid.integrate(integrand)


# -- Wigner and smoothing ------------------------------------------------------------

def _single_mode(psi: FockState) -> None:
    if psi.mode_count != 1:
        raise ModeMismatchError("this operation is single-mode only")


def _wigner_lines(psi: FockState, xs: np.ndarray, ps: np.ndarray, nodes: int) -> np.ndarray:
    """W on the outer grid xs x ps, shape (len(xs), len(ps)).

    The rule over y = sqrt(hbar) t resolves the phase exp(2 i p y / hbar) while
    2|p|/sqrt(hbar) stays well below sqrt(2 * nodes); beyond that W of a
    low-lying state is negligible but the computed value is not.
    """
    h = psi.hbar
    t, w = gauss_hermite(nodes)
    y = math.sqrt(h) * t
    c = psi.coefficients
    N = psi.cutoffs[0]
    plus = np.tensordot(c, hermite_functions(N, xs[:, None] + y[None, :], h), axes=(0, 0))
    minus = np.tensordot(c, hermite_functions(N, xs[:, None] - y[None, :], h), axes=(0, 0))
    # the Gaussian factor exp(-t^2) is carried by the weights
    prod = np.conj(plus) * minus * np.exp(t**2)[None, :] * (w * math.sqrt(h))[None, :]
    phase = np.exp(2j * ps[:, None] * y[None, :] / h)  # (len(ps), nodes)
    return (prod @ phase.T).real / (np.pi * h)


def wigner(psi: FockState, x, p, nodes: int = WIGNER_NODES):
    """(1/(pi hbar)) int conj(psi(x+y)) psi(x-y) exp(2 i p y / hbar) dy.

    Scalars give a float; arrays are broadcast elementwise.
    """
    _single_mode(psi)
    xb, pb = np.broadcast_arrays(np.asarray(x, float), np.asarray(p, float))
    flat_x, flat_p = xb.reshape(-1), pb.reshape(-1)
    out = np.array([_wigner_lines(psi, flat_x[i:i + 1], flat_p[i:i + 1], nodes)[0, 0] for i in range(flat_x.size)])
    return float(out[0]) if xb.ndim == 0 else out.reshape(xb.shape)


def wigner_grid(psi: FockState, xs: Sequence[float], ps: Sequence[float], nodes: int = WIGNER_NODES) -> np.ndarray:
    _single_mode(psi)
    return _wigner_lines(psi, np.asarray(xs, float), np.asarray(ps, float), nodes)


def weierstrass_smooth(
    psi: FockState, x: float, p: float, nodes: int = DEFAULT_NODES, wigner_nodes: int = WIGNER_NODES
) -> float:
    """Convolution of W with a Gaussian of variance hbar/2 along x and along p."""
    _single_mode(psi)
    h = psi.hbar
    t, w = gauss_hermite(nodes)
    # x' = x + sqrt(hbar) t has weight exp(-t^2)/sqrt(pi) for variance hbar/2
    xs = x + math.sqrt(h) * t
    ps = p + math.sqrt(h) * t
    W = _wigner_lines(psi, xs, ps, wigner_nodes)
    return float(w @ W @ w / np.pi)


def weierstrass_grid(psi: FockState, xs, ps, nodes: int = DEFAULT_NODES) -> np.ndarray:
    return np.array([[weierstrass_smooth(psi, x, p, nodes) for p in ps] for x in xs])


def q_marginal_x(psi: FockState, x, nodes: int = DEFAULT_NODES):
    """int Q(x, p) dp for the dx dp normalised Husimi function."""
    _single_mode(psi)
    h = psi.hbar
    p0 = math.sqrt(2 * h) * mean_displacement(psi)[0].imag
    pts, wts = line_rule(nodes, p0, math.sqrt(2 * h))
    xb = np.atleast_1d(np.asarray(x, float))
    vals = husimi_q_xp(psi, xb[:, None], pts[None, :]) @ wts
    return float(vals[0]) if np.ndim(x) == 0 else vals


def born_density_x(psi: FockState, x):
    return np.abs(np.asarray(position_wavefunction(psi, x))) ** 2


def marginal_second_moments(psi: FockState, nodes: int = DEFAULT_NODES) -> tuple[float, float]:
    """(int x^2 Qmarg dx, int x^2 |psi(x)|^2 dx), both by Gauss-Hermite rules."""
    h = psi.hbar
    x0 = math.sqrt(2 * h) * mean_displacement(psi)[0].real
    xq, wq = line_rule(nodes, x0, math.sqrt(2 * h))
    q2 = float(np.sum(wq * xq**2 * q_marginal_x(psi, xq, nodes)))
    xb, wb = line_rule(nodes, x0, math.sqrt(h))
    b2 = float(np.sum(wb * xb**2 * born_density_x(psi, xb)))
    return q2, b2


# -- variances ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VarianceReport:
    scheme: str
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    product: float


def variance_report(psi: FockState, scheme: Scheme | str) -> VarianceReport:
    _single_mode(psi)
    scheme = Scheme(scheme)
    ev = {
        name: expectation(psi, quantize(parse_symbol(name), scheme)).real
        for name in ("x", "p", "x^2", "p^2")
    }
    vx = ev["x^2"] - ev["x"] ** 2
    vp = ev["p^2"] - ev["p"] ** 2
    return VarianceReport(scheme.value, ev["x"], ev["p"], vx, vp, vx * vp)


# -- dumps -------------------------------------------------------------------------------

def default_axis(hbar: float, points: int = 41) -> np.ndarray:
    half = 4 * math.sqrt(hbar)
    return np.linspace(-half, half, points)


def qgrid_rows(psi: FockState, xs, ps, smooth_nodes: int = DEFAULT_NODES) -> list[dict]:
    _single_mode(psi)
    xs, ps = np.asarray(xs, float), np.asarray(ps, float)
    W = wigner_grid(psi, xs, ps)
    Q = husimi_q_xp(psi, xs[:, None], ps[None, :])
    S = weierstrass_grid(psi, xs, ps, smooth_nodes)
    rows = []
    for i, x in enumerate(xs):
        for j, p in enumerate(ps):
            rows.append(
                {
                    "x": float(x),
                    "p": float(p),
                    "Q": float(Q[i, j]),
                    "W": float(W[i, j]),
                    "smoothedW": float(S[i, j]),
                }
            )
    return rows


def marginal_rows(psi: FockState, xs, nodes: int = DEFAULT_NODES) -> list[dict]:
    xs = np.asarray(xs, float)
    qm = q_marginal_x(psi, xs, nodes)
    born = born_density_x(psi, xs)
    return [{"x": float(x), "qmarg": float(a), "born": float(b)} for x, a, b in zip(xs, qm, born)]


def rows_to_csv(rows: list[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(float(row[c])) for c in columns])
    return buf.getvalue()


def rows_to_json(rows: list[dict]) -> str:
    return json.dumps(rows, indent=1)
