"""Truncated Fock-space states, coherent states and the Segal-Bargmann picture."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .errors import CutoffError, ModeMismatchError, TruncationWarning
from .operators import LadderExpr, to_matrix

COHERENT_TAIL_TOLERANCE = 1e-14
MAX_MODES = 3
_OCCUPIED = 1e-15


@dataclass(frozen=True, eq=False)
class FockState:
    """Dense coefficient vector over the row-major tensor Fock basis."""

    coefficients: np.ndarray
    cutoffs: tuple[int, ...]
    hbar: float = 1.0

    def __post_init__(self):
        cutoffs = tuple(int(c) for c in self.cutoffs)
        if not cutoffs or any(c < 1 for c in cutoffs):
            raise ValueError("cutoffs must be positive")
        if len(cutoffs) > MAX_MODES:
            raise ValueError(f"at most {MAX_MODES} modes are supported")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        c = np.array(self.coefficients, dtype=complex).reshape(-1)
        if c.size != int(np.prod(cutoffs)):
            raise ValueError(f"{c.size} coefficients do not match cutoffs {cutoffs}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "cutoffs", cutoffs)
        object.__setattr__(self, "hbar", float(self.hbar))

    @property
    def mode_count(self) -> int:
        return len(self.cutoffs)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def tensor(self) -> np.ndarray:
        return self.coefficients.reshape(self.cutoffs)

    def normalized(self) -> "FockState":
        n = self.norm
        if n == 0:
            raise ValueError("cannot normalise the zero vector")
        return FockState(self.coefficients / n, self.cutoffs, self.hbar)

    def highest_level(self) -> int:
        """Largest per-mode level carrying non-negligible amplitude."""
        t = np.abs(self.tensor()) ** 2
        top = 0
        for m in range(self.mode_count):
            axes = tuple(i for i in range(self.mode_count) if i != m)
            marginal = t.sum(axis=axes) if axes else t
            occupied = np.flatnonzero(marginal > _OCCUPIED)
            if occupied.size:
                top = max(top, int(occupied[-1]))
        return top

    def with_cutoffs(self, cutoffs: Sequence[int] | int) -> "FockState":
        """Zero-pad (or truncate) to new cutoffs."""
        if isinstance(cutoffs, int):
            cutoffs = (cutoffs,) * self.mode_count
        cutoffs = tuple(cutoffs)
        out = np.zeros(cutoffs, dtype=complex)
        src = self.tensor()
        sl = tuple(slice(0, min(a, b)) for a, b in zip(cutoffs, self.cutoffs))
        out[sl] = src[sl]
        return FockState(out.reshape(-1), cutoffs, self.hbar)

    def tensor_with(self, other: "FockState") -> "FockState":
        if other.hbar != self.hbar:
            raise ValueError("hbar differs between factors")
        return FockState(np.kron(self.coefficients, other.coefficients), self.cutoffs + other.cutoffs, self.hbar)

    # -- serialisation ----------------------------------------------------
    def to_json(self) -> str:
        return json.dumps(
            {
                "modeCount": self.mode_count,
                "cutoff": list(self.cutoffs),
                "hbar": self.hbar,
                "coefficients": [[float(c.real), float(c.imag)] for c in self.coefficients],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "FockState":
        data = json.loads(text)
        coeffs = np.array([complex(re, im) for re, im in data["coefficients"]])
        cutoffs = tuple(data["cutoff"])
        if len(cutoffs) != data["modeCount"]:
            raise ValueError("modeCount does not match the cutoff list")
        return cls(coeffs, cutoffs, data["hbar"])


def fock_state(levels: Sequence[int] | int, cutoff: Sequence[int] | int | None = None, hbar: float = 1.0) -> FockState:
    levels = (levels,) if isinstance(levels, int) else tuple(levels)
    if cutoff is None:
        cutoffs = tuple(n + 1 for n in levels)
    elif isinstance(cutoff, int):
        cutoffs = (cutoff,) * len(levels)
    else:
        cutoffs = tuple(cutoff)
    if any(n >= c for n, c in zip(levels, cutoffs)):
        raise CutoffError(f"level {levels} does not fit cutoff {cutoffs}", max(levels) + 1)
    out = np.zeros(cutoffs, dtype=complex)
    out[levels] = 1.0
    return FockState(out.reshape(-1), cutoffs, hbar)


def vacuum(mode_count: int = 1, cutoff: int = 1, hbar: float = 1.0) -> FockState:
    return fock_state((0,) * mode_count, cutoff, hbar)


def coherent_tail(alpha: complex, cutoff: int) -> float:
    """Probability mass sum_{n >= cutoff} exp(-|a|^2) |a|^(2n) / n!."""
    return float(poisson.sf(cutoff - 1, abs(alpha) ** 2))


def minimal_coherent_cutoff(alpha: complex, tolerance: float = COHERENT_TAIL_TOLERANCE) -> int:
    n = 1
    while coherent_tail(alpha, n) >= tolerance:
        n += 1
    return n


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """exp(-|a|^2/2) a^n / sqrt(n!) for n < cutoff, without any tail check."""
    n = np.arange(cutoff)
    with np.errstate(divide="ignore"):
        log_mag = np.where(n > 0, n * np.log(abs(alpha)) if alpha != 0 else -np.inf, 0.0)
    mag = np.exp(-abs(alpha) ** 2 / 2 + log_mag - 0.5 * gammaln(n + 1))
    return mag * np.exp(1j * np.angle(alpha) * n)


def coherent_state(
    alpha: Sequence[complex] | complex,
    cutoff: Sequence[int] | int | None = None,
    hbar: float = 1.0,
    tolerance: float = COHERENT_TAIL_TOLERANCE,
) -> FockState:
    """Truncated coherent state; raises CutoffError if the dropped tail exceeds tolerance."""
    alphas = [complex(alpha)] if np.isscalar(alpha) else [complex(a) for a in alpha]
    if cutoff is None:
        cutoffs = tuple(minimal_coherent_cutoff(a, tolerance / len(alphas)) for a in alphas)
    elif isinstance(cutoff, int):
        cutoffs = (cutoff,) * len(alphas)
    else:
        cutoffs = tuple(cutoff)
    if len(cutoffs) != len(alphas):
        raise ModeMismatchError("one cutoff per mode is required")
    kept = 1.0
    for a, c in zip(alphas, cutoffs):
        kept *= 1.0 - coherent_tail(a, c)
    if 1.0 - kept > tolerance:
        need = max(minimal_coherent_cutoff(a, tolerance / len(alphas)) for a in alphas)
        raise CutoffError(f"coherent tail mass {1.0 - kept:.3e} exceeds {tolerance:.1e}", need)
    vec = np.ones(1, dtype=complex)
    for a, c in zip(alphas, cutoffs):
        vec = np.kron(vec, coherent_amplitudes(a, c))
    return FockState(vec, cutoffs, hbar)


def expectation(psi: FockState, expr: LadderExpr, margin_tolerance: float = 1e-12) -> complex:
    """<psi| E |psi> with E realised on the state's truncated space.

    Matrix elements are exact on the truncated space, so the value is exact for
    the given coefficient vector. When the state has weight within deg(E) of
    the cutoff, a warning reports that weight as an estimate of the error made
    by the truncation of the underlying (untruncated) state.
    """
    if expr.mode_count != psi.mode_count:
        raise ModeMismatchError("operator and state mode counts differ")
    deg = expr.mode_degree()
    t = np.abs(psi.tensor()) ** 2
    near_top = np.zeros_like(t, dtype=bool)
    for m, c in enumerate(psi.cutoffs):
        idx = np.arange(c) >= c - deg
        shape = [1] * psi.mode_count
        shape[m] = c
        near_top |= idx.reshape(shape)
    edge_weight = float(t[near_top].sum()) if deg else 0.0
    if edge_weight > margin_tolerance:
        warnings.warn(
            f"state weight {edge_weight:.2e} lies within the operator degree {deg} of the cutoff "
            f"{psi.cutoffs}; estimated truncation error ~{edge_weight:.2e}",
            TruncationWarning,
            stacklevel=2,
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        mat = to_matrix(expr, psi.cutoffs, psi.hbar).entries
    v = psi.coefficients
    return complex(np.vdot(v, mat @ v))


# -- Segal-Bargmann picture ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SBFunction:
    """F(z) = sum_n c_n z^n / sqrt(n! hbar^|n|) on C^n."""

    coefficients: np.ndarray
    cutoffs: tuple[int, ...]
    hbar: float = 1.0

    @property
    def mode_count(self) -> int:
        return len(self.cutoffs)

    @property
    def norm(self) -> float:
        """Norm in L^2(mu_hbar); the monomials z^n / sqrt(n! hbar^n) are orthonormal."""
        return float(np.linalg.norm(self.coefficients))

    def __call__(self, z: Sequence[complex] | np.ndarray) -> np.ndarray:
        """Evaluate at points of shape (..., mode_count)."""
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.mode_count:
            raise ModeMismatchError("last axis must equal the mode count")
        flat = z.reshape(-1, self.mode_count)
        bases = []
        for m, N in enumerate(self.cutoffs):
            n = np.arange(N)
            bases.append((flat[:, m, None] / math.sqrt(self.hbar)) ** n * np.exp(-0.5 * gammaln(n + 1)))
        letters = "abc"[: self.mode_count]
        spec = letters + "," + ",".join("p" + l for l in letters) + "->p"
        out = np.einsum(spec, self.coefficients.reshape(self.cutoffs), *bases)
        return out.reshape(z.shape[:-1])

    def monomial_coefficient(self, level: Sequence[int]) -> complex:
        """Coefficient of z^level in the power series."""
        level = tuple(level)
        c = self.coefficients.reshape(self.cutoffs)[level]
        denom = math.prod(math.sqrt(math.factorial(n) * self.hbar**n) for n in level)
        return complex(c / denom)


def segal_bargmann_transform(psi: FockState) -> SBFunction:
    """|n> maps to z^n / sqrt(n! hbar^n); the coefficient vector carries over unchanged."""
    return SBFunction(psi.coefficients.copy(), psi.cutoffs, psi.hbar)


def hermite_functions(levels: int, x: np.ndarray, hbar: float = 1.0) -> np.ndarray:
    """Orthonormal oscillator eigenfunctions h_0..h_{levels-1} at x, shape (levels, *x.shape)."""
    x = np.asarray(x, dtype=float)
    xi = x / math.sqrt(hbar)
    out = np.empty((levels,) + x.shape)
    out[0] = (math.pi * hbar) ** -0.25 * np.exp(-0.5 * xi**2)
    if levels > 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for n in range(1, levels - 1):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * xi * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def position_wavefunction(psi: FockState, x: float | np.ndarray) -> complex | np.ndarray:
    """<x|psi> = sum_n c_n h_n(x)."""
    if psi.mode_count != 1:
        raise ModeMismatchError("position wavefunction is single-mode only")
    x_arr = np.asarray(x, dtype=float)
    h = hermite_functions(psi.cutoffs[0], x_arr, psi.hbar)
    val = np.tensordot(psi.coefficients, h, axes=(0, 0))
    return complex(val) if np.ndim(x) == 0 else val


# -- state literals ----------------------------------------------------------------

def parse_state(spec: str, hbar: float = 1.0, cutoff: int | None = None, margin: int = 0) -> FockState:
    """Parse "vacuum", "fock:n", "coherent:re,im" or "superpose:w@state;w@state".

    Factors joined with '&' are tensored into a multimode state. ``margin``
    extra levels are added to automatically chosen cutoffs.
    """
    parts = [p.strip() for p in spec.split("&")]
    states = [_parse_single(p, hbar, cutoff, margin) for p in parts]
    out = states[0]
    for s in states[1:]:
        out = out.tensor_with(s)
    return out


def _weight(text: str) -> complex:
    # accept both i and j as the imaginary unit
    raw = text.replace(" ", "")
    try:
        return complex(raw.replace("i", "j"))
    except ValueError:
        raise ValueError(f"bad superposition weight {text!r}") from None


def _parse_single(spec: str, hbar: float, cutoff: int | None, margin: int) -> FockState:
    spec = spec.strip()
    if spec == "vacuum":
        return fock_state(0, cutoff or 1 + margin, hbar)
    kind, _, arg = spec.partition(":")
    if kind == "fock":
        n = int(arg)
        if n < 0:
            raise ValueError("Fock level must be nonnegative")
        return fock_state(n, cutoff or n + 1 + margin, hbar)
    if kind == "coherent":
        re, _, im = arg.partition(",")
        alpha = complex(float(re), float(im or 0.0))
        if cutoff is None:
            return coherent_state(alpha, minimal_coherent_cutoff(alpha) + margin, hbar)
        return coherent_state(alpha, cutoff, hbar)
    if kind == "superpose":
        pieces = []
        for item in arg.split(";"):
            w, sep, sub = item.partition("@")
            if not sep:
                raise ValueError(f"superposition item {item!r} needs 'weight@state'")
            pieces.append((_weight(w), _parse_single(sub, hbar, cutoff, margin)))
        top = max(s.cutoffs[0] for _, s in pieces)
        vec = sum(w * s.with_cutoffs(top).coefficients for w, s in pieces)
        return FockState(vec, (top,), hbar).normalized()
    raise ValueError(f"unknown state literal {spec!r}")
