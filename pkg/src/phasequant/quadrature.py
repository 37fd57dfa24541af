"""Tensor-product Gauss-Hermite grids over complex phase space."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.hermite import hermgauss

DEFAULT_NODES = 40


@lru_cache(maxsize=64)
def gauss_hermite(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for int f(t) exp(-t^2) dt."""
    t, w = hermgauss(n)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


@lru_cache(maxsize=64)
def _log_weights(n: int) -> np.ndarray:
    t, w = gauss_hermite(n)
    out = np.log(w) + t**2
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class QuadratureGrid:
    """Gauss-Hermite grid over C^n with alpha_m = center_m + scale * (u + i v).

    The reference Gaussian is exp(-sum(u^2 + v^2)) / pi^n in the scaled
    variables; ``gaussian_weights`` integrate against it exactly for
    polynomials of degree <= 2*nodes - 1 in each real coordinate.
    """

    mode_count: int = 1
    nodes: int = DEFAULT_NODES
    center: tuple[complex, ...] | None = None
    scale: float = 1.0

    def __post_init__(self):
        if self.mode_count < 1 or self.nodes < 1 or self.scale <= 0:
            raise ValueError("mode_count, nodes and scale must be positive")
        center = self.center if self.center is not None else (0j,) * self.mode_count
        center = tuple(complex(c) for c in center)
        if len(center) != self.mode_count:
            raise ValueError("center length must equal mode_count")
        object.__setattr__(self, "center", center)

    @property
    def dimension(self) -> int:
        return 2 * self.mode_count

    def recentered(self, center: Sequence[complex]) -> "QuadratureGrid":
        return QuadratureGrid(self.mode_count, self.nodes, tuple(center), self.scale)

    def with_nodes(self, nodes: int) -> "QuadratureGrid":
        return QuadratureGrid(self.mode_count, nodes, self.center, self.scale)

    def _mesh(self):
        t, _ = gauss_hermite(self.nodes)
        axes = np.meshgrid(*([t] * self.dimension), indexing="ij")
        return [a.reshape(-1) for a in axes]

    def reference_points(self) -> np.ndarray:
        """Unscaled u + i v per mode, shape (P, mode_count)."""
        axes = self._mesh()
        return np.stack([axes[2 * m] + 1j * axes[2 * m + 1] for m in range(self.mode_count)], axis=-1)

    def points(self) -> np.ndarray:
        """Phase-space amplitudes alpha, shape (P, mode_count)."""
        return np.asarray(self.center) + self.scale * self.reference_points()

    def gaussian_weights(self) -> np.ndarray:
        """Weights w with sum w g(u) = int g(u) exp(-|u|^2) d^{2n}u / pi^n."""
        _, w = gauss_hermite(self.nodes)
        grids = np.meshgrid(*([w] * self.dimension), indexing="ij")
        out = np.ones(grids[0].size)
        for g in grids:
            out = out * g.reshape(-1)
        return out / np.pi**self.mode_count

    def lebesgue_weights(self) -> np.ndarray:
        """Weights for int g(alpha) d^{2n}alpha (Lebesgue measure on C^n)."""
        lw = _log_weights(self.nodes)
        grids = np.meshgrid(*([lw] * self.dimension), indexing="ij")
        total = np.zeros(grids[0].size)
        for g in grids:
            total = total + g.reshape(-1)
        return np.exp(total) * self.scale ** self.dimension

    def integrate(self, func: Callable[[np.ndarray], np.ndarray]) -> complex:
        """int func(alpha) d^{2n}alpha; ``func`` maps (P, n) points to (P,) values."""
        values = np.asarray(func(self.points()))
        return complex(np.sum(self.lebesgue_weights() * values))

    def integrate_with_error(self, func: Callable[[np.ndarray], np.ndarray]) -> tuple[complex, float]:
        """Value plus a difference-of-rules error estimate against a 3/4-size grid."""
        value = self.integrate(func)
        coarse = self.with_nodes(max(1, (3 * self.nodes) // 4)).integrate(func)
        return value, abs(value - coarse)


def line_rule(nodes: int, center: float, scale: float) -> tuple[np.ndarray, np.ndarray]:
    """Points and Lebesgue weights on the real line, x = center + scale * t."""
    t, _ = gauss_hermite(nodes)
    return center + scale * t, np.exp(_log_weights(nodes)) * scale
