"""Commutative polynomial phase-space observables.

A :class:`PhaseSymbol` is stored in complex amplitudes, one pair
(alpha_m, conj(alpha_m)) per mode, with

    x_m = sqrt(2 hbar) Re alpha_m,    p_m = sqrt(2 hbar) Im alpha_m.

With s = sqrt(hbar/2) this reads x = s (alpha + abar), p = -i s (alpha - abar).
The ladder commutator used everywhere else in the package is [a, a^dagger] = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .coeff import Coeff, HBAR, I, ONE, S, ZERO, coeff_pieces, join_signed
from .errors import DegreeCapError, ModeMismatchError, UnknownVariableError
from .grammar import Algebra, Var, evaluate_ast, parse_ast

DEFAULT_DEGREE_CAP = 16
# Length scale of the (x, p) -> complex-variable map; fixed, documentation only.
LENGTH_SCALE = 1

Key = tuple  # tuple of per-mode (j, k) exponent pairs


class Convention(str, Enum):
    XP = "xp"
    ALPHA = "alpha"
    PAPER_Z = "paperZ"


def _add_into(acc: dict, key, c: Coeff) -> None:
    total = acc.get(key, ZERO) + c
    if total.is_zero():
        acc.pop(key, None)
    else:
        acc[key] = total


@dataclass(frozen=True, eq=False)
class PhaseSymbol:
    """sum over keys of coeff * prod_m alpha_m**j_m * conj(alpha_m)**k_m."""

    mode_count: int
    _terms: Mapping[Key, Coeff] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode_count < 1:
            raise ValueError("mode_count must be positive")
        clean = {}
        for key, c in dict(self._terms).items():
            key = tuple((int(j), int(k)) for j, k in key)
            if len(key) != self.mode_count:
                raise ModeMismatchError(f"term {key} does not have {self.mode_count} modes")
            c = Coeff.coerce(c)
            if not c.is_zero():
                clean[key] = c
        object.__setattr__(self, "_terms", clean)

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c, mode_count: int = 1) -> "PhaseSymbol":
        return cls(mode_count, {((0, 0),) * mode_count: Coeff.coerce(c)})

    @classmethod
    def monomial(cls, exps: Sequence[tuple[int, int]], c=ONE) -> "PhaseSymbol":
        return cls(len(exps), {tuple(exps): Coeff.coerce(c)})

    @classmethod
    def alpha(cls, mode: int = 1, mode_count: int = 1) -> "PhaseSymbol":
        return cls.monomial(_unit(mode, mode_count, (1, 0)))

    @classmethod
    def alpha_bar(cls, mode: int = 1, mode_count: int = 1) -> "PhaseSymbol":
        return cls.monomial(_unit(mode, mode_count, (0, 1)))

    @classmethod
    def x(cls, mode: int = 1, mode_count: int = 1) -> "PhaseSymbol":
        return (cls.alpha(mode, mode_count) + cls.alpha_bar(mode, mode_count)) * S

    @classmethod
    def p(cls, mode: int = 1, mode_count: int = 1) -> "PhaseSymbol":
        return (cls.alpha(mode, mode_count) - cls.alpha_bar(mode, mode_count)) * (-(I * S))

    @classmethod
    def from_xp(cls, terms: Mapping[Key, Coeff], mode_count: int) -> "PhaseSymbol":
        """Build from x**a p**b monomials keyed by per-mode (a, b) pairs."""
        out = cls.zero(mode_count)
        for key, c in terms.items():
            term = cls.constant(c, mode_count)
            for m, (a, b) in enumerate(key, start=1):
                term = term * cls.x(m, mode_count) ** a * cls.p(m, mode_count) ** b
            out = out + term
        return out

    @classmethod
    def zero(cls, mode_count: int = 1) -> "PhaseSymbol":
        return cls(mode_count, {})

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[Key, Coeff]:
        return dict(self._terms)

    def coeff(self, key: Key) -> Coeff:
        return self._terms.get(tuple(tuple(p) for p in key), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(j + k for j, k in key) for key in self._terms), default=0)

    def mode_degree(self) -> int:
        """Largest per-mode total degree j_m + k_m over all terms."""
        return max((j + k for key in self._terms for j, k in key), default=0)

    def is_real(self) -> bool:
        for key, c in self._terms.items():
            swapped = tuple((k, j) for j, k in key)
            if self.coeff(swapped) != c.conjugate():
                return False
        return True

    def as_constant(self) -> Coeff | None:
        if all(all(j == 0 and k == 0 for j, k in key) for key in self._terms):
            return self.coeff(((0, 0),) * self.mode_count)
        return None

    # -- algebra ----------------------------------------------------------
    def _same_modes(self, other: "PhaseSymbol") -> None:
        if self.mode_count != other.mode_count:
            raise ModeMismatchError(f"mode counts differ: {self.mode_count} vs {other.mode_count}")

    def _lift(self, other) -> "PhaseSymbol":
        if isinstance(other, PhaseSymbol):
            self._same_modes(other)
            return other
        return PhaseSymbol.constant(Coeff.coerce(other), self.mode_count)

    def __add__(self, other) -> "PhaseSymbol":
        other = self._lift(other)
        acc = dict(self._terms)
        for key, c in other._terms.items():
            _add_into(acc, key, c)
        return PhaseSymbol(self.mode_count, acc)

    __radd__ = __add__

    def __neg__(self) -> "PhaseSymbol":
        return PhaseSymbol(self.mode_count, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "PhaseSymbol":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "PhaseSymbol":
        return self._lift(other) - self

    def __mul__(self, other) -> "PhaseSymbol":
        if not isinstance(other, PhaseSymbol):
            c = Coeff.coerce(other)
            return PhaseSymbol(self.mode_count, {k: v * c for k, v in self._terms.items()})
        self._same_modes(other)
        acc: dict = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                key = tuple((a + c, b + d) for (a, b), (c, d) in zip(k1, k2))
                _add_into(acc, key, c1 * c2)
        return PhaseSymbol(self.mode_count, acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "PhaseSymbol":
        if n < 0:
            raise ValueError("negative powers of symbols are not polynomial")
        out = PhaseSymbol.constant(ONE, self.mode_count)
        for _ in range(n):
            out = out * self
        return out

    def conjugate(self) -> "PhaseSymbol":
        return PhaseSymbol(
            self.mode_count,
            {tuple((k, j) for j, k in key): c.conjugate() for key, c in self._terms.items()},
        )

    def d_alpha(self, mode: int) -> "PhaseSymbol":
        return self._derivative(mode, 0)

    def d_alpha_bar(self, mode: int) -> "PhaseSymbol":
        return self._derivative(mode, 1)

    def _derivative(self, mode: int, slot: int) -> "PhaseSymbol":
        m = mode - 1
        acc: dict = {}
        for key, c in self._terms.items():
            e = key[m][slot]
            if e == 0:
                continue
            pair = list(key[m])
            pair[slot] -= 1
            new = key[:m] + (tuple(pair),) + key[m + 1:]
            _add_into(acc, new, c * e)
        return PhaseSymbol(self.mode_count, acc)

    def laplacian(self) -> "PhaseSymbol":
        """sum_m d^2 / (d alpha_m d abar_m)."""
        out = PhaseSymbol.zero(self.mode_count)
        for m in range(1, self.mode_count + 1):
            out = out + self.d_alpha(m).d_alpha_bar(m)
        return out

    # -- x/p form -----------------------------------------------------------
    def xp_terms(self) -> dict[Key, Coeff]:
        """Expand into x**a p**b monomials; keys are per-mode (a, b) pairs."""
        acc: dict = {}
        for key, c in self._terms.items():
            per_mode = [_alpha_monomial_in_xp(j, k) for j, k in key]
            for combo in product(*(d.items() for d in per_mode)):
                new_key = tuple(k for k, _ in combo)
                total = c
                for _, v in combo:
                    total = total * v
                _add_into(acc, new_key, total)
        return acc

    # -- equality / printing --------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Coeff)):
            other = PhaseSymbol.constant(other, self.mode_count)
        if not isinstance(other, PhaseSymbol):
            return NotImplemented
        return self.mode_count == other.mode_count and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.mode_count, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"PhaseSymbol({format_symbol(self)!r})"

    def __str__(self) -> str:
        return format_symbol(self)


def _unit(mode: int, mode_count: int, pair: tuple[int, int]) -> tuple:
    if not 1 <= mode <= mode_count:
        raise ModeMismatchError(f"mode {mode} outside 1..{mode_count}")
    return tuple(pair if m == mode else (0, 0) for m in range(1, mode_count + 1))


_XP_CACHE: dict[tuple[int, int], dict] = {}


def _alpha_monomial_in_xp(j: int, k: int) -> dict[tuple[int, int], Coeff]:
    """alpha**j abar**k with alpha = (x + i p)/(2s), abar = (x - i p)/(2s)."""
    hit = _XP_CACHE.get((j, k))
    if hit is not None:
        return hit
    out: dict = {}
    scale = Coeff.rational(Fraction(1, 2 ** (j + k)), 0, -(j + k))
    for r in range(j + 1):
        for t in range(k + 1):
            # (x + ip)^j: C(j,r) x^(j-r) (ip)^r ; (x - ip)^k: C(k,t) x^(k-t) (-ip)^t
            ipow = (r + t) % 4
            sign = -1 if t % 2 else 1
            unit = [(1, 0), (0, 1), (-1, 0), (0, -1)][ipow]
            mag = math.comb(j, r) * math.comb(k, t) * sign
            c = Coeff.rational(unit[0] * mag, unit[1] * mag) * scale
            _add_into(out, (j - r + k - t, r + t), c)
    _XP_CACHE[(j, k)] = out
    return out


# -- parsing ------------------------------------------------------------------

class _SymbolAlgebra(Algebra):
    def __init__(self, mode_count: int, convention: Convention, degree_cap: int):
        self.mode_count = mode_count
        self.convention = convention
        self.degree_cap = degree_cap

    def const(self, c: Coeff) -> PhaseSymbol:
        return PhaseSymbol.constant(c, self.mode_count)

    def as_constant(self, value: PhaseSymbol) -> Coeff | None:
        return value.as_constant()

    def var(self, node: Var) -> PhaseSymbol:
        if node.index > self.mode_count:
            raise UnknownVariableError(
                f"variable {node.name}{node.index} exceeds mode count {self.mode_count}", node.pos
            )
        m, n = node.index, self.mode_count
        name = node.name
        if name == "x":
            return PhaseSymbol.x(m, n)
        if name == "p":
            return PhaseSymbol.p(m, n)
        if name == "a":
            return PhaseSymbol.alpha(m, n)
        if name == "abar":
            return PhaseSymbol.alpha_bar(m, n)
        if name in ("z", "zbar"):
            if self.convention is Convention.PAPER_Z:
                # alpha = conj(z)
                return PhaseSymbol.alpha_bar(m, n) if name == "z" else PhaseSymbol.alpha(m, n)
            if self.convention is Convention.ALPHA:
                return PhaseSymbol.alpha(m, n) if name == "z" else PhaseSymbol.alpha_bar(m, n)
            raise UnknownVariableError(
                f"variable {name!r} needs the 'alpha' or 'paperZ' convention", node.pos
            )
        raise UnknownVariableError(f"unknown variable {name!r}", node.pos)

    def check(self, value: PhaseSymbol, pos: int) -> None:
        if value.mode_degree() > self.degree_cap:
            raise DegreeCapError(
                f"degree {value.mode_degree()} exceeds the cap {self.degree_cap}", self.degree_cap, pos
            )

    def pow_precheck(self, value: PhaseSymbol, exponent: int, pos: int) -> None:
        if value.mode_degree() * exponent > self.degree_cap:
            raise DegreeCapError(
                f"degree {value.mode_degree() * exponent} exceeds the cap {self.degree_cap}",
                self.degree_cap,
                pos,
            )


def parse_symbol(
    text: str,
    mode_count: int = 1,
    convention: Convention | str = Convention.XP,
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> PhaseSymbol:
    """Parse an expression into canonical alpha-form.

    ``x``/``p`` and ``a``/``abar`` (alpha and its conjugate) are always
    available. ``z``/``zbar`` mean alpha/abar under the ``alpha`` convention and
    abar/alpha under ``paperZ`` (where alpha = conj(z)); they are rejected under
    ``xp``.
    """
    convention = Convention(convention)
    algebra = _SymbolAlgebra(mode_count, convention, degree_cap)
    return evaluate_ast(parse_ast(text), algebra)


# -- printing -----------------------------------------------------------------

def _var_name(base: str, mode: int, mode_count: int) -> str:
    return base if mode_count == 1 else f"{base}{mode}"


def _power(name: str, e: int) -> str:
    return name if e == 1 else f"{name}^{e}"


def _render_terms(terms: Mapping[Key, Coeff], names: tuple[str, str], mode_count: int) -> str:
    pieces: list[tuple[int, str]] = []
    for key in sorted(terms, reverse=True):
        factors = []
        for m, (e1, e2) in enumerate(key, start=1):
            if e1:
                factors.append(_power(_var_name(names[0], m, mode_count), e1))
            if e2:
                factors.append(_power(_var_name(names[1], m, mode_count), e2))
        mono = "*".join(factors)
        cp = coeff_pieces(terms[key])
        if not mono:
            pieces.extend(cp)
            continue
        if len(cp) == 1:
            sign, body = cp[0]
            pieces.append((sign, mono if body == "1" else _attach(body, mono)))
        else:
            pieces.append((1, f"({join_signed(cp)})*{mono}"))
    return join_signed(pieces)


def _attach(coeff_body: str, mono: str) -> str:
    # "hbar/2" * "x^2" must read back as (hbar/2)*x^2, which left-associativity gives.
    return f"{coeff_body}*{mono}"


def _even_powers(terms: Mapping[Key, Coeff]) -> bool:
    return all(k % 2 == 0 for c in terms.values() for k in c.terms)


def format_symbol(f: PhaseSymbol, form: str = "auto") -> str:
    """Deterministic text in the parser's grammar.

    ``form`` is ``"xp"``, ``"alpha"`` or ``"auto"`` (x/p when every coefficient
    is a rational multiple of an integer power of hbar, alpha otherwise).
    """
    if f.is_zero():
        return "0"
    if form == "auto":
        xp = f.xp_terms()
        if _even_powers(xp):
            return _render_terms(xp, ("x", "p"), f.mode_count)
        return _render_terms(f.terms, ("a", "abar"), f.mode_count)
    if form == "xp":
        return _render_terms(f.xp_terms(), ("x", "p"), f.mode_count)
    if form == "alpha":
        return _render_terms(f.terms, ("a", "abar"), f.mode_count)
    raise ValueError(f"unknown form {form!r}")


# -- calculus and integration -----------------------------------------------------

def poisson_bracket(f: PhaseSymbol, g: PhaseSymbol) -> PhaseSymbol:
    """sum_m (df/dx_m dg/dp_m - df/dp_m dg/dx_m).

    In amplitudes this is (i/hbar) sum_m (df/dabar dg/dalpha - df/dalpha dg/dabar).
    """
    f._same_modes(g)
    acc = PhaseSymbol.zero(f.mode_count)
    for m in range(1, f.mode_count + 1):
        acc = acc + f.d_alpha_bar(m) * g.d_alpha(m) - f.d_alpha(m) * g.d_alpha_bar(m)
    return acc * (I / HBAR)


def gaussian_moment(j: int, k: int) -> int:
    """int alpha^j abar^k exp(-|alpha|^2) d^2alpha / pi."""
    return math.factorial(j) if j == k else 0


def gaussian_moment_exact(f: PhaseSymbol) -> Coeff:
    total = ZERO
    for key, c in f.terms.items():
        w = 1
        for j, k in key:
            w *= gaussian_moment(j, k)
            if not w:
                break
        if w:
            total = total + c * w
    return total


def gaussian_moment_integral(f: PhaseSymbol, hbar: float) -> complex:
    """Integral of f against the unit-mass Gaussian exp(-|alpha|^2)/pi^n."""
    return gaussian_moment_exact(f).evaluate(hbar)


def evaluate_symbol(f: PhaseSymbol, point: Sequence[complex], hbar: float) -> complex:
    point = np.asarray(point, dtype=complex).reshape(-1)
    if point.size != f.mode_count:
        raise ModeMismatchError(f"point has {point.size} entries, symbol has {f.mode_count} modes")
    total = 0j
    for key, c in f.terms.items():
        v = c.evaluate(hbar)
        for (j, k), a in zip(key, point):
            v *= a**j * np.conj(a) ** k
        total += v
    return complex(total)


def evaluate_symbol_grid(f: PhaseSymbol, points: np.ndarray, hbar: float) -> np.ndarray:
    """Vectorised evaluation; ``points`` has shape (..., mode_count)."""
    points = np.asarray(points, dtype=complex)
    if points.shape[-1] != f.mode_count:
        raise ModeMismatchError("last axis of points must equal the mode count")
    out = np.zeros(points.shape[:-1], dtype=complex)
    conj = np.conj(points)
    for key, c in f.terms.items():
        v = np.full(points.shape[:-1], c.evaluate(hbar))
        for m, (j, k) in enumerate(key):
            if j:
                v = v * points[..., m] ** j
            if k:
                v = v * conj[..., m] ** k
        out += v
    return out


@dataclass(frozen=True)
class GaussianMeasure:
    """The Segal-Bargmann weight exp(-|z|^2/hbar) / (pi hbar)^n on C^n."""

    hbar: float
    mode_count: int = 1

    def __post_init__(self):
        if self.hbar <= 0 or self.mode_count < 1:
            raise ValueError("hbar and mode_count must be positive")

    def density(self, z: Iterable[complex] | np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        r2 = np.sum(np.abs(z) ** 2, axis=-1)
        return np.exp(-r2 / self.hbar) / (np.pi * self.hbar) ** self.mode_count

    def total_mass(self) -> complex:
        # z = sqrt(hbar) * alpha turns the measure into exp(-|alpha|^2)/pi^n.
        return gaussian_moment_integral(PhaseSymbol.constant(1, self.mode_count), self.hbar)
