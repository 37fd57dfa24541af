"""Noncommutative polynomials in bosonic ladder operators, [a, a^dagger] = 1.

Expressions are kept in normal order: each term is c * prod_m (a_m^dagger)^m a_m^n,
keyed by per-mode (m, n) pairs. Products are reduced with

    a^n (a^dagger)^p = sum_k C(n,k) C(p,k) k! (a^dagger)^(p-k) a^(n-k).

Matrix realisations act on span{|0>, ..., |N-1>} per mode with row-major
(mode 1 slowest) tensor ordering.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .coeff import Coeff, I, ONE, S, ZERO, coeff_pieces, join_signed
from .errors import DegreeCapError, ModeMismatchError, TruncationWarning, UnknownVariableError
from .grammar import Algebra, Var, evaluate_ast, parse_ast

Key = tuple  # per-mode (creation power, annihilation power)


@lru_cache(maxsize=None)
def _reorder(n: int, p: int) -> tuple[tuple[int, int, int], ...]:
    """a^n (a^dagger)^p as ((coeff, creation, annihilation), ...) in normal order."""
    return tuple(
        (math.comb(n, k) * math.comb(p, k) * math.factorial(k), p - k, n - k)
        for k in range(min(n, p) + 1)
    )


def _add_into(acc: dict, key, c: Coeff) -> None:
    total = acc.get(key, ZERO) + c
    if total.is_zero():
        acc.pop(key, None)
    else:
        acc[key] = total


@dataclass(frozen=True, eq=False)
class LadderExpr:
    mode_count: int
    _terms: Mapping[Key, Coeff] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode_count < 1:
            raise ValueError("mode_count must be positive")
        clean = {}
        for key, c in dict(self._terms).items():
            key = tuple((int(m), int(n)) for m, n in key)
            if len(key) != self.mode_count:
                raise ModeMismatchError(f"term {key} does not have {self.mode_count} modes")
            c = Coeff.coerce(c)
            if not c.is_zero():
                clean[key] = c
        object.__setattr__(self, "_terms", clean)

    @classmethod
    def identity(cls, mode_count: int = 1, c=ONE) -> "LadderExpr":
        return cls(mode_count, {((0, 0),) * mode_count: Coeff.coerce(c)})

    @classmethod
    def zero(cls, mode_count: int = 1) -> "LadderExpr":
        return cls(mode_count, {})

    @classmethod
    def annihilation(cls, mode: int = 1, mode_count: int = 1) -> "LadderExpr":
        return cls(mode_count, {_unit(mode, mode_count, (0, 1)): ONE})

    @classmethod
    def creation(cls, mode: int = 1, mode_count: int = 1) -> "LadderExpr":
        return cls(mode_count, {_unit(mode, mode_count, (1, 0)): ONE})

    @classmethod
    def position(cls, mode: int = 1, mode_count: int = 1) -> "LadderExpr":
        """X = sqrt(hbar/2) (a + a^dagger)."""
        return (cls.annihilation(mode, mode_count) + cls.creation(mode, mode_count)) * S

    @classmethod
    def momentum(cls, mode: int = 1, mode_count: int = 1) -> "LadderExpr":
        """P = i sqrt(hbar/2) (a^dagger - a)."""
        return (cls.creation(mode, mode_count) - cls.annihilation(mode, mode_count)) * (I * S)

    @classmethod
    def number(cls, mode: int = 1, mode_count: int = 1) -> "LadderExpr":
        return cls(mode_count, {_unit(mode, mode_count, (1, 1)): ONE})

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[Key, Coeff]:
        return dict(self._terms)

    def coeff(self, key: Key) -> Coeff:
        return self._terms.get(tuple(tuple(p) for p in key), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(m + n for m, n in key) for key in self._terms), default=0)

    def mode_degree(self) -> int:
        return max((m + n for key in self._terms for m, n in key), default=0)

    def adjoint(self) -> "LadderExpr":
        return LadderExpr(
            self.mode_count,
            {tuple((n, m) for m, n in key): c.conjugate() for key, c in self._terms.items()},
        )

    def is_self_adjoint(self) -> bool:
        return self == self.adjoint()

    def as_constant(self) -> Coeff | None:
        if all(all(m == 0 and n == 0 for m, n in key) for key in self._terms):
            return self.coeff(((0, 0),) * self.mode_count)
        return None

    # -- algebra ----------------------------------------------------------
    def _same_modes(self, other: "LadderExpr") -> None:
        if self.mode_count != other.mode_count:
            raise ModeMismatchError(f"mode counts differ: {self.mode_count} vs {other.mode_count}")

    def _lift(self, other) -> "LadderExpr":
        if isinstance(other, LadderExpr):
            self._same_modes(other)
            return other
        return LadderExpr.identity(self.mode_count, Coeff.coerce(other))

    def __add__(self, other) -> "LadderExpr":
        other = self._lift(other)
        acc = dict(self._terms)
        for key, c in other._terms.items():
            _add_into(acc, key, c)
        return LadderExpr(self.mode_count, acc)

    __radd__ = __add__

    def __neg__(self) -> "LadderExpr":
        return LadderExpr(self.mode_count, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "LadderExpr":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "LadderExpr":
        return self._lift(other) - self

    def __mul__(self, other) -> "LadderExpr":
        if not isinstance(other, LadderExpr):
            c = Coeff.coerce(other)
            return LadderExpr(self.mode_count, {k: v * c for k, v in self._terms.items()})
        self._same_modes(other)
        acc: dict = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                per_mode = [
                    [(w, m1 + cr, an + n2) for w, cr, an in _reorder(n1, m2)]
                    for (m1, n1), (m2, n2) in zip(k1, k2)
                ]
                c = c1 * c2
                for combo in product(*per_mode):
                    w = 1
                    for part in combo:
                        w *= part[0]
                    _add_into(acc, tuple((cr, an) for _, cr, an in combo), c * w)
        return LadderExpr(self.mode_count, acc)

    def __rmul__(self, other) -> "LadderExpr":
        # scalars commute with everything
        return self * other

    def __pow__(self, n: int) -> "LadderExpr":
        if n < 0:
            raise ValueError("negative powers are not polynomial")
        out = LadderExpr.identity(self.mode_count)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Coeff)):
            other = LadderExpr.identity(self.mode_count, other)
        if not isinstance(other, LadderExpr):
            return NotImplemented
        return self.mode_count == other.mode_count and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.mode_count, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"LadderExpr({format_ladder(self)!r})"

    def __str__(self) -> str:
        return format_ladder(self)


def _unit(mode: int, mode_count: int, pair: tuple[int, int]) -> tuple:
    if not 1 <= mode <= mode_count:
        raise ModeMismatchError(f"mode {mode} outside 1..{mode_count}")
    return tuple(pair if m == mode else (0, 0) for m in range(1, mode_count + 1))


def embed(expr: LadderExpr, mode: int, mode_count: int) -> LadderExpr:
    """Place a single-mode expression on ``mode`` of a larger system."""
    if expr.mode_count != 1:
        raise ModeMismatchError("embed expects a single-mode expression")
    return LadderExpr(
        mode_count,
        {_unit(mode, mode_count, key[0]): c for key, c in expr.terms.items()},
    )


# -- ordering transforms ---------------------------------------------------------

Word = Sequence[tuple[str, int]]  # e.g. [("a", 1), ("ad", 1)]


def normal_order(words: Iterable[tuple[object, Word]], mode_count: int = 1) -> LadderExpr:
    """Reduce a sum of coefficient-weighted ladder words to normal order."""
    total = LadderExpr.zero(mode_count)
    for c, word in words:
        term = LadderExpr.identity(mode_count, Coeff.coerce(c))
        for kind, mode in word:
            if kind in ("ad", "adag", "create"):
                term = term * LadderExpr.creation(mode, mode_count)
            elif kind in ("a", "annihilate"):
                term = term * LadderExpr.annihilation(mode, mode_count)
            else:
                raise ValueError(f"unknown ladder letter {kind!r}")
        total = total + term
    return total


def antinormal_order_form(expr: LadderExpr) -> dict[Key, Coeff]:
    """Coefficients d with expr = sum d * prod_m a_m^j (a_m^dagger)^k, keyed by (j, k).

    Uses (a^dagger)^m a^n = sum_r (-1)^r C(m,r) C(n,r) r! a^(n-r) (a^dagger)^(m-r).
    """
    acc: dict = {}
    for key, c in expr.terms.items():
        per_mode = [
            [
                ((-1) ** r * math.comb(m, r) * math.comb(n, r) * math.factorial(r), n - r, m - r)
                for r in range(min(m, n) + 1)
            ]
            for m, n in key
        ]
        for combo in product(*per_mode):
            w = 1
            for part in combo:
                w *= part[0]
            _add_into(acc, tuple((j, k) for _, j, k in combo), c * w)
    return acc


def from_antinormal(coeffs: Mapping[Key, Coeff], mode_count: int) -> LadderExpr:
    """Normal-order sum d * prod_m a_m^j (a_m^dagger)^k."""
    acc: dict = {}
    for key, c in coeffs.items():
        per_mode = [[(w, cr, an) for w, cr, an in _reorder(j, k)] for j, k in key]
        for combo in product(*per_mode):
            w = 1
            for part in combo:
                w *= part[0]
            _add_into(acc, tuple((cr, an) for _, cr, an in combo), Coeff.coerce(c) * w)
    return LadderExpr(mode_count, acc)


def commutator(a: LadderExpr, b: LadderExpr) -> LadderExpr:
    a._same_modes(b)
    return a * b - b * a


# -- parsing and printing ----------------------------------------------------------

class _LadderAlgebra(Algebra):
    def __init__(self, mode_count: int, degree_cap: int | None):
        self.mode_count = mode_count
        self.degree_cap = degree_cap

    def const(self, c: Coeff) -> LadderExpr:
        return LadderExpr.identity(self.mode_count, c)

    def as_constant(self, value: LadderExpr) -> Coeff | None:
        return value.as_constant()

    def var(self, node: Var) -> LadderExpr:
        if node.index > self.mode_count:
            raise UnknownVariableError(
                f"operator {node.name}{node.index} exceeds mode count {self.mode_count}", node.pos
            )
        makers = {
            "a": LadderExpr.annihilation,
            "ad": LadderExpr.creation,
            "X": LadderExpr.position,
            "P": LadderExpr.momentum,
            "N": LadderExpr.number,
        }
        if node.name not in makers:
            raise UnknownVariableError(f"unknown operator {node.name!r}", node.pos)
        return makers[node.name](node.index, self.mode_count)

    def check(self, value: LadderExpr, pos: int) -> None:
        if self.degree_cap is not None and value.mode_degree() > self.degree_cap:
            raise DegreeCapError(
                f"degree {value.mode_degree()} exceeds the cap {self.degree_cap}", self.degree_cap, pos
            )


def parse_ladder(text: str, mode_count: int = 1, degree_cap: int | None = None) -> LadderExpr:
    """Parse operator text (tokens ``a``, ``ad``, ``X``, ``P``, ``N``); products are ordered."""
    return evaluate_ast(parse_ast(text), _LadderAlgebra(mode_count, degree_cap))


def _power(name: str, e: int) -> str:
    return name if e == 1 else f"{name}^{e}"


def format_ladder(expr: LadderExpr) -> str:
    if expr.is_zero():
        return "0"
    pieces: list[tuple[int, str]] = []
    n = expr.mode_count
    for key in sorted(expr.terms, reverse=True):
        factors = []
        for mode, (m, k) in enumerate(key, start=1):
            suffix = "" if n == 1 else str(mode)
            if m:
                factors.append(_power("ad" + suffix, m))
            if k:
                factors.append(_power("a" + suffix, k))
        mono = "*".join(factors)
        cp = coeff_pieces(expr.terms[key])
        if not mono:
            pieces.extend(cp)
        elif len(cp) == 1:
            sign, body = cp[0]
            pieces.append((sign, mono if body == "1" else f"{body}*{mono}"))
        else:
            pieces.append((1, f"({join_signed(cp)})*{mono}"))
    return join_signed(pieces)


def format_antinormal(coeffs: Mapping[Key, Coeff], mode_count: int) -> str:
    """Render anti-normal coefficients as a^j*ad^k products."""
    pieces: list[tuple[int, str]] = []
    for key in sorted(coeffs, reverse=True):
        factors = []
        for mode, (j, k) in enumerate(key, start=1):
            suffix = "" if mode_count == 1 else str(mode)
            if j:
                factors.append(_power("a" + suffix, j))
            if k:
                factors.append(_power("ad" + suffix, k))
        mono = "*".join(factors)
        cp = coeff_pieces(coeffs[key])
        if not mono:
            pieces.extend(cp)
        elif len(cp) == 1:
            sign, body = cp[0]
            pieces.append((sign, mono if body == "1" else f"{body}*{mono}"))
        else:
            pieces.append((1, f"({join_signed(cp)})*{mono}"))
    return join_signed(pieces)


# -- matrices ------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    cutoffs: tuple[int, ...]
    hbar: float
    truncation_warning: str | None = None

    @property
    def dim(self) -> int:
        return int(np.prod(self.cutoffs))

    def protected_block(self, margin: int) -> np.ndarray:
        """Sub-block on multi-indices with every level below cutoff - margin."""
        idx = protected_indices(self.cutoffs, margin)
        return self.entries[np.ix_(idx, idx)]


def protected_indices(cutoffs: Sequence[int], margin: int) -> np.ndarray:
    grids = np.meshgrid(*[np.arange(c) for c in cutoffs], indexing="ij")
    ok = np.ones(grids[0].shape, dtype=bool)
    for g, c in zip(grids, cutoffs):
        ok &= g < c - margin
    return np.flatnonzero(ok.reshape(-1))


def _falling(top: int, count: int) -> int:
    out = 1
    for v in range(top - count + 1, top + 1):
        out *= v
    return out


@lru_cache(maxsize=4096)
def ladder_monomial_matrix(m: int, n: int, cutoff: int) -> np.ndarray:
    """Exact matrix of (a^dagger)^m a^n compressed to the first ``cutoff`` levels."""
    out = np.zeros((cutoff, cutoff))
    for level in range(n, cutoff):
        target = level - n + m
        if target >= cutoff:
            continue
        # sqrt(l!/(l-n)! * (l-n+m)!/(l-n)!), symmetric under (m, n) swap
        out[target, level] = math.sqrt(_falling(level, n) * _falling(target, m))
    out.setflags(write=False)
    return out


def _normalize_cutoffs(cutoff, mode_count: int) -> tuple[int, ...]:
    if isinstance(cutoff, int):
        cutoffs = (cutoff,) * mode_count
    else:
        cutoffs = tuple(int(c) for c in cutoff)
    if len(cutoffs) != mode_count:
        raise ModeMismatchError(f"need {mode_count} cutoffs, got {len(cutoffs)}")
    if any(c < 1 for c in cutoffs):
        raise ValueError("cutoff must be at least 1")
    return cutoffs


def _adjoint_stable_key(key: Key) -> tuple:
    return tuple((min(m, n), max(m, n), m) for m, n in key)


def to_matrix(expr: LadderExpr, cutoff, hbar: float) -> OperatorMatrix:
    cutoffs = _normalize_cutoffs(cutoff, expr.mode_count)
    dim = int(np.prod(cutoffs))
    out = np.zeros((dim, dim), dtype=complex)
    dropped = []
    for key in sorted(expr.terms, key=_adjoint_stable_key):
        c = expr.terms[key].evaluate(hbar)
        mats = [ladder_monomial_matrix(m, n, N) for (m, n), N in zip(key, cutoffs)]
        if any(max(m, n) >= N for (m, n), N in zip(key, cutoffs)):
            dropped.append(key)
        block = mats[0]
        for mat in mats[1:]:
            block = np.kron(block, mat)
        out += c * block
    message = None
    if dropped:
        message = (
            f"{len(dropped)} term(s) have degree >= cutoff {cutoffs} and act trivially "
            "on the truncated space"
        )
        warnings.warn(message, TruncationWarning, stacklevel=2)
    out.setflags(write=False)
    return OperatorMatrix(out, cutoffs, float(hbar), message)
