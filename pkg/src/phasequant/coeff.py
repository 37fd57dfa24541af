"""Exact scalar coefficients: Laurent polynomials in s = sqrt(hbar/2) over Q(i).

The generator is chosen as sqrt(hbar/2) rather than sqrt(hbar) so that the
position and momentum substitutions x = s*(alpha + conj(alpha)) and
p = -i*s*(alpha - conj(alpha)) are exact without introducing sqrt(2).
hbar itself is 2*s**2.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

RationalLike = Union[int, Fraction]

_ZERO = Fraction(0)


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


class Coeff:
    """Immutable element sum_k (re_k + i*im_k) * s**k with rational re_k, im_k."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, tuple] | None = None):
        clean = {}
        if terms:
            for k, (re, im) in terms.items():
                re, im = _frac(re), _frac(im)
                if re or im:
                    clean[int(k)] = (re, im)
        self._terms = clean
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def rational(cls, re: RationalLike = 0, im: RationalLike = 0, power: int = 0) -> "Coeff":
        return cls({power: (re, im)})

    @classmethod
    def coerce(cls, value) -> "Coeff":
        if isinstance(value, Coeff):
            return value
        if isinstance(value, (int, Fraction)):
            return cls({0: (value, 0)})
        raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[int, tuple[Fraction, Fraction]]:
        return dict(self._terms)

    def powers(self) -> list[int]:
        return sorted(self._terms)

    def min_power(self) -> int:
        if not self._terms:
            raise ValueError("zero has no powers")
        return min(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_real(self) -> bool:
        return all(im == 0 for _, im in self._terms.values())

    def constant(self) -> tuple[Fraction, Fraction] | None:
        """The pair (re, im) when this is a pure rational, else None."""
        if not self._terms:
            return (_ZERO, _ZERO)
        if set(self._terms) == {0}:
            return self._terms[0]
        return None

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other) -> "Coeff":
        other = Coeff.coerce(other)
        out = dict(self._terms)
        for k, (re, im) in other._terms.items():
            r0, i0 = out.get(k, (_ZERO, _ZERO))
            out[k] = (r0 + re, i0 + im)
        return Coeff(out)

    __radd__ = __add__

    def __neg__(self) -> "Coeff":
        return Coeff({k: (-re, -im) for k, (re, im) in self._terms.items()})

    def __sub__(self, other) -> "Coeff":
        return self + (-Coeff.coerce(other))

    def __rsub__(self, other) -> "Coeff":
        return Coeff.coerce(other) - self

    def __mul__(self, other) -> "Coeff":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Coeff()
            f = Fraction(other)
            return Coeff({k: (re * f, im * f) for k, (re, im) in self._terms.items()})
        other = Coeff.coerce(other)
        out: dict[int, tuple] = {}
        for k1, (a, b) in self._terms.items():
            for k2, (c, d) in other._terms.items():
                k = k1 + k2
                r0, i0 = out.get(k, (_ZERO, _ZERO))
                out[k] = (r0 + a * c - b * d, i0 + a * d + b * c)
        return Coeff(out)

    __rmul__ = __mul__

    def inverse(self) -> "Coeff":
        """Multiplicative inverse; only single-power elements are units."""
        if not self.is_monomial():
            raise ZeroDivisionError(f"{self} is not invertible in the coefficient ring")
        (k, (a, b)), = self._terms.items()
        den = a * a + b * b
        return Coeff({-k: (a / den, -b / den)})

    def __truediv__(self, other) -> "Coeff":
        return self * Coeff.coerce(other).inverse()

    def __pow__(self, n: int) -> "Coeff":
        if not isinstance(n, int):
            raise TypeError("integer powers only")
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "Coeff":
        return Coeff({k: (re, -im) for k, (re, im) in self._terms.items()})

    def times_power(self, shift: int) -> "Coeff":
        return Coeff({k + shift: v for k, v in self._terms.items()})

    # -- numerics ---------------------------------------------------------
    def evaluate(self, hbar: float) -> complex:
        if hbar <= 0:
            raise ValueError("hbar must be positive")
        half = hbar / 2.0
        root = half**0.5
        total = 0j
        for k in sorted(self._terms):
            re, im = self._terms[k]
            # s^(2m) = (hbar/2)^m without a rounded square root in between
            scale = half ** (k // 2) * (root if k % 2 else 1.0)
            total += complex(float(re), float(im)) * scale
        return total

    # -- comparison -------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Coeff.coerce(other)
        if not isinstance(other, Coeff):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Coeff({format_coeff(self)})"

    def __str__(self) -> str:
        return format_coeff(self)


ZERO = Coeff()
ONE = Coeff.rational(1)
I = Coeff.rational(0, 1)
S = Coeff.rational(1, 0, 1)  # sqrt(hbar/2)
HBAR = Coeff.rational(2, 0, 2)


def coeff_sum(items: Iterable[Coeff]) -> Coeff:
    total = ZERO
    for c in items:
        total = total + c
    return total


# -- rendering in the expression grammar ------------------------------------

def _rational_str(q: Fraction) -> tuple[str, str]:
    """Numerator and denominator strings of a nonnegative rational."""
    return str(q.numerator), ("" if q.denominator == 1 else str(q.denominator))


def _piece(re: Fraction, im: Fraction, k: int) -> tuple[int, str]:
    """Render one power of s as (sign, body). Exactly one of re, im is nonzero."""
    value, imag = (im, True) if re == 0 else (re, False)
    sign = -1 if value < 0 else 1
    value = abs(value)
    half, odd = divmod(k, 2)  # s**k = (hbar/2)**half * s**odd
    value = value / Fraction(2) ** half
    num, den = _rational_str(value)
    factors = []
    if num != "1":
        factors.append(num)
    if imag:
        factors.append("i")
    if half > 0:
        factors.append("hbar" if half == 1 else f"hbar^{half}")
    if odd:
        factors.append("sqrt(hbar/2)")
    body = "*".join(factors) if factors else "1"
    divisors = []
    if den:
        divisors.append(den)
    if half < 0:
        divisors.append("hbar" if half == -1 else f"hbar^{-half}")
    for d in divisors:
        body += "/" + d
    return sign, body


def coeff_pieces(c: Coeff) -> list[tuple[int, str]]:
    pieces = []
    for k in sorted(c.terms, reverse=True):
        re, im = c.terms[k]
        if re:
            pieces.append(_piece(re, _ZERO, k))
        if im:
            pieces.append(_piece(_ZERO, im, k))
    return pieces


def join_signed(pieces: list[tuple[int, str]]) -> str:
    if not pieces:
        return "0"
    out = ("-" if pieces[0][0] < 0 else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += (" - " if sign < 0 else " + ") + body
    return out


def format_coeff(c: Coeff) -> str:
    return join_signed(coeff_pieces(c))
