"""Exact arithmetic in Q(zeta_b) plus float projection.

Rationals are :class:`fractions.Fraction`. Elements of the b-th cyclotomic
field are stored as coefficient vectors over the power basis
``1, zeta, ..., zeta**(phi(b)-1)`` after reduction modulo the b-th cyclotomic
polynomial, which makes equality a plain tuple comparison.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np

__all__ = [
    "CycloValue",
    "cyclotomic_poly",
    "cyclo_mul",
    "euler_phi",
    "mul_tensor",
    "power_table",
    "to_complex",
    "zeta_pow",
]


def _divisors(b: int) -> list[int]:
    return [d for d in range(1, b + 1) if b % d == 0]


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (low degree first), den monic."""
    num = list(num)
    dd = len(den) - 1
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    out = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        out[i - dd] = c
        if c:
            for k in range(dd + 1):
                num[i - dd + k] -= c * den[k]
    if any(num[:dd]):
        raise ArithmeticError("polynomial division left a remainder")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(b: int) -> tuple[int, ...]:
    """Coefficients of Phi_b, lowest degree first.

    Obtained by dividing ``x**b - 1`` by Phi_d for every proper divisor d.

    >>> cyclotomic_poly(6)
    (1, -1, 1)
    """
    if b < 1:
        raise ValueError(f"cyclotomic_poly needs b >= 1, got {b}")
    poly = [-1] + [0] * (b - 1) + [1]
    for d in _divisors(b)[:-1]:
        poly = _poly_divexact(poly, list(cyclotomic_poly(d)))
    return tuple(poly)


def euler_phi(b: int) -> int:
    return len(cyclotomic_poly(b)) - 1


@lru_cache(maxsize=None)
def _reduction_rows(b: int) -> tuple[tuple[int, ...], ...]:
    """Row e holds x**e mod Phi_b for e in [0, 2*phi - 2] and e in [0, b)."""
    phi_b = cyclotomic_poly(b)
    deg = len(phi_b) - 1
    top = max(2 * deg - 1, b)
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(top):
        rows.append(tuple(cur))
        # multiply by x and reduce the overflowing x**deg term
        carry = cur[-1]
        cur = [0] + cur[:-1]
        if carry:
            cur = [c - carry * p for c, p in zip(cur, phi_b[:deg])]
    return tuple(rows)


@lru_cache(maxsize=None)
def power_table(b: int) -> np.ndarray:
    """Integer array of shape (b, phi(b)); row e is zeta**e reduced."""
    rows = _reduction_rows(b)
    tab = np.array(rows[:b], dtype=np.int64)
    tab.flags.writeable = False
    return tab


@lru_cache(maxsize=None)
def mul_tensor(b: int) -> np.ndarray:
    """T[a, c, :] = reduced coefficients of zeta**a * zeta**c, a, c < phi(b)."""
    rows = _reduction_rows(b)
    deg = euler_phi(b)
    t = np.zeros((deg, deg, deg), dtype=np.int64)
    for a in range(deg):
        for c in range(deg):
            t[a, c] = rows[a + c]
    t.flags.writeable = False
    return t


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"exact value expected, got {type(x).__name__}")


class CycloValue:
    """Immutable element of Q(zeta_b) in reduced power-basis form."""

    __slots__ = ("base", "coeffs", "_hash")

    def __init__(self, base: int, coeffs):
        if base < 2:
            raise ValueError(f"base must be >= 2, got {base}")
        deg = euler_phi(base)
        cs = tuple(_as_fraction(c) for c in coeffs)
        if len(cs) != deg:
            raise ValueError(f"expected {deg} coefficients for base {base}, got {len(cs)}")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("CycloValue is immutable")

    @classmethod
    def zero(cls, base: int) -> CycloValue:
        return cls(base, [0] * euler_phi(base))

    @classmethod
    def from_rational(cls, base: int, x) -> CycloValue:
        cs = [Fraction(0)] * euler_phi(base)
        cs[0] = _as_fraction(x)
        return cls(base, cs)

    @classmethod
    def from_unreduced(cls, base: int, coeffs) -> CycloValue:
        """Build from coefficients of an arbitrary-length polynomial in zeta."""
        rows = _reduction_rows(base)
        deg = euler_phi(base)
        out = [Fraction(0)] * deg
        for e, c in enumerate(coeffs):
            if not c:
                continue
            c = _as_fraction(c)
            row = rows[e] if e < len(rows) else rows[e % base]
            for i, r in enumerate(row):
                if r:
                    out[i] += c * r
        return cls(base, out)

    def _coerce(self, other) -> CycloValue:
        if isinstance(other, CycloValue):
            if other.base != self.base:
                raise ValueError(f"base mismatch: {self.base} vs {other.base}")
            return other
        if isinstance(other, (int, Rational)):
            return CycloValue.from_rational(self.base, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycloValue(self.base, [a + c for a, c in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloValue(self.base, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycloValue(self.base, [a - c for a, c in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, CycloValue):
            f = _as_fraction(other)
            return CycloValue(self.base, [a * f for a in self.coeffs])
        if not isinstance(other, CycloValue):
            return NotImplemented
        return cyclo_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, CycloValue):
            f = _as_fraction(other)
            return CycloValue(self.base, [a / f for a in self.coeffs])
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        out = CycloValue.from_rational(self.base, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, CycloValue):
            return self.base == other.base and self.coeffs == other.coeffs
        if isinstance(other, (int, Rational)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.base, self.coeffs))
            object.__setattr__(self, "_hash", h)
        return h

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def conjugate(self) -> CycloValue:
        b = self.base
        return CycloValue.from_unreduced(
            b, _scatter({(-k) % b: c for k, c in enumerate(self.coeffs)}, b)
        )

    def abs2(self) -> CycloValue:
        """|x|**2 as an exact element (lies in the real subfield)."""
        return self * self.conjugate()

    def common_denominator(self) -> int:
        return math.lcm(*(c.denominator for c in self.coeffs))

    def num_den_vectors(self) -> tuple[list[int], list[int]]:
        return [c.numerator for c in self.coeffs], [c.denominator for c in self.coeffs]

    def __complex__(self):
        return to_complex(self)

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*z^{k}")
        return f"CycloValue(b={self.base}: {' + '.join(terms) or '0'})"


def _scatter(d: dict[int, Fraction], b: int) -> list[Fraction]:
    out = [Fraction(0)] * b
    for k, c in d.items():
        out[k] += c
    return out


def zeta_pow(b: int, k: int) -> CycloValue:
    """Exact zeta_b**k, reduced."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    return CycloValue(b, _reduction_rows(b)[k % b])


def cyclo_mul(a: CycloValue, c: CycloValue) -> CycloValue:
    if a.base != c.base:
        raise ValueError(f"base mismatch: {a.base} vs {c.base}")
    deg = len(a.coeffs)
    prod = [Fraction(0)] * (2 * deg - 1)
    for i, x in enumerate(a.coeffs):
        if not x:
            continue
        for k, y in enumerate(c.coeffs):
            if y:
                prod[i + k] += x * y
    return CycloValue.from_unreduced(a.base, prod)


def to_complex(x: CycloValue, dps: int | None = None):
    """Evaluate at exp(2*pi*i/b). With ``dps`` the result is an mpmath mpc."""
    b = x.base
    if dps is not None:
        import mpmath

        with mpmath.workdps(dps):
            z = mpmath.expjpi(mpmath.mpf(2) / b)
            acc = mpmath.mpc(0)
            for k, c in enumerate(x.coeffs):
                if c:
                    acc += mpmath.mpf(c.numerator) / c.denominator * z**k
            return acc
    acc = 0j
    for k, c in enumerate(x.coeffs):
        if c:
            acc += float(c) * cmath.exp(2j * math.pi * k / b)
    return acc
