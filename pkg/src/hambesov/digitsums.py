"""Digit-sum identities over all digit tuples, closed forms and brute force."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .hammersley import PointSet, SignPattern

__all__ = [
    "corner_sum",
    "corner_sum_closed",
    "cross_sum",
    "cross_sum_brute",
    "x_sum",
    "x_sum_brute",
    "y_sum",
    "y_sum_brute",
    "z_sum",
    "z_sum_brute",
]


def _check(b: int, n: int):
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")


def x_sum(b: int, n: int) -> Fraction:
    """sum over tuples of sum_j b**-j t_j = (b**n - 1) / 2."""
    _check(b, n)
    return Fraction(b**n - 1, 2)


def y_sum(b: int, n: int) -> Fraction:
    """sum over tuples of sum_i b**i t_i = b**(n+1) * x_sum."""
    _check(b, n)
    return Fraction(b ** (n + 1) * (b**n - 1), 2)


def z_sum(b: int, n: int) -> Fraction:
    """sum over tuples of sum_{i,j} b**(i-j) t_i t_j."""
    _check(b, n)
    return (
        Fraction(b ** (2 * n + 1), 4)
        + Fraction(n * b ** (n + 2), 12)
        - Fraction(b ** (n + 1), 2)
        - Fraction(n * b**n, 12)
        + Fraction(b, 4)
    )


def cross_sum(b: int, n: int, a: int) -> Fraction:
    """sum over tuples of sum_{i,j=1}^{n} b**(i-j) t_i s_j for a identity maps."""
    _check(b, n)
    if not 0 <= a <= n:
        raise ValueError(f"a={a} outside [0, {n}]")
    return (
        Fraction(b ** (2 * n + 1), 4)
        - Fraction(b ** (n + 1), 2)
        + Fraction(b, 4)
        + Fraction((2 * a - n) * (b * b - 1) * b**n, 12)
    )


def _tuples(b: int, n: int):
    return itertools.product(range(b), repeat=n)


def x_sum_brute(b: int, n: int) -> Fraction:
    _check(b, n)
    return sum((Fraction(t[j - 1], b**j) for t in _tuples(b, n) for j in range(1, n + 1)), Fraction(0))


def y_sum_brute(b: int, n: int) -> Fraction:
    _check(b, n)
    return Fraction(sum(b**i * t[i - 1] for t in _tuples(b, n) for i in range(1, n + 1)))


def _bilinear(b: int, n: int, s_of) -> Fraction:
    # sum_{i,j} b**(i-j) t_i s_j = b**-n * (sum_i b**i t_i) * (sum_j b**(n-j) s_j)
    total = 0
    for t in _tuples(b, n):
        s = s_of(t)
        left = sum(b**i * t[i - 1] for i in range(1, n + 1))
        right = sum(b ** (n - j) * s[j - 1] for j in range(1, n + 1))
        total += left * right
    return Fraction(total, b**n)


def z_sum_brute(b: int, n: int) -> Fraction:
    _check(b, n)
    return _bilinear(b, n, lambda t: t)


def cross_sum_brute(b: int, n: int, pattern: SignPattern | str) -> Fraction:
    """Direct enumeration of sum_{i,j} b**(i-j) t_i s_j(t_j) over all b**n tuples."""
    if isinstance(pattern, str):
        pattern = SignPattern.parse(pattern)
    _check(b, n)
    if len(pattern) != n:
        raise ValueError(f"pattern length {len(pattern)} does not match n={n}")
    maps = pattern.maps
    return _bilinear(b, n, lambda t: [m.apply(x, b) for m, x in zip(maps, t)])


def corner_sum(ps: PointSet) -> Fraction:
    """sum_z (1 - z_1)(1 - z_2), summed directly over the points."""
    den = ps.den
    u = den - ps.xs.astype(object)
    v = den - ps.ys.astype(object)
    return Fraction(int(np.dot(u, v)), den * den)


def corner_sum_closed(b: int, n: int, a: int) -> Fraction:
    """Closed form of corner_sum for a pattern with a identity maps."""
    return 1 + cross_sum(b, n, a) / b ** (n + 1)
