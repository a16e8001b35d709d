"""Generalized base-b Hammersley point sets in the unit square."""

from __future__ import annotations

import csv
import itertools
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import IO

import numpy as np

__all__ = [
    "DigitMap",
    "PointSet",
    "SignPattern",
    "a_count",
    "balanced_pattern",
    "generate",
    "random_pattern",
    "verify_net",
    "write_points_csv",
]


class DigitMap(Enum):
    IDENTITY = "I"
    REVERSAL = "R"

    def apply(self, t: int, b: int) -> int:
        return t if self is DigitMap.IDENTITY else b - 1 - t


@dataclass(frozen=True)
class SignPattern:
    """Per-digit maps s_1..s_n, serialized as a string over {'I', 'R'}."""

    maps: tuple[DigitMap, ...]

    def __post_init__(self):
        if len(self.maps) == 0:
            raise ValueError("a sign pattern needs at least one digit")

    @classmethod
    def parse(cls, text: str) -> SignPattern:
        try:
            return cls(tuple(DigitMap(ch) for ch in text.strip().upper()))
        except ValueError:
            raise ValueError(f"pattern must be a non-empty string over 'I'/'R', got {text!r}") from None

    def __str__(self):
        return "".join(m.value for m in self.maps)

    def __len__(self):
        return len(self.maps)

    def __getitem__(self, i: int) -> DigitMap:
        """1-based access, matching s_1..s_n."""
        if not 1 <= i <= len(self.maps):
            raise IndexError(f"digit index {i} outside 1..{len(self.maps)}")
        return self.maps[i - 1]

    @property
    def identity_count(self) -> int:
        return sum(m is DigitMap.IDENTITY for m in self.maps)


def a_count(pattern: SignPattern) -> int:
    """Number of identity maps among s_1..s_n."""
    return pattern.identity_count


def balanced_pattern(n: int) -> SignPattern:
    """floor(n/2) identities first, reversals after."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    a = n // 2
    return SignPattern((DigitMap.IDENTITY,) * a + (DigitMap.REVERSAL,) * (n - a))


def identity_pattern(n: int) -> SignPattern:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return SignPattern((DigitMap.IDENTITY,) * n)


def random_pattern(n: int, rng: random.Random) -> SignPattern:
    return SignPattern(tuple(rng.choice((DigitMap.IDENTITY, DigitMap.REVERSAL)) for _ in range(n)))


def all_patterns(n: int):
    for combo in itertools.product((DigitMap.IDENTITY, DigitMap.REVERSAL), repeat=n):
        yield SignPattern(combo)


@dataclass(frozen=True, eq=False)
class PointSet:
    """The b**n points of R_n.

    Coordinates are kept as integer numerators over ``den = b**n`` in
    ``xs``/``ys`` (int64 arrays, read-only). ``digits[i]`` is the digit tuple
    (t_1, ..., t_n) of point i; points are in lexicographic digit order.
    """

    b: int
    n: int
    pattern: SignPattern
    xs: np.ndarray = field(repr=False)
    ys: np.ndarray = field(repr=False)

    @property
    def den(self) -> int:
        return self.b**self.n

    @property
    def size(self) -> int:
        return len(self.xs)

    @property
    def a(self) -> int:
        return a_count(self.pattern)

    def __len__(self):
        return self.size

    @property
    def points(self) -> list[tuple[Fraction, Fraction]]:
        d = self.den
        return [(Fraction(int(x), d), Fraction(int(y), d)) for x, y in zip(self.xs, self.ys)]

    def digits(self) -> np.ndarray:
        """Array of shape (N, n); column i-1 holds t_i."""
        b, n = self.b, self.n
        idx = np.arange(self.size, dtype=np.int64)
        cols = [(idx // b ** (n - i)) % b for i in range(1, n + 1)]
        return np.stack(cols, axis=1)

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return (
            (self.b, self.n, self.pattern) == (other.b, other.n, other.pattern)
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.ys, other.ys)
        )

    __hash__ = None


def generate(b: int, n: int, pattern: SignPattern | str) -> PointSet:
    """Enumerate R_n in lexicographic order of (t_1, ..., t_n).

    x = sum_i t_{n+1-i} b**-i and y = sum_i s_i(t_i) b**-i.
    """
    if isinstance(pattern, str):
        pattern = SignPattern.parse(pattern)
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if len(pattern) != n:
        raise ValueError(f"pattern length {len(pattern)} does not match n={n}")
    if b**n > 2**40:
        raise ValueError(f"b**n = {b}**{n} is too large to enumerate")

    size = b**n
    idx = np.arange(size, dtype=np.int64)
    xs = np.zeros(size, dtype=np.int64)
    ys = np.zeros(size, dtype=np.int64)
    for i in range(1, n + 1):
        t = (idx // b ** (n - i)) % b
        # t_i carries weight b**-(n+1-i) in x and b**-i in y (numerators over b**n)
        xs += t * b ** (i - 1)
        s = t if pattern[i] is DigitMap.IDENTITY else (b - 1 - t)
        ys += s * b ** (n - i)
    xs.flags.writeable = False
    ys.flags.writeable = False
    return PointSet(b, n, pattern, xs, ys)


def verify_net(ps: PointSet, j1: int, j2: int) -> bool:
    """True iff every b-adic box of shape b**-j1 x b**-j2 holds b**(n-j1-j2) points."""
    b, n = ps.b, ps.n
    if j1 < 0 or j2 < 0:
        raise ValueError("levels must be non-negative")
    if j1 + j2 > n:
        raise ValueError(f"j1 + j2 = {j1 + j2} exceeds n = {n}")
    m1 = ps.xs // b ** (n - j1)
    m2 = ps.ys // b ** (n - j2)
    counts = np.bincount(m1 * b**j2 + m2, minlength=b ** (j1 + j2))
    return bool(len(counts) == b ** (j1 + j2) and np.all(counts == b ** (n - j1 - j2)))


def write_points_csv(ps: PointSet, fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["x_num", "y_num", "den"])
    den = ps.den
    for x, y in zip(ps.xs.tolist(), ps.ys.tolist()):
        w.writerow([x, y, den])

