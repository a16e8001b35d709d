"""Two-dimensional b-adic Haar system and Haar coefficients of D_{R_n}.

Coefficients are paired with h directly (no complex conjugation):
mu_{j,m,l}(f) = integral of f * h_{j,m,l}. Three independent routes compute
the coefficients of the discrepancy function:

* :func:`coeff_discrepancy_pointwise` sums the per-point indicator
  coefficients and subtracts the coefficient of x1*x2;
* :func:`coeff_discrepancy_fast` dispatches on the scale regime and uses
  closed forms that do not look at individual points except in the
  ``Critical`` regime;
* :func:`coeff_oracle` integrates D over each child box exactly.

The exact inverse of (zeta**l - 1) is taken as geom_sum(b, l) / b, which is
certified by ``geom_sum(b, l) * (zeta**l - 1) == b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .hammersley import DigitMap, PointSet, SignPattern
from .numeric import CycloValue, zeta_pow

__all__ = [
    "HaarIndex",
    "Regime",
    "classify_regime",
    "coeff_bound",
    "coeff_discrepancy_fast",
    "coeff_discrepancy_pointwise",
    "coeff_indicator",
    "coeff_oracle",
    "coeff_volume",
    "corner_coefficient",
    "flip_sign",
    "geom_sum",
    "haar_value",
    "inv_zeta_minus_one",
    "iter_indices",
    "tail_sum",
]


@dataclass(frozen=True, order=True)
class HaarIndex:
    j1: int
    j2: int
    m1: int = 0
    m2: int = 0
    l1: int = 1
    l2: int = 1

    @property
    def j(self) -> tuple[int, int]:
        return (self.j1, self.j2)

    def axis(self, i: int) -> tuple[int, int, int]:
        return (self.j1, self.m1, self.l1) if i == 0 else (self.j2, self.m2, self.l2)

    def validate(self, b: int) -> HaarIndex:
        for name, (j, m, l) in (("axis 1", self.axis(0)), ("axis 2", self.axis(1))):
            if j < -1:
                raise ValueError(f"{name}: level {j} < -1")
            if j == -1:
                if m != 0 or l != 1:
                    raise ValueError(f"{name}: level -1 requires m=0, l=1 (got m={m}, l={l})")
            else:
                if not 0 <= m < b**j:
                    raise ValueError(f"{name}: m={m} outside [0, {b ** j})")
                if not 1 <= l <= b - 1:
                    raise ValueError(f"{name}: l={l} outside [1, {b - 1}]")
        return self


class Regime(str, Enum):
    COARSE = "Coarse"
    CRITICAL = "Critical"
    FINE_BOTH = "FineBoth"
    ROW_BOUNDARY = "RowBoundary"
    COL_BOUNDARY = "ColBoundary"
    ROW_FINE = "RowFine"
    COL_FINE = "ColFine"
    CORNER = "Corner"

    def __str__(self):
        return self.value


def classify_regime(idx: HaarIndex | tuple[int, int], n: int) -> Regime:
    j1, j2 = idx.j if isinstance(idx, HaarIndex) else idx
    if j1 == -1 and j2 == -1:
        return Regime.CORNER
    if j2 == -1:
        return Regime.ROW_BOUNDARY if j1 < n else Regime.ROW_FINE
    if j1 == -1:
        return Regime.COL_BOUNDARY if j2 < n else Regime.COL_FINE
    if j1 >= n or j2 >= n:
        return Regime.FINE_BOTH
    if j1 + j2 < n - 1:
        return Regime.COARSE
    return Regime.CRITICAL


def iter_indices(b: int, jmax: int, jmin: int = -1):
    """All valid indices with jmin <= j1, j2 <= jmax in (j1, j2, m1, m2, l1, l2) order."""
    for j1 in range(jmin, jmax + 1):
        for j2 in range(jmin, jmax + 1):
            ms1 = range(b**j1) if j1 >= 0 else (0,)
            ms2 = range(b**j2) if j2 >= 0 else (0,)
            ls1 = range(1, b) if j1 >= 0 else (1,)
            ls2 = range(1, b) if j2 >= 0 else (1,)
            for m1 in ms1:
                for m2 in ms2:
                    for l1 in ls1:
                        for l2 in ls2:
                            yield HaarIndex(j1, j2, m1, m2, l1, l2)


# --- one-dimensional pieces -------------------------------------------------


def _interval(b: int, j: int, m: int) -> tuple[Fraction, Fraction]:
    if j == -1:
        return Fraction(0), Fraction(1)
    w = Fraction(1, b**j)
    return m * w, (m + 1) * w


def haar_value_1d(b: int, j: int, m: int, l: int, x) -> CycloValue:
    x = Fraction(x)
    lo, hi = _interval(b, j, m)
    if not lo <= x < hi:
        return CycloValue.zero(b)
    if j == -1:
        return CycloValue.from_rational(b, 1)
    k = math.floor((x - lo) * b ** (j + 1))
    return zeta_pow(b, l * k)


def haar_value(b: int, idx: HaarIndex, x, y) -> CycloValue:
    idx.validate(b)
    return haar_value_1d(b, idx.j1, idx.m1, idx.l1, x) * haar_value_1d(b, idx.j2, idx.m2, idx.l2, y)


@lru_cache(maxsize=None)
def geom_sum(b: int, l: int) -> CycloValue:
    """sum_{k=1}^{b-1} k * zeta**(l*k); equals b / (zeta**l - 1)."""
    if not 1 <= l <= b - 1:
        raise ValueError(f"l={l} outside [1, {b - 1}]")
    acc = CycloValue.zero(b)
    for k in range(1, b):
        acc = acc + zeta_pow(b, l * k) * k
    return acc


@lru_cache(maxsize=None)
def tail_sum(b: int, l: int, k: int) -> CycloValue:
    """sum_{r=k+1}^{b-1} zeta**(l*r)."""
    if not 1 <= l <= b - 1:
        raise ValueError(f"l={l} outside [1, {b - 1}]")
    if not 0 <= k <= b - 1:
        raise ValueError(f"k={k} outside [0, {b - 1}]")
    acc = CycloValue.zero(b)
    for r in range(k + 1, b):
        acc = acc + zeta_pow(b, l * r)
    return acc


@lru_cache(maxsize=None)
def inv_zeta_minus_one(b: int, l: int) -> CycloValue:
    """Exact 1 / (zeta**l - 1)."""
    return geom_sum(b, l) / b


def _volume_axis(b: int, j: int, l: int) -> CycloValue:
    # integral of x * h_{j,m,l}(x) over [0, 1); independent of m
    if j == -1:
        return CycloValue.from_rational(b, Fraction(1, 2))
    return inv_zeta_minus_one(b, l) * Fraction(1, b ** (2 * j + 1))


def coeff_volume(b: int, idx: HaarIndex) -> CycloValue:
    """Haar coefficient of f(x) = x1 * x2."""
    idx.validate(b)
    return _volume_axis(b, idx.j1, idx.l1) * _volume_axis(b, idx.j2, idx.l2)


def _indicator_axis(b: int, j: int, m: int, l: int, z: Fraction) -> CycloValue | None:
    """1-D factor of the indicator coefficient, None when z is not interior."""
    if j == -1:
        return CycloValue.from_rational(b, 1 - z)
    lo, hi = _interval(b, j, m)
    if not lo < z < hi:
        return None
    k = math.floor((z - lo) * b ** (j + 1))
    bracket = zeta_pow(b, k * l) * (b * m + k + 1 - b ** (j + 1) * z) + tail_sum(b, l, k)
    return bracket * Fraction(1, b ** (j + 1))


def coeff_indicator(b: int, idx: HaarIndex, z1, z2) -> CycloValue:
    """Haar coefficient of the indicator of C_z = (z1, 1) x (z2, 1)."""
    idx.validate(b)
    z1, z2 = Fraction(z1), Fraction(z2)
    if not (0 <= z1 < 1 and 0 <= z2 < 1):
        raise ValueError("z must lie in [0, 1)^2")
    f1 = _indicator_axis(b, idx.j1, idx.m1, idx.l1, z1)
    if f1 is None:
        return CycloValue.zero(b)
    f2 = _indicator_axis(b, idx.j2, idx.m2, idx.l2, z2)
    if f2 is None:
        return CycloValue.zero(b)
    return f1 * f2


def _points_in_box(ps: PointSet, idx: HaarIndex) -> list[tuple[Fraction, Fraction]]:
    b, n = ps.b, ps.n
    mask = np.ones(ps.size, dtype=bool)
    for coords, (j, m, _) in ((ps.xs, idx.axis(0)), (ps.ys, idx.axis(1))):
        if j == -1:
            continue
        # lo < z < hi with z = c / b**n, lo = m / b**j
        lo = m * b**n
        hi = (m + 1) * b**n
        scaled = coords.astype(object) * b**j if b ** (n + j) >= 2**62 else coords * b**j
        mask &= (scaled > lo) & (scaled < hi)
    den = ps.den
    return [(Fraction(int(x), den), Fraction(int(y), den)) for x, y in zip(ps.xs[mask], ps.ys[mask])]


def coeff_discrepancy_pointwise(ps: PointSet, idx: HaarIndex) -> CycloValue:
    """(1/N) sum_z mu(1_{C_z}) - mu(x1 x2), over points interior to I_{jm}."""
    b = ps.b
    idx.validate(b)
    acc = CycloValue.zero(b)
    for z1, z2 in _points_in_box(ps, idx):
        acc = acc + coeff_indicator(b, idx, z1, z2)
    return acc * Fraction(1, ps.size) - coeff_volume(b, idx)


def flip_sign(pattern: SignPattern, i: int) -> int:
    """+1 when s_i is the identity, -1 when it is the reversal."""
    return 1 if pattern[i] is DigitMap.IDENTITY else -1


def corner_coefficient(b: int, n: int, a: int) -> Fraction:
    """Closed form of mu_{(-1,-1),(0,0),(1,1)} for R_n with a identity maps."""
    return (
        Fraction(1, 4 * b ** (2 * n))
        + Fraction(1, 2 * b**n)
        + Fraction((2 * a - n) * (b * b - 1), 12 * b ** (n + 1))
    )


def _digits(m: int, b: int, width: int) -> list[int]:
    """Base-b digits of m, most significant first, zero padded to width."""
    out = []
    for _ in range(width):
        m, d = divmod(m, b)
        out.append(d)
    return out[::-1]


def boundary_epsilon(ps: PointSet, axis: int, j: int, m: int) -> Fraction:
    """Tail offset fixed by the digits of m in the boundary regimes.

    Row (axis 0): sum_{i=n-j+1}^{n} b**-i s_i(t_i) with t_{n-p+1} the p-th digit of m.
    Column (axis 1): sum_{i=n-j+1}^{n} b**-i t_{n+1-i} with s_p(t_p) the p-th digit of m.
    """
    b, n, pat = ps.b, ps.n, ps.pattern
    dig = _digits(m, b, j)
    eps = Fraction(0)
    for p, d in enumerate(dig, start=1):
        if axis == 0:
            i = n - p + 1
            eps += Fraction(pat[i].apply(d, b), b**i)
        else:
            # s_p is an involution, so t_p = s_p(d)
            i = n + 1 - p
            eps += Fraction(pat[p].apply(d, b), b**i)
    return eps


def _boundary_value(ps: PointSet, axis: int, j: int, m: int, l: int) -> CycloValue:
    b, n = ps.b, ps.n
    sign = flip_sign(ps.pattern, n - j if axis == 0 else j + 1)
    z = zeta_pow(b, l)
    inv = inv_zeta_minus_one(b, l)
    w = z if sign > 0 else CycloValue.from_rational(b, -1)
    eps = boundary_epsilon(ps, axis, j, m)
    main = (w - (z - 1) * (eps * b ** (n - j))) * (inv * inv) * Fraction(1, b ** (n + j + 1))
    return main - inv * Fraction(sign, 2 * b ** (2 * n))


def coeff_discrepancy_fast(ps: PointSet, idx: HaarIndex) -> CycloValue:
    b, n = ps.b, ps.n
    idx.validate(b)
    regime = classify_regime(idx, n)
    if regime is Regime.COARSE:
        sigma = flip_sign(ps.pattern, n - idx.j1) * flip_sign(ps.pattern, idx.j2 + 1)
        return inv_zeta_minus_one(b, idx.l1) * inv_zeta_minus_one(b, idx.l2) * Fraction(sigma, b ** (2 * n))
    if regime is Regime.CRITICAL:
        return coeff_discrepancy_pointwise(ps, idx)
    if regime in (Regime.FINE_BOTH, Regime.ROW_FINE, Regime.COL_FINE):
        return -coeff_volume(b, idx)
    if regime is Regime.ROW_BOUNDARY:
        return _boundary_value(ps, 0, idx.j1, idx.m1, idx.l1)
    if regime is Regime.COL_BOUNDARY:
        return _boundary_value(ps, 1, idx.j2, idx.m2, idx.l2)
    return CycloValue.from_rational(b, corner_coefficient(b, n, ps.a))


def _children(b: int, j: int, m: int, l: int, scale: int):
    """(lo, hi, exponent) of each child interval in units of 1/scale."""
    if j == -1:
        return [(0, scale, 0)]
    w = scale // b ** (j + 1)
    return [((b * m + k) * w, (b * m + k + 1) * w, (l * k) % b) for k in range(b)]


def coeff_oracle(ps: PointSet, idx: HaarIndex) -> CycloValue:
    """Haar coefficient of D by exact integration over each child box."""
    b, n = ps.b, ps.n
    idx.validate(b)
    L = b ** max(n, idx.j1 + 1, idx.j2 + 1)
    N = ps.size
    zx = ps.xs.astype(object) * (L // ps.den)
    zy = ps.ys.astype(object) * (L // ps.den)
    by_exp = [Fraction(0)] * b
    for lo1, hi1, e1 in _children(b, idx.j1, idx.m1, idx.l1, L):
        cx = np.maximum(hi1 - np.maximum(zx, lo1), 0)
        for lo2, hi2, e2 in _children(b, idx.j2, idx.m2, idx.l2, L):
            cy = np.maximum(hi2 - np.maximum(zy, lo2), 0)
            counted = Fraction(int((cx * cy).sum()), N * L * L)
            volume = Fraction((hi1 * hi1 - lo1 * lo1) * (hi2 * hi2 - lo2 * lo2), 4 * L**4)
            by_exp[(e1 + e2) % b] += counted - volume
    return CycloValue.from_unreduced(b, by_exp)


def _abs_zeta_minus_one(b: int, l: int) -> float:
    return 2.0 * abs(math.sin(math.pi * l / b))


def coeff_bound(idx: HaarIndex, ps: PointSet) -> float:
    """Magnitude (exact regimes) or bound shape with constant 1 (other regimes)."""
    b, n = ps.b, ps.n
    regime = classify_regime(idx, n)
    j1, j2 = idx.j
    if regime is Regime.COARSE:
        return b ** (-2 * n) / (_abs_zeta_minus_one(b, idx.l1) * _abs_zeta_minus_one(b, idx.l2))
    if regime is Regime.CRITICAL:
        return float(b) ** (-n - j1 - j2)
    if regime is Regime.ROW_BOUNDARY:
        return float(b) ** (-n - j1)
    if regime is Regime.COL_BOUNDARY:
        return float(b) ** (-n - j2)
    if regime is Regime.CORNER:
        return abs(float(corner_coefficient(b, n, ps.a)))
    # FineBoth / RowFine / ColFine: exact volume magnitude
    mag = 1.0
    for j, l in ((j1, idx.l1), (j2, idx.l2)):
        mag *= 0.5 if j == -1 else float(b) ** (-2 * j - 1) / _abs_zeta_minus_one(b, l)
    return mag
