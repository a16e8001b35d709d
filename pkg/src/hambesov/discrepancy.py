"""Discrepancy function of a point set and its exact L2 norm.

Counting uses the open boxes C_z = (z_1, 1) x (z_2, 1): a point z is counted
at x only when z_1 < x_1 and z_2 < x_2. Half-open conventions found in other
discrepancy codes differ from this on a null set.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .hammersley import PointSet

__all__ = [
    "count_open_box",
    "eval_discrepancy",
    "eval_discrepancy_float",
    "l2_squared_exact",
    "parse_rational",
]


def parse_rational(text: str) -> Fraction:
    """Parse ``num/den`` (or an integer / decimal literal) into a Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational number: {text!r}") from None


def _check_unit(x: Fraction, name: str):
    if not 0 <= x <= 1:
        raise ValueError(f"{name} = {x} lies outside [0, 1]")


def count_open_box(ps: PointSet, x: Fraction, y: Fraction) -> int:
    x, y = Fraction(x), Fraction(y)
    _check_unit(x, "x")
    _check_unit(y, "y")
    den = ps.den
    # z < x  <=>  z_num < x * den  <=>  z_num * x.den < x.num * den
    below_x = ps.xs * x.denominator < x.numerator * den
    below_y = ps.ys * y.denominator < y.numerator * den
    return int(np.count_nonzero(below_x & below_y))


def eval_discrepancy(ps: PointSet, x: Fraction, y: Fraction) -> Fraction:
    x, y = Fraction(x), Fraction(y)
    return Fraction(count_open_box(ps, x, y), ps.size) - x * y


def eval_discrepancy_float(ps: PointSet, x: np.ndarray, y: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Vectorized float version for Monte-Carlo checks."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    zx = ps.xs / ps.den
    zy = ps.ys / ps.den
    out = np.empty(x.shape, dtype=float)
    flat_x, flat_y, flat_out = x.ravel(), y.ravel(), out.ravel()
    for s in range(0, flat_x.size, chunk):
        cx = flat_x[s : s + chunk, None]
        cy = flat_y[s : s + chunk, None]
        cnt = np.count_nonzero((zx[None, :] < cx) & (zy[None, :] < cy), axis=1)
        flat_out[s : s + chunk] = cnt / ps.size - flat_x[s : s + chunk] * flat_y[s : s + chunk]
    return out


def _pair_max_sum(u: np.ndarray, v: np.ndarray, L: int) -> int:
    """sum_{i,k} (L - max(u_i, u_k)) * (L - max(v_i, v_k)), exact."""
    total = 0
    n = len(u)
    # int64 is safe while n**2 * L**2 stays below 2**63
    dtype = np.int64 if n * n * L * L < 2**62 else object
    uu = (L - u).astype(dtype)
    vv = (L - v).astype(dtype)
    block = max(1, 2**22 // max(n, 1))
    for s in range(0, n, block):
        a = np.minimum(uu[s : s + block, None], uu[None, :])
        c = np.minimum(vv[s : s + block, None], vv[None, :])
        total += int((a * c).sum())
    return total


def l2_squared_exact(ps: PointSet) -> Fraction:
    """Exact integral of D_P(x)**2 over the unit square (Warnock expansion).

    (1/N^2) sum_{z,z'} (1 - max(z_x, z'_x)) (1 - max(z_y, z'_y))
    - (2/N) sum_z (1 - z_x^2)(1 - z_y^2) / 4 + 1/9
    """
    N = ps.size
    L = ps.den
    pair = _pair_max_sum(ps.xs, ps.ys, L)
    xs = [int(v) for v in ps.xs]
    ys = [int(v) for v in ps.ys]
    single = sum((L * L - x * x) * (L * L - y * y) for x, y in zip(xs, ys))
    return (
        Fraction(pair, N * N * L * L)
        - Fraction(2 * single, N * 4 * L**4)
        + Fraction(1, 9)
    )
