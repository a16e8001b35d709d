"""Whole-level exact coefficient tables.

For a fixed scale pair (j1, j2) every coefficient mu_{j,m,l} is stored as an
integer vector over the reduced power basis of Q(zeta_b), all sharing one
denominator ``scale = 4 * N * L**4`` where ``L = b**max(n, jmax + 1)``. With a
common denominator the three methods can be compared with ``np.array_equal``.

Array layout of a level table: ``numer[m1, m2, l1 - 1, l2 - 1, basis]``; an
axis at level -1 has length 1 in both its m and l slot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import IO, Iterator

import numpy as np

from .hammersley import PointSet
from .haar import (
    HaarIndex,
    Regime,
    _boundary_value,
    classify_regime,
    coeff_discrepancy_fast,
    coeff_volume,
    tail_sum,
)
from .numeric import CycloValue, euler_phi, mul_tensor, power_table, to_complex

__all__ = ["ExactLevels", "LevelTable", "METHODS", "write_table_jsonl"]

METHODS = ("fast", "pointwise", "oracle")


@dataclass
class LevelTable:
    b: int
    j1: int
    j2: int
    numer: np.ndarray
    scale: int

    def value(self, m1: int, m2: int, l1: int, l2: int) -> CycloValue:
        vec = self.numer[m1, m2, l1 - 1, l2 - 1]
        return CycloValue(self.b, [Fraction(int(c), self.scale) for c in vec])

    def indices(self) -> Iterator[HaarIndex]:
        M1, M2, L1, L2, _ = self.numer.shape
        for m1 in range(M1):
            for m2 in range(M2):
                for l1 in range(1, L1 + 1):
                    for l2 in range(1, L2 + 1):
                        yield HaarIndex(self.j1, self.j2, m1, m2, l1, l2)

    def complex_values(self) -> np.ndarray:
        """Float projection, shape (M1, M2, L1, L2)."""
        b = self.b
        powers = np.exp(2j * np.pi * np.arange(euler_phi(b)) / b)
        return (self.numer.astype(float) @ powers) / float(self.scale)


def _axis_shape(b: int, j: int) -> tuple[int, int]:
    return (b**j, b - 1) if j >= 0 else (1, 1)


class ExactLevels:
    """Exact level tables for one point set, up to level ``jmax`` on each axis."""

    def __init__(self, ps: PointSet, jmax: int):
        if jmax < -1:
            raise ValueError("jmax must be >= -1")
        self.ps = ps
        self.b = ps.b
        self.jmax = jmax
        self.L = ps.b ** max(ps.n, jmax + 1)
        self.scale = 4 * ps.size * self.L**4
        self.phi = euler_phi(ps.b)
        # second differences of G and b*b-term Fourier sums stay below 64*scale
        self.dtype = np.int64 if 64 * self.scale * ps.b**2 < 2**63 else object
        self.zx = ps.xs.astype(self.dtype) * (self.L // ps.den)
        self.zy = ps.ys.astype(self.dtype) * (self.L // ps.den)

    # -- conversions -------------------------------------------------------

    def _scaled(self, v: CycloValue) -> list[int]:
        out = []
        for c in v.coeffs:
            q, r = divmod(c.numerator * self.scale, c.denominator)
            if r:
                raise ArithmeticError(f"value {v} is not representable with scale {self.scale}")
            out.append(q)
        return out

    def _per_l(self, j1: int, j2: int, fn) -> np.ndarray:
        """Array (L1, L2, phi) of scaled fn(l1, l2)."""
        _, L1 = _axis_shape(self.b, j1)
        _, L2 = _axis_shape(self.b, j2)
        arr = np.zeros((L1, L2, self.phi), dtype=self.dtype)
        for a in range(L1):
            for c in range(L2):
                arr[a, c] = self._scaled(fn(a + 1, c + 1))
        return arr

    def _broadcast(self, j1: int, j2: int, per_l: np.ndarray) -> np.ndarray:
        M1, _ = _axis_shape(self.b, j1)
        M2, _ = _axis_shape(self.b, j2)
        return np.broadcast_to(per_l, (M1, M2) + per_l.shape).copy()

    def _volume(self, j1: int, j2: int) -> np.ndarray:
        return self._per_l(j1, j2, lambda l1, l2: coeff_volume(self.b, HaarIndex(j1, j2, 0, 0, l1, l2)))

    # -- methods -----------------------------------------------------------

    def level(self, j1: int, j2: int, method: str) -> LevelTable:
        if not (-1 <= j1 <= self.jmax and -1 <= j2 <= self.jmax):
            raise ValueError(f"level ({j1}, {j2}) outside [-1, {self.jmax}]")
        if method == "fast":
            numer = self._fast(j1, j2)
        elif method == "pointwise":
            numer = self._pointwise(j1, j2)
        elif method == "oracle":
            numer = self._oracle(j1, j2)
        else:
            raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
        return LevelTable(self.b, j1, j2, numer, self.scale)

    def _fast(self, j1: int, j2: int) -> np.ndarray:
        ps, b = self.ps, self.b
        regime = classify_regime((j1, j2), ps.n)
        if regime is Regime.CRITICAL:
            return self._pointwise(j1, j2)
        if regime in (Regime.COARSE, Regime.CORNER, Regime.FINE_BOTH, Regime.ROW_FINE, Regime.COL_FINE):
            # m-independent closed forms
            per_l = self._per_l(j1, j2, lambda l1, l2: coeff_discrepancy_fast(ps, HaarIndex(j1, j2, 0, 0, l1, l2)))
            return self._broadcast(j1, j2, per_l)
        axis, j = (0, j1) if regime is Regime.ROW_BOUNDARY else (1, j2)
        rows = np.zeros((b**j, b - 1, self.phi), dtype=self.dtype)
        for m in range(b**j):
            for l in range(1, b):
                rows[m, l - 1] = self._scaled(_boundary_value(ps, axis, j, m, l))
        if axis == 0:
            return rows[:, None, :, None, :].copy()
        return rows[None, :, None, :, :].copy()

    def _axis_brackets(self, z: np.ndarray, j: int):
        """Per-point box index, interior mask and c*bracket vectors (N, L, phi)."""
        b, L, phi = self.b, self.L, self.phi
        npts = len(z)
        if j == -1:
            vec = np.zeros((npts, 1, phi), dtype=self.dtype)
            vec[:, 0, 0] = L - z
            return np.zeros(npts, dtype=np.int64), np.ones(npts, dtype=bool), vec
        c = L // b ** (j + 1)
        q = z // c
        m = (q // b).astype(np.int64)
        k = (q % b).astype(np.int64)
        interior = (z % (c * b)) != 0
        pt = power_table(b).astype(self.dtype)
        tails = np.array(
            [[tail_sum(b, l, kk).coeffs for kk in range(b)] for l in range(1, b)], dtype=object
        )
        tails = np.vectorize(lambda f: int(f))(tails).astype(self.dtype)  # (b-1, b, phi)
        ls = np.arange(1, b)
        expo = (k[:, None] * ls[None, :]) % b  # (N, b-1)
        lead = ((q + 1) * c - z)[:, None, None]
        vec = lead * pt[expo] + c * np.transpose(tails[:, k], (1, 0, 2))
        return m, interior, vec

    def _pointwise(self, j1: int, j2: int) -> np.ndarray:
        b = self.b
        M1, L1 = _axis_shape(b, j1)
        M2, L2 = _axis_shape(b, j2)
        m1, in1, v1 = self._axis_brackets(self.zx, j1)
        m2, in2, v2 = self._axis_brackets(self.zy, j2)
        keep = in1 & in2
        m1, m2, v1, v2 = m1[keep], m2[keep], v1[keep], v2[keep]
        prod = np.einsum("iua,ivc,acp->iuvp", v1, v2, mul_tensor(b).astype(self.dtype))
        acc = np.zeros((M1 * M2, L1, L2, self.phi), dtype=self.dtype)
        np.add.at(acc, m1 * M2 + m2, prod)
        acc = acc.reshape(M1, M2, L1, L2, self.phi)
        # scale / (N * L**2) = 4 L**2
        return acc * (4 * self.L**2) - self._volume(j1, j2)[None, None]

    @cached_property
    def _G(self) -> np.ndarray:
        """4 N L**4 * (double antiderivative of D) on the full (L+1)^2 grid."""
        L, N = self.L, self.ps.size
        grid = np.arange(L + 1)
        if self.dtype is np.int64 and N * L * L < 2**52:
            a = np.maximum(grid[:, None] - self.zx[None, :], 0).astype(float)
            c = np.maximum(grid[:, None] - self.zy[None, :], 0).astype(float)
            counted = np.rint(a @ c.T).astype(np.int64)
        else:
            a = np.maximum(grid[:, None].astype(object) - self.zx[None, :], 0)
            c = np.maximum(grid[:, None].astype(object) - self.zy[None, :], 0)
            counted = a.dot(c.T)
        g2 = grid.astype(self.dtype) ** 2
        return 4 * L * L * counted - N * np.multiply.outer(g2, g2)

    def _oracle(self, j1: int, j2: int) -> np.ndarray:
        b, L, phi = self.b, self.L, self.phi
        M1, L1 = _axis_shape(b, j1)
        M2, L2 = _axis_shape(b, j2)
        K1 = b if j1 >= 0 else 1
        K2 = b if j2 >= 0 else 1
        c1 = L // b ** (j1 + 1)
        c2 = L // b ** (j2 + 1)
        g = self._G[::c1, ::c2]
        box = g[1:, 1:] - g[:-1, 1:] - g[1:, :-1] + g[:-1, :-1]
        box = box.reshape(M1, K1, M2, K2).transpose(0, 2, 1, 3).reshape(M1 * M2, K1 * K2)
        e1 = (np.arange(1, b)[:, None] * np.arange(b)[None, :]) % b if j1 >= 0 else np.zeros((1, 1), int)
        e2 = (np.arange(1, b)[:, None] * np.arange(b)[None, :]) % b if j2 >= 0 else np.zeros((1, 1), int)
        expo = (e1[:, None, :, None] + e2[None, :, None, :]) % b  # (L1, L2, K1, K2)
        T = power_table(b).astype(self.dtype)[expo]  # (L1, L2, K1, K2, phi)
        T = T.transpose(2, 3, 0, 1, 4).reshape(K1 * K2, L1 * L2 * phi)
        return (box @ T).reshape(M1, M2, L1, L2, phi)


def table_records(ps: PointSet, jmax: int, method: str = "fast", exact: bool = False) -> Iterator[dict]:
    levels = ExactLevels(ps, jmax)
    for j1 in range(-1, jmax + 1):
        for j2 in range(-1, jmax + 1):
            tab = levels.level(j1, j2, method)
            cvals = tab.complex_values()
            regime = str(classify_regime((j1, j2), ps.n))
            for idx in tab.indices():
                z = cvals[idx.m1, idx.m2, idx.l1 - 1, idx.l2 - 1]
                yield _record(idx, z, regime, tab.value(idx.m1, idx.m2, idx.l1, idx.l2) if exact else None)


def _record(idx: HaarIndex, z: complex, regime: str, exact: CycloValue | None) -> dict:
    rec = {
        "j1": idx.j1,
        "j2": idx.j2,
        "m1": idx.m1,
        "m2": idx.m2,
        "l1": idx.l1,
        "l2": idx.l2,
        "re": float(z.real) + 0.0,  # no negative zeros in dumps
        "im": float(z.imag) + 0.0,
        "regime": regime,
    }
    if exact is not None:
        nums, dens = exact.num_den_vectors()
        rec["num_vec"] = nums
        rec["den_vec"] = dens
    return rec


def coefficient_record(idx: HaarIndex, value: CycloValue, regime: Regime, exact: bool = False) -> dict:
    return _record(idx, to_complex(value), str(regime), value if exact else None)


def write_table_jsonl(records, fh: IO[str]) -> int:
    count = 0
    for rec in records:
        fh.write(json.dumps(rec) + "\n")
        count += 1
    return count
