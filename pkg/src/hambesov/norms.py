"""Discrete Besov quasi-norm, Parseval L2 norm and scaling studies.

Norms are assembled level by level. Inside one level (j1, j2) most
coefficients share one closed-form magnitude; those are carried as a
(magnitudes, multiplicity) pair so that levels with b**(j1+j2) boxes never
need to be enumerated. Only the ``Critical`` and boundary levels contribute
per-box values.

Beyond the truncation level J (J >= n) every coefficient equals minus the
coefficient of x1*x2, so the omitted levels form geometric series that are
summed in closed form.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Callable, Iterable, Mapping, Sequence

import numpy as np

from .hammersley import PointSet, SignPattern, balanced_pattern, generate, identity_pattern
from .haar import HaarIndex, Regime, classify_regime, corner_coefficient
from .tables import ExactLevels

__all__ = [
    "INTEGRANDS",
    "LevelParts",
    "NormParams",
    "NormResult",
    "RateReport",
    "besov_quasi_norm",
    "besov_quasi_norm_direct",
    "level_parts",
    "parseval_l2",
    "quasi_norm_from_coefficients",
    "qmc_integrate",
    "qmc_series",
    "rate_report",
    "tail_constant",
]

INF = math.inf


@dataclass(frozen=True)
class NormParams:
    p: float = 2.0
    q: float = 2.0
    r: float = 0.0
    J: int | None = None

    def __post_init__(self):
        for name in ("p", "q"):
            v = getattr(self, name)
            if not (v >= 1):
                raise ValueError(f"{name} must lie in [1, inf], got {v}")
        if not math.isfinite(self.r):
            raise ValueError(f"r must be finite, got {self.r}")
        if self.J is not None and self.J < 0:
            raise ValueError(f"truncation level must be >= 0, got {self.J}")

    @property
    def inv_p(self) -> float:
        return 0.0 if self.p == INF else 1.0 / self.p

    def check_band(self):
        """Smoothness range in which the discrete expression is an equivalent quasi-norm."""
        lo = self.inv_p - 1
        hi = min(self.inv_p, 1.0)
        if not lo < self.r < hi:
            raise ValueError(f"r={self.r} outside the admissible band ({lo}, {hi}) for p={self.p}")

    def check_rate_hypothesis(self):
        if not 0 <= self.r < self.inv_p:
            raise ValueError(f"rate checks need 0 <= r < 1/p; got r={self.r}, p={self.p}")

    def weight(self, j1: int, j2: int, b: int) -> float:
        """b**((j1+j2)(r - 1/p + 1)) (not yet raised to q)."""
        return float(b) ** ((j1 + j2) * (self.r - self.inv_p + 1))


# --- per-level magnitudes ----------------------------------------------------


@dataclass
class LevelParts:
    """Coefficient magnitudes of one level as (magnitudes, multiplicity) chunks."""

    chunks: list[tuple[np.ndarray, int]]

    def lp_sum(self, p: float) -> float:
        """sum |mu|**p over the level (max for p = inf)."""
        if p == INF:
            return max((float(m.max()) for m, mult in self.chunks if mult > 0 and m.size), default=0.0)
        return float(sum(mult * np.sum(m**p) for m, mult in self.chunks))

    def lp_norm(self, p: float) -> float:
        return self.lp_sum(p) if p == INF else self.lp_sum(p) ** (1.0 / p)

    @property
    def count(self) -> int:
        return sum(m.size * mult for m, mult in self.chunks)


def _inv_zm1(b: int) -> np.ndarray:
    ls = np.arange(1, b)
    return 1.0 / (np.exp(2j * np.pi * ls / b) - 1.0)


def _volume_axis(b: int, j: int) -> np.ndarray:
    if j == -1:
        return np.array([0.5 + 0j])
    return float(b) ** (-2 * j - 1) * _inv_zm1(b)


def _volume(b: int, j1: int, j2: int) -> np.ndarray:
    return np.multiply.outer(_volume_axis(b, j1), _volume_axis(b, j2))


def _boundary_values(ps: PointSet, axis: int, j: int) -> np.ndarray:
    """Complex coefficients (b**j, b-1) on a boundary level."""
    b, n, pat = ps.b, ps.n, ps.pattern
    m = np.arange(b**j, dtype=np.int64)
    eps_num = np.zeros_like(m)  # eps * b**n
    for p in range(1, j + 1):
        d = (m // b ** (j - p)) % b
        mp = pat[n - p + 1] if axis == 0 else pat[p]
        s = d if mp.value == "I" else (b - 1 - d)
        eps_num += s * b ** (p - 1)
    sign = 1 if pat[n - j if axis == 0 else j + 1].value == "I" else -1
    zeta = np.exp(2j * np.pi * np.arange(1, b) / b)
    inv = 1.0 / (zeta - 1.0)
    w = zeta if sign > 0 else -np.ones_like(zeta)
    eps_scaled = (eps_num.astype(float) / float(b) ** j)[:, None]  # eps * b**(n-j)
    main = (w[None, :] - eps_scaled * (zeta - 1.0)[None, :]) * (inv * inv)[None, :] * float(b) ** (-n - j - 1)
    return main - sign * inv[None, :] * 0.5 * float(b) ** (-2 * n)


def _critical_parts(ps: PointSet, j1: int, j2: int) -> LevelParts:
    b, n = ps.b, ps.n
    zeta_pows = np.exp(2j * np.pi * np.arange(b) / b)
    ls = np.arange(1, b)
    # tails[l-1, k] = sum_{r>k} zeta**(l r)
    tails = np.array([[zeta_pows[(l * np.arange(k + 1, b)) % b].sum() for k in range(b)] for l in ls])

    def axis(X: np.ndarray, j: int):
        c = b ** (n - j - 1)
        q = X // c
        k = q % b
        interior = (X % (c * b)) != 0
        lead = ((q + 1) * c - X) / c
        br = lead[:, None] * zeta_pows[(k[:, None] * ls[None, :]) % b] + tails[:, k].T
        return q // b, interior, br

    m1, in1, br1 = axis(ps.xs, j1)
    m2, in2, br2 = axis(ps.ys, j2)
    keep = in1 & in2
    ids = m1[keep] * b**j2 + m2[keep]
    contrib = br1[keep][:, :, None] * br2[keep][:, None, :]
    boxes, inverse = np.unique(ids, return_inverse=True)
    acc = np.zeros((len(boxes), b - 1, b - 1), dtype=complex)
    np.add.at(acc, inverse, contrib)
    vol = _volume(b, j1, j2)
    mu = acc * (float(b) ** (-j1 - j2 - 2) / ps.size) - vol[None]
    return LevelParts([(np.abs(mu).ravel(), 1), (np.abs(vol).ravel(), b ** (j1 + j2) - len(boxes))])


def level_parts(ps: PointSet, j1: int, j2: int) -> LevelParts:
    b, n = ps.b, ps.n
    regime = classify_regime((j1, j2), n)
    boxes = b ** max(j1, 0) * b ** max(j2, 0)
    if regime is Regime.CORNER:
        return LevelParts([(np.array([abs(float(corner_coefficient(b, n, ps.a)))]), 1)])
    if regime is Regime.COARSE:
        inv = np.abs(_inv_zm1(b))
        return LevelParts([(np.multiply.outer(inv, inv).ravel() * float(b) ** (-2 * n), boxes)])
    if regime in (Regime.FINE_BOTH, Regime.ROW_FINE, Regime.COL_FINE):
        return LevelParts([(np.abs(_volume(b, j1, j2)).ravel(), boxes)])
    if regime is Regime.ROW_BOUNDARY:
        return LevelParts([(np.abs(_boundary_values(ps, 0, j1)).ravel(), 1)])
    if regime is Regime.COL_BOUNDARY:
        return LevelParts([(np.abs(_boundary_values(ps, 1, j2)).ravel(), 1)])
    return _critical_parts(ps, j1, j2)


# --- tails ---------------------------------------------------------------------


def tail_constant(b: int, p: float = 2.0) -> float:
    """(sum_l |zeta**l - 1|**-p)**(1/p), or the max over l when p = inf."""
    mags = 1.0 / np.abs(np.exp(2j * np.pi * np.arange(1, b) / b) - 1.0)
    if p == INF:
        return float(mags.max())
    return float(np.sum(mags**p) ** (1.0 / p))


def _besov_tail_terms(b: int, params: NormParams, J: int) -> tuple[float, float]:
    """(sum, sup) of weighted level terms over all levels with max(j1, j2) > J.

    Level terms are weight**q * (level l_p norm)**q for finite q; for q = inf
    the sup is taken over weight * level norm.
    """
    p, q, r = params.p, params.q, params.r
    kappa = tail_constant(b, p)
    ip = params.inv_p
    # level (J+1, 0) and (J+1, -1) dominate their families
    fine_sup = float(b) ** ((J + 1) * (r - 1) - 2) * kappa**2
    row_sup = float(b) ** ((J + 1) * (r - 1) - r + ip - 2) * kappa / 2
    if q == INF:
        return INF, max(fine_sup, row_sup)
    rho = float(b) ** ((r - 1) * q)
    geo_all = 1.0 / (1.0 - rho)
    geo_head = (1.0 - rho ** (J + 1)) / (1.0 - rho)
    fine = float(b) ** (-2 * q) * kappa ** (2 * q) * (geo_all**2 - geo_head**2)
    rows = 2.0 * (kappa / 2) ** q * float(b) ** (q * (-r + ip - 2)) * rho ** (J + 1) / (1.0 - rho)
    return fine + rows, max(fine_sup, row_sup)


@dataclass(frozen=True)
class NormResult:
    value: float  # truncated quasi-norm over levels -1..J
    tail_bound: float  # upper bound on (full norm) - value
    J: int

    @property
    def value_with_tail(self) -> float:
        return self.value + self.tail_bound


def _assemble(level_terms: Iterable[tuple[float, float]], q: float) -> float:
    """level_terms yields (weight, level_norm); returns the q-aggregate."""
    if q == INF:
        return max((w * v for w, v in level_terms), default=0.0)
    total = math.fsum((w * v) ** q for w, v in level_terms)
    return total ** (1.0 / q)


def besov_quasi_norm(ps: PointSet, params: NormParams) -> NormResult:
    """Truncated discrete Besov quasi-norm of D_{R_n} plus a tail bound."""
    params.check_band()
    b, n = ps.b, ps.n
    J = params.J if params.J is not None else n + 4
    if J < n:
        raise ValueError(f"truncation level J={J} must be >= n={n} for the tail bound")
    terms = []
    for j1 in range(-1, J + 1):
        for j2 in range(-1, J + 1):
            terms.append((params.weight(j1, j2, b), level_parts(ps, j1, j2).lp_norm(params.p)))
    value = _assemble(terms, params.q)
    tail_sum, tail_sup = _besov_tail_terms(b, params, J)
    if params.q == INF:
        bound = max(0.0, tail_sup - value)
    else:
        bound = (value**params.q + tail_sum) ** (1.0 / params.q) - value
    return NormResult(value, bound, J)


def quasi_norm_from_coefficients(b: int, coeffs: Mapping[HaarIndex, complex], params: NormParams) -> float:
    """Quasi-norm of the function whose only nonzero Haar coefficients are ``coeffs``."""
    by_level: dict[tuple[int, int], list[float]] = {}
    for idx, mu in coeffs.items():
        by_level.setdefault(idx.j, []).append(abs(complex(mu)))
    terms = []
    for (j1, j2), mags in sorted(by_level.items()):
        arr = np.asarray(mags)
        inner = float(arr.max()) if params.p == INF else float(np.sum(arr**params.p)) ** (1 / params.p)
        terms.append((params.weight(j1, j2, b), inner))
    return _assemble(terms, params.q)


def besov_quasi_norm_direct(ps: PointSet, params: NormParams, method: str = "oracle") -> float:
    """Same truncated sum, enumerating every exact coefficient (small cases only)."""
    params.check_band()
    J = params.J if params.J is not None else ps.n + 4
    levels = ExactLevels(ps, J)
    coeffs = {}
    for j1 in range(-1, J + 1):
        for j2 in range(-1, J + 1):
            tab = levels.level(j1, j2, method)
            values = tab.complex_values()
            for idx in tab.indices():
                coeffs[idx] = values[idx.m1, idx.m2, idx.l1 - 1, idx.l2 - 1]
    return quasi_norm_from_coefficients(ps.b, coeffs, params)


def parseval_l2(ps: PointSet, J: int | None = None, with_tail: bool = True) -> float:
    """Squared L2 norm of D from its Haar coefficients, truncated at level J.

    With ``with_tail`` the levels beyond J are added in closed form using
    sum_l |zeta**l - 1|**-2 = (b*b - 1)/12.
    """
    b, n = ps.b, ps.n
    J = n + 5 if J is None else J
    if J < 0:
        raise ValueError("J must be >= 0")
    if with_tail and J < n:
        raise ValueError(f"the closed-form tail needs J >= n (J={J}, n={n})")
    parts = []
    for j1 in range(-1, J + 1):
        for j2 in range(-1, J + 1):
            w = float(b) ** (max(0, j1) + max(0, j2))
            parts.append(w * level_parts(ps, j1, j2).lp_sum(2.0))
    total = math.fsum(parts)
    if with_tail:
        total += float(parseval_tail(b, J))
    return total


def parseval_tail(b: int, J: int) -> Fraction:
    """Exact Parseval contribution of all levels with max(j1, j2) > J, J >= n."""
    k2 = Fraction(b * b - 1, 12)
    rho = Fraction(1, b * b)
    geo_all = 1 / (1 - rho)
    geo_head = (1 - rho ** (J + 1)) / (1 - rho)
    fine = k2 * k2 / b**4 * (geo_all**2 - geo_head**2)
    rows = 2 * (k2 / 4) / b**2 * rho ** (J + 1) / (1 - rho)
    return fine + rows


# --- scaling study -----------------------------------------------------------


PATTERN_RULES: dict[str, Callable[[int], SignPattern]] = {
    "balanced": balanced_pattern,
    "identity": identity_pattern,
    "all_identity": identity_pattern,
}


@dataclass
class RateRow:
    n: int
    N: int
    norm: float
    reference: float

    @property
    def ratio(self) -> float:
        return self.norm / self.reference


@dataclass
class RateReport:
    b: int
    params: NormParams
    rule: str
    rows: list[RateRow]

    @property
    def ratios(self) -> list[float]:
        return [row.ratio for row in self.rows]

    def spread(self) -> float:
        return max(self.ratios) / min(self.ratios)

    def write_csv(self, fh: IO[str]) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "N", "norm", "reference", "ratio"])
        for row in self.rows:
            w.writerow([row.n, row.N, repr(row.norm), repr(row.reference), repr(row.ratio)])


def rate_reference(b: int, n: int, r: float, q: float) -> float:
    """b**(n(r-1)) * n**(1/q)."""
    return float(b) ** (n * (r - 1)) * (1.0 if q == INF else n ** (1.0 / q))


def rate_report(
    b: int,
    r: float,
    p: float,
    q: float,
    n_range: Sequence[int],
    pattern_rule: str = "balanced",
    reference: Callable[[int], float] | None = None,
) -> RateReport:
    """Quasi-norm of D_{R_n} against b**(n(r-1)) n**(1/q), with J = n + 4."""
    if pattern_rule not in PATTERN_RULES:
        raise ValueError(f"unknown pattern rule {pattern_rule!r}")
    ns = list(n_range)
    if not ns:
        raise ValueError("n_range is empty")
    base = NormParams(p, q, r)
    base.check_band()
    base.check_rate_hypothesis()
    rows = []
    for n in ns:
        ps = generate(b, n, PATTERN_RULES[pattern_rule](n))
        res = besov_quasi_norm(ps, NormParams(p, q, r, n + 4))
        ref = reference(n) if reference is not None else rate_reference(b, n, r, q)
        rows.append(RateRow(n, ps.size, res.value, ref))
    return RateReport(b, base, pattern_rule, rows)


# --- QMC integration demo ------------------------------------------------------


@dataclass(frozen=True)
class Integrand:
    name: str
    func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    exact: float
    exact_rational: Fraction | None = None


INTEGRANDS: dict[str, Integrand] = {
    "one": Integrand("one", lambda x, y: np.ones_like(x), 1.0, Fraction(1)),
    "x1x2": Integrand("x1x2", lambda x, y: x * y, 0.25, Fraction(1, 4)),
    "x1sq_x2sq": Integrand("x1sq_x2sq", lambda x, y: x * x * y * y, 1 / 9, Fraction(1, 9)),
    "bump": Integrand(
        "bump", lambda x, y: 36.0 * x * (1 - x) * y * (1 - y), 1.0, Fraction(1)
    ),
    "exp_sum": Integrand("exp_sum", lambda x, y: np.exp(x + y), (math.e - 1.0) ** 2),
    "cos_prod": Integrand(
        "cos_prod",
        lambda x, y: np.cos(0.5 * np.pi * x) * np.cos(0.5 * np.pi * y),
        (2.0 / math.pi) ** 2,
    ),
}

def _exact_mean(ps: PointSet, name: str) -> Fraction:
    """Exact (1/N) sum f(z) for polynomial integrands, f = sum c x^a y^e."""
    d = ps.den
    X = [int(v) for v in ps.xs]
    Y = [int(v) for v in ps.ys]
    if name == "one":
        return Fraction(1)
    total = Fraction(0)
    terms = {
        "x1x2": [(1, 1, 1)],
        "x1sq_x2sq": [(1, 2, 2)],
        "bump": [(36, 1, 1), (-36, 2, 1), (-36, 1, 2), (36, 2, 2)],
    }[name]
    for c, ax, ay in terms:
        s = sum(x**ax * y**ay for x, y in zip(X, Y))
        total += Fraction(c * s, d ** (ax + ay))
    return total / ps.size


def qmc_integrate(ps: PointSet, f: str) -> tuple[float, float]:
    """(estimate, estimate - exact integral) of the equal-weight rule on ps."""
    if f not in INTEGRANDS:
        raise ValueError(f"unknown integrand {f!r}; choose from {sorted(INTEGRANDS)}")
    entry = INTEGRANDS[f]
    if entry.exact_rational is not None:
        est = _exact_mean(ps, f)
        return float(est), float(est - entry.exact_rational)
    x = ps.xs / ps.den
    y = ps.ys / ps.den
    est = math.fsum(entry.func(x, y)) / ps.size
    return est, est - entry.exact


@dataclass
class QmcRow:
    n: int
    N: int
    estimate: float
    exact: float
    error: float


def qmc_series(b: int, f: str, n_range: Iterable[int], pattern_rule: str = "balanced") -> list[QmcRow]:
    rows = []
    for n in n_range:
        ps = generate(b, n, PATTERN_RULES[pattern_rule](n))
        est, err = qmc_integrate(ps, f)
        rows.append(QmcRow(n, ps.size, est, INTEGRANDS[f].exact, err))
    return rows


def write_qmc_csv(rows: Sequence[QmcRow], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "N", "estimate", "exact", "error"])
    for row in rows:
        w.writerow([row.n, row.N, repr(row.estimate), repr(row.exact), repr(row.error)])
