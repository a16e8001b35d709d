"""Invariant and acceptance checks shared by the ``verify`` command and the tests.

Every check returns a :class:`Check`; ``scale`` is ``"quick"`` (the whole
suite in well under a minute) or ``"full"`` (the sizes used by the test
suite). Randomized sampling draws from one ``random.Random(seed)``.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import digitsums as ds
from .discrepancy import eval_discrepancy, eval_discrepancy_float, l2_squared_exact
from .hammersley import SignPattern, all_patterns, generate, random_pattern, verify_net
from .haar import (
    HaarIndex,
    Regime,
    classify_regime,
    coeff_bound,
    coeff_discrepancy_fast,
    coeff_discrepancy_pointwise,
    coeff_oracle,
    corner_coefficient,
    haar_value_1d,
)
from .norms import (
    NormParams,
    besov_quasi_norm,
    besov_quasi_norm_direct,
    parseval_l2,
    rate_report,
    tail_constant,
)
from .numeric import CycloValue, cyclo_mul, to_complex, zeta_pow
from .tables import ExactLevels

SCALES = ("quick", "full")
INF = math.inf


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float | None = None  # kept out of line() so output is reproducible

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _patterns(n: int, count: int, rng: random.Random) -> list[SignPattern]:
    if 2**n <= count:
        return list(all_patterns(n))
    return [random_pattern(n, rng) for _ in range(count)]


# --- invariants ---------------------------------------------------------------


def check_cyclotomic_product(scale: str, rng: random.Random) -> Check:
    bad = []
    for b in range(2, 13):
        prod = CycloValue.from_rational(b, 1)
        for l in range(1, b):
            prod = prod * (1 - zeta_pow(b, l))
        if prod != b:
            bad.append(b)
    return Check("cyclotomic-product", not bad, f"prod (1 - zeta**l) = b for b in 2..12; failures {bad}")


def check_cyclo_mul(scale: str, rng: random.Random) -> Check:
    pairs = 1000 if scale == "full" else 100
    worst = 0.0
    for b in (2, 3, 4, 5, 6):
        for _ in range(pairs):
            a = CycloValue.from_unreduced(b, [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(b)])
            c = CycloValue.from_unreduced(b, [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(b)])
            worst = max(worst, abs(to_complex(cyclo_mul(a, c)) - to_complex(a) * to_complex(c)))
    return Check("cyclo-mul-float", worst <= 1e-10, f"max |float(a*c) - float(a)*float(c)| = {worst:.3g}")


def check_permutation(scale: str, rng: random.Random) -> Check:
    bad = []
    for b, n in [(2, 6), (3, 4), (5, 3), (7, 2)]:
        for pat in _patterns(n, 4, rng):
            ps = generate(b, n, pat)
            ok = all(np.array_equal(np.sort(v), np.arange(b**n)) for v in (ps.xs, ps.ys))
            if not ok or generate(b, n, pat) != ps:
                bad.append((b, n, str(pat)))
    return Check("permutation-determinism", not bad, f"coordinates * b**n are permutations, reruns identical; failures {bad}")


def check_discrepancy_basics(scale: str, rng: random.Random) -> Check:
    bad = []
    for b, n in [(2, 5), (3, 3), (5, 2)]:
        for pat in _patterns(n, 3, rng):
            ps = generate(b, n, pat)
            if eval_discrepancy(ps, Fraction(1), Fraction(1)) != 0 or l2_squared_exact(ps) < 0:
                bad.append((b, n, str(pat)))
    return Check("discrepancy-basics", not bad, f"D(1,1) = 0 and L2**2 >= 0; failures {bad}")


def check_monte_carlo(scale: str, rng: random.Random) -> Check:
    samples = 100_000 if scale == "full" else 20_000
    cases = [(2, n) for n in range(1, 7)] + [(3, n) for n in range(1, 7)]
    if scale == "quick":
        cases = [(2, 3), (2, 6), (3, 2), (3, 5)]
    nprng = np.random.default_rng(rng.randrange(2**32))
    worst = 0.0
    for b, n in cases:
        ps = generate(b, n, random_pattern(n, rng))
        x, y = nprng.random(samples), nprng.random(samples)
        d2 = eval_discrepancy_float(ps, x, y) ** 2
        se = d2.std(ddof=1) / math.sqrt(samples)
        worst = max(worst, abs(d2.mean() - float(l2_squared_exact(ps))) / se)
    return Check("monte-carlo-l2", worst <= 3.0, f"max |MC - exact| = {worst:.2f} standard errors")


def _inner_1d(b: int, a: tuple[int, int, int], c: tuple[int, int, int]) -> CycloValue:
    """Exact int h_a * conj(h_c) over [0, 1) for 1-D indices (j, m, l)."""
    level = max(a[0], c[0]) + 1
    cells = b**level
    total = CycloValue.zero(b)
    for k in range(cells):
        x = Fraction(k, cells)
        total = total + haar_value_1d(b, *a, x) * haar_value_1d(b, *c, x).conjugate()
    return total / cells


def _random_axis(b: int, jmax: int, rng: random.Random) -> tuple[int, int, int]:
    j = rng.randint(-1, jmax)
    if j == -1:
        return (-1, 0, 1)
    return (j, rng.randrange(b**j), rng.randint(1, b - 1))


def check_orthonormality(scale: str, rng: random.Random) -> Check:
    pairs = 200 if scale == "full" else 40
    bad = 0
    for b in (2, 3):
        for t in range(pairs):
            a = (_random_axis(b, 2, rng), _random_axis(b, 2, rng))
            # every fourth pair repeats an index, the rest share an axis half the time
            if t % 4 == 0:
                c = a
            else:
                c = (a[0] if rng.random() < 0.5 else _random_axis(b, 2, rng), _random_axis(b, 2, rng))
            inner = _inner_1d(b, a[0], c[0]) * _inner_1d(b, a[1], c[1])
            norm2 = Fraction(1, b ** (max(0, a[0][0]) + max(0, a[1][0])))
            expected = norm2 if a == c else 0
            bad += inner != expected
    return Check("haar-orthonormality", bad == 0, f"{bad} wrong inner products over {2 * pairs} pairs")


def check_scalar_coefficients(scale: str, rng: random.Random) -> Check:
    """Scalar fast / pointwise / per-child oracle on sampled indices."""
    samples = 150 if scale == "full" else 40
    bad = 0
    for b, n in [(2, 3), (3, 2)]:
        ps = generate(b, n, random_pattern(n, rng))
        for _ in range(samples):
            idx = _sample_index(b, n + 1, rng)
            v = coeff_oracle(ps, idx)
            bad += not (coeff_discrepancy_fast(ps, idx) == v == coeff_discrepancy_pointwise(ps, idx))
    return Check("scalar-coefficients", bad == 0, f"{bad} scalar mismatches over {2 * samples} sampled indices")


def _sample_index(b: int, jmax: int, rng: random.Random) -> HaarIndex:
    (j1, m1, l1), (j2, m2, l2) = _random_axis(b, jmax, rng), _random_axis(b, jmax, rng)
    return HaarIndex(j1, j2, m1, m2, l1, l2)


def check_coarse_independence(scale: str, rng: random.Random) -> Check:
    bad = []
    for b, n in [(2, 5), (3, 4)]:
        ps = generate(b, n, random_pattern(n, rng))
        levels = ExactLevels(ps, n)
        for j1 in range(n):
            for j2 in range(n):
                if classify_regime((j1, j2), n) is not Regime.COARSE:
                    continue
                numer = levels.level(j1, j2, "pointwise").numer
                if not (numer == numer[:1, :1]).all():
                    bad.append((b, j1, j2))
    return Check("coarse-m-independence", not bad, f"Coarse levels constant in m; failures {bad}")


def check_lemma_corner_sum(scale: str, rng: random.Random) -> Check:
    bad = []
    for b in (2, 3):
        for n in range(1, 6):
            for pat in _patterns(n, 6, rng):
                ps = generate(b, n, pat)
                s = ds.corner_sum(ps)
                if s != ds.corner_sum_closed(b, n, ps.a):
                    bad.append((b, n, str(pat)))
                if s / b**n - Fraction(1, 4) != coeff_discrepancy_fast(ps, HaarIndex(-1, -1)):
                    bad.append((b, n, str(pat), "corner"))
    return Check("corner-sum-identity", not bad, f"sum (1-z1)(1-z2) = 1 + b**(-n-1) * cross sum; failures {bad}")


def check_besov_consistency(scale: str, rng: random.Random) -> Check:
    """Direct enumeration, monotonicity in J, tail honesty, L2-weight comparison."""
    problems = []
    cases = [(2, 1, "I"), (2, 3, "IRI"), (3, 2, "RI")] + ([(2, 4, "IRRI"), (3, 3, "IIR")] if scale == "full" else [])
    grid = [(2, 2, 0.0), (1, 1, 0.3), (2, INF, 0.25), (INF, 2, -0.4), (1.5, 3, -0.2)]
    for b, n, pat in cases:
        ps = generate(b, n, pat)
        for p, q, r in grid:
            J = n + 1
            prm = NormParams(p, q, r, J)
            res = besov_quasi_norm(ps, prm)
            direct = besov_quasi_norm_direct(ps, prm)
            if abs(res.value - direct) > 1e-12 * max(direct, 1e-300):
                problems.append(("direct", b, n, p, q, r))
            later = besov_quasi_norm(ps, NormParams(p, q, r, J + 2)).value
            if q != INF and later < res.value:
                problems.append(("monotone", b, n, p, q, r))
            if later - res.value > res.tail_bound * (1 + 1e-9) + 1e-18:
                problems.append(("tail", b, n, p, q, r))
        besov = besov_quasi_norm(ps, NormParams(2, 2, 0.0, n + 5)).value
        l2 = math.sqrt(parseval_l2(ps, n + 5, with_tail=False))
        if not 1 / b <= besov / l2 <= b:
            problems.append(("l2-ratio", b, n))
    return Check("besov-consistency", not problems, f"direct/monotone/tail/L2-ratio problems: {problems}")



# --- acceptance criteria ------------------------------------------------------


def acceptance_net(scale: str, rng: random.Random) -> Check:
    t0 = time.perf_counter()
    count = 10 if scale == "full" else 3
    bad = []
    boxes = 0
    for b in (2, 3, 5):
        for n in range(1, 7):
            for pat in _patterns(n, count, rng):
                ps = generate(b, n, pat)
                for j1 in range(n + 1):
                    for j2 in range(n + 1 - j1):
                        boxes += b ** (j1 + j2)
                        if not verify_net(ps, j1, j2):
                            bad.append((b, n, str(pat), j1, j2))
    dt = time.perf_counter() - t0
    return Check("1 net property", not bad and dt < 10, f"{boxes} boxes, failures {bad[:5]}", dt)


def acceptance_triple(scale: str, rng: random.Random) -> Check:
    t0 = time.perf_counter()
    count = 5 if scale == "full" else 2
    nmax = 4 if scale == "full" else 3
    bad = []
    coeffs = 0
    for b in (2, 3):
        for n in range(1, nmax + 1):
            for pat in _patterns(n, count, rng):
                levels = ExactLevels(generate(b, n, pat), n + 2)
                for j1, j2 in itertools.product(range(-1, n + 3), repeat=2):
                    fast, point, oracle = (levels.level(j1, j2, m).numer for m in ("fast", "pointwise", "oracle"))
                    coeffs += fast.shape[0] * fast.shape[1] * fast.shape[2] * fast.shape[3]
                    if not (np.array_equal(fast, point) and np.array_equal(fast, oracle)):
                        bad.append((b, n, str(pat), j1, j2))
    dt = time.perf_counter() - t0
    return Check("2 coefficient triple agreement", not bad and dt < 60, f"{coeffs} coefficients, failures {bad[:5]}", dt)


def acceptance_digit_sums(scale: str, rng: random.Random) -> Check:
    t0 = time.perf_counter()
    nmax = 4 if scale == "full" else 3
    bad = []
    for b in (2, 3, 4):
        for n in range(1, nmax + 1):
            for name, closed, brute in [
                ("x", ds.x_sum, ds.x_sum_brute),
                ("y", ds.y_sum, ds.y_sum_brute),
                ("z", ds.z_sum, ds.z_sum_brute),
            ]:
                if closed(b, n) != brute(b, n):
                    bad.append((name, b, n))
            for pat in all_patterns(n):
                if ds.cross_sum_brute(b, n, pat) != ds.cross_sum(b, n, pat.identity_count):
                    bad.append(("cross", b, n, str(pat)))
    dt = time.perf_counter() - t0
    return Check("3 digit-sum identities", not bad and dt < 20, f"failures {bad[:5]}", dt)


def acceptance_corner(scale: str, rng: random.Random) -> Check:
    count = 20 if scale == "full" else 5
    bad = []
    spot = corner_coefficient(2, 1, 1)
    for b in range(2, 6):
        for n in range(1, 7):
            for pat in _patterns(n, count, rng):
                ps = generate(b, n, pat)
                if ds.corner_sum(ps) / b**n - Fraction(1, 4) != corner_coefficient(b, n, ps.a):
                    bad.append((b, n, str(pat)))
    ok = not bad and spot == Fraction(3, 8)
    return Check("4 corner coefficient", ok, f"spot b=2 n=1 a=1 -> {spot}, failures {bad[:5]}")


def acceptance_parseval(scale: str, rng: random.Random) -> Check:
    nmax = 8 if scale == "full" else 6
    worst = 0.0
    for b in (2, 3):
        for n in range(1, nmax + 1):
            if scale == "quick" and b == 3 and n > 5:
                continue
            ps = generate(b, n, random_pattern(n, rng))
            exact = l2_squared_exact(ps)
            worst = max(worst, abs(parseval_l2(ps, n + 5) - float(exact)) / float(exact))
    spot_ps = generate(2, 1, "I")
    spot = l2_squared_exact(spot_ps)
    spot_err = abs(parseval_l2(spot_ps, 6) - 91 / 576)
    ok = worst <= 1e-10 and spot == Fraction(91, 576) and spot_err <= 1e-10
    return Check("5 Parseval vs Warnock", ok, f"max relative error {worst:.2e}; spot {spot} (Parseval off by {spot_err:.1e})")


@dataclass(frozen=True)
class RateFindings:
    balanced_spread: float
    identity_growth: float
    identity_monotone: bool
    identity_linear_spread: float
    seconds: float

    @property
    def balanced_ok(self) -> bool:
        return self.balanced_spread < 2 and self.seconds < 300

    @property
    def discriminator_ok(self) -> bool:
        return self.identity_monotone and self.identity_growth >= 0.30

    @property
    def linear_ok(self) -> bool:
        return self.identity_linear_spread < 2


def rate_findings(ns=range(8, 15)) -> RateFindings:
    t0 = time.perf_counter()
    bal = rate_report(2, 0.0, 2, 2, ns, "balanced")
    ident = rate_report(2, 0.0, 2, 2, ns, "identity")
    ratios = ident.ratios
    linear = [row.norm / (2.0**-row.n * row.n) for row in ident.rows]
    return RateFindings(
        balanced_spread=bal.spread(),
        identity_growth=ratios[-1] / ratios[0] - 1,
        identity_monotone=all(a < c for a, c in zip(ratios, ratios[1:])),
        identity_linear_spread=max(linear) / min(linear),
        seconds=time.perf_counter() - t0,
    )


def acceptance_rate(scale: str, rng: random.Random) -> Check:
    f = rate_findings()
    ok = f.balanced_ok and f.discriminator_ok and f.linear_ok
    return Check(
        "6 rate b**(n(r-1)) n**(1/q)",
        ok,
        f"balanced max/min {f.balanced_spread:.3f} (<2: {f.balanced_ok}); "
        f"all-identity ratio growth {100 * f.identity_growth:.1f}% monotone={f.identity_monotone} (>=30%: {f.discriminator_ok}); "
        f"all-identity vs 2**-n n max/min {f.identity_linear_spread:.3f} (<2: {f.linear_ok})",
        f.seconds,
    )


def magnitude_audit(b: int = 2, n: int = 4, patterns=None, rng: random.Random | None = None):
    """(measured C, worst deviation count, per-level counts) over all levels up to n+2."""
    if patterns is None:
        patterns = _patterns(n, 5, rng or random.Random(0))
    C = 0.0
    worst = 0
    counts = {}
    for pat in patterns:
        ps = generate(b, n, pat)
        levels = ExactLevels(ps, n + 2)
        for j1, j2 in itertools.product(range(-1, n + 3), repeat=2):
            tab = levels.level(j1, j2, "fast")
            mags = np.abs(tab.complex_values())
            for idx in tab.indices():
                mu = mags[idx.m1, idx.m2, idx.l1 - 1, idx.l2 - 1]
                bound = coeff_bound(idx, ps)
                if bound == 0:
                    if mu > 1e-15:
                        C = math.inf
                    continue
                C = max(C, mu / bound)
            if 0 <= j1 <= n and 0 <= j2 <= n and j1 + j2 >= n - 1:
                inv = 1 / np.abs(np.exp(2j * np.pi * np.arange(1, b) / b) - 1)
                vol = b ** (-2.0 * j1 - 2 * j2 - 2) * np.multiply.outer(inv, inv)
                dev = int(np.count_nonzero(~np.isclose(mags, vol[None, None], rtol=1e-9, atol=0)))
                counts[(str(pat), j1, j2)] = dev
                worst = max(worst, dev)
    return C, worst, counts


def acceptance_magnitudes(scale: str, rng: random.Random) -> Check:
    b, n = 2, 4
    C, worst, _ = magnitude_audit(b, n, _patterns(n, 5 if scale == "full" else 2, rng))
    ok = C <= 4 and worst <= b**n
    return Check("7 magnitude audit", ok, f"measured C = {C:.4f} (<= 4); max deviations per level {worst} (<= {b**n})")


def acceptance_tail_constant(scale: str, rng: random.Random) -> Check:
    worst = max(abs(tail_constant(b) ** 2 - (b * b - 1) / 12) for b in range(2, 11))
    return Check("8 tail constant", worst <= 1e-12, f"max |sum |zeta**l - 1|**-2 - (b*b-1)/12| = {worst:.2e} for b in 2..10")


INVARIANTS: dict[str, Callable[[str, random.Random], Check]] = {
    "cyclotomic-product": check_cyclotomic_product,
    "cyclo-mul-float": check_cyclo_mul,
    "permutation-determinism": check_permutation,
    "discrepancy-basics": check_discrepancy_basics,
    "monte-carlo-l2": check_monte_carlo,
    "haar-orthonormality": check_orthonormality,
    "scalar-coefficients": check_scalar_coefficients,
    "coarse-m-independence": check_coarse_independence,
    "corner-sum-identity": check_lemma_corner_sum,
    "besov-consistency": check_besov_consistency,
}

ACCEPTANCE: dict[str, Callable[[str, random.Random], Check]] = {
    "net": acceptance_net,
    "triple": acceptance_triple,
    "digit-sums": acceptance_digit_sums,
    "corner": acceptance_corner,
    "parseval": acceptance_parseval,
    "rate": acceptance_rate,
    "magnitudes": acceptance_magnitudes,
    "tail-constant": acceptance_tail_constant,
}


def run_all(scale: str = "quick", seed: int = 0, skip=()):
    """Yield checks one at a time so callers can stream results."""
    if scale not in SCALES:
        raise ValueError(f"scale must be one of {SCALES}")
    unknown = set(skip) - set(INVARIANTS) - set(ACCEPTANCE)
    if unknown:
        raise ValueError(f"unknown check names: {sorted(unknown)}")
    rng = random.Random(seed)
    for name, fn in itertools.chain(INVARIANTS.items(), ACCEPTANCE.items()):
        if name not in skip:
            yield fn(scale, rng)
