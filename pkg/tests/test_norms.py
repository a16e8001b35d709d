import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hambesov.discrepancy import l2_squared_exact
from hambesov.hammersley import generate, random_pattern
from hambesov.haar import HaarIndex
from hambesov.norms import (
    INTEGRANDS,
    NormParams,
    besov_quasi_norm,
    besov_quasi_norm_direct,
    level_parts,
    parseval_l2,
    parseval_tail,
    qmc_integrate,
    qmc_series,
    quasi_norm_from_coefficients,
    rate_reference,
    rate_report,
    tail_constant,
    write_qmc_csv,
)
from hambesov.tables import ExactLevels

INF = math.inf


def test_params_validation():
    for p, q, r in [(2, 2, 0.0), (1, INF, 0.9), (INF, 1, -0.5)]:
        NormParams(p, q, r).check_band()
    for p, q, r in [(2, 2, 0.5), (2, 2, -0.5), (1, 1, 1.0), (INF, 2, 0.0), (1, 1, 0.0)]:
        with pytest.raises(ValueError):
            NormParams(p, q, r).check_band()
        with pytest.raises(ValueError):
            besov_quasi_norm(generate(2, 2, "IR"), NormParams(p, q, r))
    for p, q in [(0.5, 2), (2, 0.9)]:
        with pytest.raises(ValueError):
            NormParams(p, q, 0.0)
    with pytest.raises(ValueError):
        NormParams(2, 2, 0.0, -1)
    with pytest.raises(ValueError):
        NormParams(2, 2, -0.1).check_rate_hypothesis()


def test_single_coefficient_norm():
    mu = 0.3 - 0.4j
    assert quasi_norm_from_coefficients(3, {HaarIndex(-1, -1): mu}, NormParams(1, 1, 0.0)) == pytest.approx(0.5)


def test_coefficient_norm_weights():
    # one coefficient at level (2, 1): weight b**(3 (r - 1/p + 1)) applied once
    b, prm = 2, NormParams(2, 3, 0.25)
    got = quasi_norm_from_coefficients(b, {HaarIndex(2, 1, 1, 0, 1, 1): 0.5}, prm)
    assert got == pytest.approx(0.5 * b ** (3 * (0.25 - 0.5 + 1)))


def test_direct_enumeration_example():
    ps = generate(2, 1, "I")
    prm = NormParams(2, 2, 0.0, 3)
    assert besov_quasi_norm(ps, prm).value == pytest.approx(besov_quasi_norm_direct(ps, prm), rel=1e-12, abs=0)


@pytest.mark.parametrize("b, n, pattern", [(2, 3, "RIR"), (3, 2, "IR"), (5, 2, "RI"), (2, 4, "IIRR")])
def test_level_parts_match_exact_tables(b, n, pattern):
    ps = generate(b, n, pattern)
    levels = ExactLevels(ps, n + 1)
    for j1 in range(-1, n + 2):
        for j2 in range(-1, n + 2):
            exact = np.sort(np.abs(levels.level(j1, j2, "oracle").complex_values()).ravel())
            parts = level_parts(ps, j1, j2)
            assert parts.count == exact.size
            flat = np.sort(np.concatenate([np.repeat(m, k) for m, k in parts.chunks]))
            # exact zeros come out as rounding noise far below the level's scale
            assert np.allclose(flat, exact, rtol=1e-12, atol=1e-12 * exact.max())


exponents = st.sampled_from([1.0, 1.5, 2.0, 3.0, INF])


@given(exponents, exponents, st.floats(0, 1), st.sampled_from([(2, 2, "IR"), (3, 2, "RR"), (2, 3, "IRI")]))
def test_monotone_and_honest_tail(p, q, t, case):
    b, n, pat = case
    lo = (1 / p if p != INF else 0) - 1
    hi = min(1 / p if p != INF else 0, 1)
    r = lo + (hi - lo) * (0.05 + 0.9 * t)
    ps = generate(b, n, pat)
    a = besov_quasi_norm(ps, NormParams(p, q, r, n))
    c = besov_quasi_norm(ps, NormParams(p, q, r, n + 2))
    assert c.value >= a.value * (1 - 1e-12)
    assert c.value - a.value <= a.tail_bound * (1 + 1e-9) + 1e-18


def test_requires_truncation_beyond_n():
    with pytest.raises(ValueError):
        besov_quasi_norm(generate(2, 3, "III"), NormParams(2, 2, 0.0, 2))


def test_parseval_example():
    ps = generate(2, 1, "I")
    assert abs(parseval_l2(ps, 8, with_tail=True) - 91 / 576) <= 1e-10


@pytest.mark.parametrize("b, expected", [(2, 0.25), (4, 1.25)])
def test_tail_identity_examples(b, expected):
    assert tail_constant(b) ** 2 == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("b", range(2, 11))
def test_tail_identity(b):
    assert abs(tail_constant(b) ** 2 - (b * b - 1) / 12) <= 1e-12


def test_tail_closed_form_against_partial_sums():
    # the Parseval tail beyond J equals the untruncated sum of levels J+1 .. J+40 up to rounding
    ps = generate(3, 2, "RI")
    J = 2
    head = parseval_l2(ps, J, with_tail=False)
    long = parseval_l2(ps, J + 12, with_tail=False)
    assert long - head == pytest.approx(float(parseval_tail(3, J) - parseval_tail(3, J + 12)), rel=1e-9)


def test_parseval_tail_makes_truncation_exact():
    ps = generate(2, 3, "IRR")
    exact = float(l2_squared_exact(ps))
    for J in (3, 4, 7):
        assert parseval_l2(ps, J) == pytest.approx(exact, rel=1e-13)
    assert parseval_l2(ps, 3, with_tail=False) < exact


@pytest.mark.parametrize("b", [2, 3])
def test_parseval_matches_warnock(b, rng):
    for n in range(1, 9):
        for _ in range(5):
            ps = generate(b, n, random_pattern(n, rng))
            exact = float(l2_squared_exact(ps))
            assert abs(parseval_l2(ps, n + 5) - exact) <= 1e-10 * exact


@pytest.mark.parametrize("b, n, pattern", [(2, 1, "I"), (2, 4, "IRRI"), (3, 3, "IIR"), (5, 2, "RR")])
def test_besov_and_parseval_weights(b, n, pattern):
    ps = generate(b, n, pattern)
    besov = besov_quasi_norm(ps, NormParams(2, 2, 0.0, n + 5)).value
    l2 = math.sqrt(parseval_l2(ps, n + 5, with_tail=False))
    assert 1 / b <= besov / l2 <= b


def test_rate_report_shape():
    rep = rate_report(3, 0.1, 2, 2, [2, 3, 4], "balanced")
    assert [row.n for row in rep.rows] == [2, 3, 4]
    assert [row.N for row in rep.rows] == [9, 27, 81]
    for row in rep.rows:
        assert row.reference == pytest.approx(3 ** (row.n * (0.1 - 1)) * row.n**0.5)
        assert row.reference > 0
        assert row.ratio == row.norm / row.reference
    buf = io.StringIO()
    rep.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "n,N,norm,reference,ratio" and len(lines) == 4


def test_rate_report_rejects_bad_input():
    with pytest.raises(ValueError):
        rate_report(2, 0.6, 2, 2, [3], "balanced")
    with pytest.raises(ValueError):
        rate_report(2, 0.0, 2, 2, [], "balanced")
    with pytest.raises(ValueError):
        rate_report(2, 0.0, 2, 2, [3], "sorted")


def test_rate_reference_q_infinite():
    assert rate_reference(2, 5, 0.0, INF) == 2.0**-5


def test_qmc_examples():
    ps = generate(2, 1, "I")
    assert qmc_integrate(ps, "one") == (1.0, 0.0)
    assert qmc_integrate(ps, "x1x2") == (0.125, -0.125)
    with pytest.raises(ValueError):
        qmc_integrate(ps, "sinc")


def test_qmc_error_decreases():
    rows = qmc_series(2, "x1x2", range(4, 15))
    errs = [abs(r.error) for r in rows]
    assert all(a > c for a, c in zip(errs, errs[1:]))
    # roughly N**-1: N * |error| stays within a factor 4 over the range
    scaled = [r.N * abs(r.error) for r in rows]
    assert max(scaled) / min(scaled) < 4


@pytest.mark.parametrize("name", sorted(INTEGRANDS))
def test_integrand_exact_values(name):
    entry = INTEGRANDS[name]
    # midpoint rule on a fine grid reproduces the stored integral
    g = (np.arange(2000) + 0.5) / 2000
    x, y = np.meshgrid(g, g)
    assert entry.func(x, y).mean() == pytest.approx(entry.exact, rel=1e-6)
    if entry.exact_rational is not None:
        assert float(entry.exact_rational) == pytest.approx(entry.exact, rel=1e-15)


def test_qmc_exact_and_float_paths_agree():
    ps = generate(3, 4, "IRRI")
    for name in ("x1x2", "x1sq_x2sq", "bump"):
        est, err = qmc_integrate(ps, name)
        x, y = ps.xs / ps.den, ps.ys / ps.den
        assert est == pytest.approx(INTEGRANDS[name].func(x, y).mean(), rel=1e-12)
        assert err == pytest.approx(est - INTEGRANDS[name].exact, abs=1e-15)


def test_qmc_csv():
    buf = io.StringIO()
    write_qmc_csv(qmc_series(2, "x1x2", [1, 2]), buf)
    assert buf.getvalue().splitlines() == [
        "n,N,estimate,exact,error",
        "1,2,0.0,0.25,-0.25",
        "2,4,0.140625,0.25,-0.109375",
    ]
