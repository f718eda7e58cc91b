import math

import numpy as np
import pytest

from pgfclt.cumulants import (
    CumulantSeq,
    cumulants_from_roots,
    dominant_term_search,
    negcos_extrema,
    tail_ratio,
    tame_cumulants,
)
from pgfclt.dist import cumulants_from_pmf
from pgfclt.errors import PreconditionError, RootAtOneError
from pgfclt.gen import random_pgf, random_seed_product
from pgfclt.roots import PGFPoly, RootSet, find_roots


def seq(a_by_order: dict, J: int) -> CumulantSeq:
    a = np.zeros(J + 1)
    for j, v in a_by_order.items():
        a[j] = v
    kappa = np.array([a[j] * math.factorial(j) for j in range(J + 1)])
    return CumulantSeq(a=a, kappa=kappa, J=J)


# --- cumulants from roots ---------------------------------------------------


def test_single_root_is_bernoulli():
    rs = find_roots(PGFPoly(np.array([0.5, 0.5])))
    cs = cumulants_from_roots(rs, 8)
    assert cs.kappa[1] == pytest.approx(0.5, abs=1e-14)
    assert cs.kappa[2] == pytest.approx(0.25, abs=1e-14)
    assert cs.kappa[4] == pytest.approx(-0.125, abs=1e-13)


def test_double_root_additivity():
    rs = find_roots(PGFPoly(np.array([0.25, 0.5, 0.25])))
    cs = cumulants_from_roots(rs, 6)
    assert cs.kappa[2] == pytest.approx(0.5, abs=1e-10)


def test_imaginary_pair():
    rs = find_roots(PGFPoly(np.array([0.5, 0.0, 0.5])))
    cs = cumulants_from_roots(rs, 6)
    assert cs.kappa[1] == pytest.approx(1.0, abs=1e-12)
    assert cs.kappa[2] == pytest.approx(1.0, abs=1e-12)


def test_root_at_one_rejected():
    rs = RootSet(roots=((1.0 + 0j, 1),), c_x=0.0, n_inside=0)
    with pytest.raises(RootAtOneError):
        cumulants_from_roots(rs, 4)


def test_roots_route_matches_pmf_route():
    rng = np.random.default_rng(23)
    for _ in range(60):
        poly = random_pgf(rng, int(rng.integers(1, 31)))
        by_roots = cumulants_from_roots(find_roots(poly), 8)
        by_pmf = cumulants_from_pmf(poly.to_pmf(), 8)
        for j in range(1, 9):
            scale = max(1.0, abs(by_pmf.kappa[j]))
            assert by_roots.kappa[j] == pytest.approx(by_pmf.kappa[j], rel=1e-8, abs=1e-8 * scale)


# --- tail ratio --------------------------------------------------------------


def test_tail_ratio_single_term():
    cs = seq({2: 1.0}, 8)
    assert tail_ratio(cs, 1.0, 2) == 1.0
    assert tail_ratio(cs, 1.0, 3) == 0.0


def test_tail_ratio_geometric():
    J = 60
    cs = seq({j: 2.0**-j for j in range(2, J + 1)}, J)
    # sums 2^-j from 4 and from 2: ratio -> (1/8)/(1/2) = 1/4
    assert tail_ratio(cs, 1.0, 4) == pytest.approx(0.25, rel=1e-12)


def test_tail_ratio_zero_denominator():
    with pytest.raises(PreconditionError):
        tail_ratio(seq({}, 6), 0.5, 2)


def test_tail_decay_for_zero_free_pgfs():
    # zero-free in B(1, 16 eps) with nonzero tail sum: the tail fraction must
    # sink below 3^390 * 2^-L -- near-vacuous, so track the real ratio too.
    rng = np.random.default_rng(31)
    log_bound = 390 * math.log(3.0)
    worst = 0.0
    for _ in range(25):
        poly = random_seed_product(rng, int(rng.integers(2, 6)), math.pi / 2)
        cs = cumulants_from_pmf(poly.to_pmf(), 32)
        eps = min(2.0, math.sqrt(2.0) / 16.0)  # roots at distance >= sqrt(2) from 1
        for L in range(2, 33):
            r = tail_ratio(cs, eps, L)
            assert math.log(max(r, 1e-300)) <= log_bound - L * math.log(2.0)
            worst = max(worst, r * 2.0**L)
    print(f"\nempirical max of tail_ratio * 2^L: {worst:.6g} (constant in force: 3^390)")


# --- dominant term search ----------------------------------------------------


def test_search_trace_single():
    assert dominant_term_search([1, 0, 0], 1.0, 1.0, 1) == (1, 0.5)


def test_search_trace_two_terms():
    ell, s_star = dominant_term_search([1, 1], 1.0, 1.0, 2)
    assert ell == 1
    assert s_star == pytest.approx(1.0 / 32.0)


def test_search_precondition():
    with pytest.raises(PreconditionError):
        dominant_term_search([0, 0, 1], 1.0, 1.0, 2)  # head 0 < tail


def test_search_property_suite():
    rng = np.random.default_rng(101)
    n_checked = 0
    while n_checked < 2000:
        length = int(rng.integers(1, 12))
        c = np.where(rng.random(length) < 0.25, 0.0, rng.uniform(0.0, 4.0, length))
        if not np.any(c > 0):
            continue
        s = float(rng.uniform(0.05, 2.0))
        A = float(rng.uniform(1.0, 4.0))
        L = int(rng.integers(1, length + 1))
        powers = np.arange(1, length + 1, dtype=float)
        terms = c * s**powers
        if not terms[:L].sum() > terms[L:].sum():
            continue
        ell, s_star = dominant_term_search(c, s, A, L)
        # postconditions re-verified here, independently of the module's own check
        star_terms = c * s_star**powers
        assert star_terms[ell - 1] > A * (star_terms.sum() - star_terms[ell - 1])
        assert s_star > s * (16.0 * A) ** -(L + 1)
        assert 1 <= ell <= L
        n_checked += 1


# --- taming ------------------------------------------------------------------


def test_tame_only_a2():
    cs = seq({2: 1.0}, 8)
    s_star = tame_cumulants(cs, 0.25, 4)
    assert s_star > 0.25 * 2.0 ** (-30)


def test_tame_bernoulli():
    cs = cumulants_from_pmf(PGFPoly(np.array([0.5, 0.5])).to_pmf(), 8)
    s_star = tame_cumulants(cs, 0.25, 4)
    assert abs(cs.a[2]) >= s_star**2 * abs(cs.a[4])


def test_tame_zero_tail_rejected():
    with pytest.raises(PreconditionError):
        tame_cumulants(seq({}, 8), 0.25, 4)


def test_tame_property_suite():
    rng = np.random.default_rng(57)
    checked = 0
    while checked < 300:
        poly = random_pgf(rng, int(rng.integers(2, 21)))
        cs = cumulants_from_pmf(poly.to_pmf(), 32)
        s = float(rng.uniform(0.05, 0.49))
        L = int(rng.integers(2, 12))
        try:
            s_star = tame_cumulants(cs, s, L)
        except PreconditionError:
            continue  # cutoff did not hold for this (s, L); not a failure
        assert s_star > s * 2.0 ** (-6.0 * (L + 1))
        for j in range(3, 33):
            assert abs(cs.a[2]) >= s_star ** (j - 2) * abs(cs.a[j]) * (1 - 1e-9)
        checked += 1


# --- trigonometric extrema ---------------------------------------------------


def test_negcos_j3_sample_points():
    theta = 4 * math.pi / 3
    assert math.cos(theta) ** 3 - math.cos(3 * theta) == pytest.approx(-9.0 / 8.0)
    theta = math.pi / 3
    assert math.cos(theta) ** 3 - math.cos(3 * theta) == pytest.approx(9.0 / 8.0)
    lo, hi = negcos_extrema(3)
    assert lo <= -9.0 / 8.0 + 1e-9
    assert hi >= 9.0 / 8.0 - 1e-9


@pytest.mark.parametrize("j", range(3, 51))
def test_negcos_bounds(j):
    lo, hi = negcos_extrema(j)
    assert lo < -0.5
    assert hi > 0.5


def test_negcos_requires_j3():
    with pytest.raises(PreconditionError):
        negcos_extrema(2)
