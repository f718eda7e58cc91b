import math

import numpy as np
import pytest
from scipy.special import ndtr

from pgfclt.dist import (
    DiscretePMF,
    convolve,
    cumulants_from_pmf,
    kolmogorov_distance,
    moments,
    scale_support,
)
from pgfclt.errors import (
    DegenerateDistributionError,
    NotAPGFError,
    PreconditionError,
    SpanMismatchError,
)
from pgfclt.gen import binomial_pgf

BERNOULLI = np.array([0.5, 0.5])


def test_moments_point_mass():
    m = moments(DiscretePMF(np.array([1.0])))
    assert m.mu == 0.0 and m.sigma2 == 0.0


def test_moments_bernoulli():
    m = moments(DiscretePMF(BERNOULLI))
    assert m.mu == pytest.approx(0.5, abs=1e-15)
    assert m.sigma2 == pytest.approx(0.25, abs=1e-15)


def test_moments_three_point():
    m = moments(DiscretePMF(np.array([0.25, 0.5, 0.25])))
    assert m.mu == pytest.approx(1.0, abs=1e-15)
    assert m.sigma2 == pytest.approx(0.5, abs=1e-15)


def test_cumulants_point_mass():
    pmf = DiscretePMF(np.array([0.0, 0.0, 0.0, 1.0]))
    cs = cumulants_from_pmf(pmf, 8)
    assert cs.kappa[1] == pytest.approx(3.0)
    assert np.allclose(cs.kappa[2:], 0.0, atol=1e-12)


def test_cumulants_bernoulli_against_symbolic():
    # oracle: d^j/dw^j log((1 + e^w)/2) at w = 0, evaluated symbolically once
    expected = {1: 0.5, 2: 0.25, 3: 0.0, 4: -0.125, 5: 0.0, 6: 0.25}
    cs = cumulants_from_pmf(DiscretePMF(BERNOULLI), 6)
    for j, val in expected.items():
        assert cs.kappa[j] == pytest.approx(val, abs=1e-13)
    assert cs.a[4] == pytest.approx(-1.0 / 192.0, abs=1e-15)


def test_cumulant_additivity_under_convolution():
    rng = np.random.default_rng(11)
    for _ in range(20):
        p = DiscretePMF(rng.dirichlet(np.ones(rng.integers(2, 9))))
        q = DiscretePMF(rng.dirichlet(np.ones(rng.integers(2, 9))))
        cp, cq = cumulants_from_pmf(p, 8), cumulants_from_pmf(q, 8)
        cc = cumulants_from_pmf(convolve(p, q), 8)
        for j in range(1, 9):
            target = cp.kappa[j] + cq.kappa[j]
            scale = max(1.0, abs(target))
            assert cc.kappa[j] == pytest.approx(target, rel=1e-9, abs=1e-9 * scale)


def test_convolve_identity_and_examples():
    point = DiscretePMF(np.array([1.0]))
    p = DiscretePMF(np.array([0.3, 0.2, 0.5]))
    assert np.allclose(convolve(point, p).probs, p.probs)
    two = convolve(DiscretePMF(BERNOULLI), DiscretePMF(BERNOULLI))
    assert np.allclose(two.probs, [0.25, 0.5, 0.25])
    mixed = convolve(DiscretePMF(BERNOULLI), DiscretePMF(np.array([1 / 3, 2 / 3])))
    assert np.allclose(mixed.probs, [1 / 6, 1 / 2, 1 / 3])


def test_convolve_span_mismatch():
    with pytest.raises(SpanMismatchError):
        convolve(DiscretePMF(BERNOULLI, span=1), DiscretePMF(BERNOULLI, span=2))


def test_scale_support():
    b = DiscretePMF(BERNOULLI)
    assert scale_support(b, 1) is b
    doubled = scale_support(b, 2)
    assert doubled.span == 2
    assert moments(doubled).sigma == pytest.approx(1.0)
    tripled = scale_support(DiscretePMF(np.array([0.25, 0.5, 0.25])), 3)
    assert np.allclose(tripled.atoms(), [0, 3, 6])
    assert moments(tripled).sigma == pytest.approx(3 * math.sqrt(0.5))
    with pytest.raises(PreconditionError):
        scale_support(b, 0)


def test_kolmogorov_bernoulli_closed_form():
    D = kolmogorov_distance(DiscretePMF(BERNOULLI))
    assert abs(D - (ndtr(1.0) - 0.5)) <= 1e-12


def test_kolmogorov_point_mass_errors():
    with pytest.raises(DegenerateDistributionError):
        kolmogorov_distance(DiscretePMF(np.array([1.0])))


def test_kolmogorov_binomial_against_lattice_asymptotic():
    pmf = binomial_pgf(100).to_pmf()
    D = kolmogorov_distance(pmf)
    target = 1.0 / (2.0 * 5.0 * math.sqrt(2 * math.pi))  # sigma = 5
    assert abs(D - target) / target < 0.2


def test_kolmogorov_scale_invariance():
    rng = np.random.default_rng(3)
    for _ in range(10):
        pmf = DiscretePMF(rng.dirichlet(np.ones(rng.integers(3, 12))))
        base = kolmogorov_distance(pmf)
        for k in (2, 3, 7):
            assert kolmogorov_distance(scale_support(pmf, k)) == base


def test_kolmogorov_zero_padding_invariance():
    pmf = DiscretePMF(np.array([0.25, 0.5, 0.25]))
    padded = DiscretePMF(np.array([0.25, 0.5, 0.25, 0.0, 0.0]))
    assert kolmogorov_distance(padded) == kolmogorov_distance(pmf)


def test_moments_agree_with_cumulants():
    rng = np.random.default_rng(5)
    for _ in range(20):
        pmf = DiscretePMF(rng.dirichlet(np.ones(rng.integers(2, 20))))
        m = moments(pmf)
        cs = cumulants_from_pmf(pmf, 4)
        assert cs.kappa[1] == pytest.approx(m.mu, abs=1e-12)
        assert cs.kappa[2] == pytest.approx(m.sigma2, abs=1e-12)


def test_validation():
    with pytest.raises(NotAPGFError):
        DiscretePMF(np.array([0.5, -0.1, 0.6]))
    with pytest.raises(NotAPGFError):
        DiscretePMF(np.array([0.5, 0.4]))  # sums to 0.9
    renorm = DiscretePMF(np.array([0.5, 0.5 + 5e-10]))
    assert math.fsum(renorm.probs) == pytest.approx(1.0, abs=1e-15)


def test_cumulant_overflow_guard():
    pmf = DiscretePMF(np.concatenate([np.full(10, 1e-7), [1 - 1e-6]]))
    big = scale_support(pmf, 100000)
    with pytest.raises(OverflowError):
        cumulants_from_pmf(big, 64)


def test_json_round_trip():
    pmf = DiscretePMF(np.array([0.125, 0.5, 0.375]), span=3)
    again = DiscretePMF.from_json(pmf.to_json())
    assert again.span == pmf.span
    assert np.array_equal(again.probs, pmf.probs)
