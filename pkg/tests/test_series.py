import math

import numpy as np
import pytest

from pgfclt.errors import PreconditionError
from pgfclt.series import TruncatedSeries


def geometric(order):
    # 1/(1-x) = 1 + x + x^2 + ...
    return TruncatedSeries(np.ones(order + 1), order)


def test_add_mul():
    a = TruncatedSeries([1, 2, 3], 4)
    b = TruncatedSeries([0, 1], 4)
    assert np.allclose((a + b).coeffs, [1, 3, 3, 0, 0])
    prod = a * b
    assert np.allclose(prod.coeffs, [0, 1, 2, 3, 0])


def test_mul_truncates():
    a = geometric(5)
    sq = a * a  # 1/(1-x)^2 = sum (k+1) x^k
    assert np.allclose(sq.coeffs.real, [1, 2, 3, 4, 5, 6])


def test_log_exp_inverse():
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = TruncatedSeries(np.concatenate(([0.0], rng.normal(size=10) * 0.3)), 10)
        back = g.exp().coeffs
        h = TruncatedSeries(back, 10)
        h_shift = TruncatedSeries(h.coeffs - np.eye(11)[0], 10)  # h - 1
        assert np.allclose(h_shift.log1p().coeffs, g.coeffs, atol=1e-12)


def test_log1p_matches_mercator():
    x = TruncatedSeries([0, 1], 8)
    expected = [0] + [(-1) ** (k + 1) / k for k in range(1, 9)]
    assert np.allclose(x.log1p().coeffs.real, expected)


def test_exp_matches_factorials():
    x = TruncatedSeries([0, 1], 10)
    expected = [1 / math.factorial(k) for k in range(11)]
    assert np.allclose(x.exp().coeffs.real, expected)


def test_expm1_constructor():
    e = TruncatedSeries.expm1(6)
    assert e.coeffs[0] == 0
    assert np.allclose(e.coeffs.real[1:], [1 / math.factorial(k) for k in range(1, 7)])


def test_compose():
    # exp(log(1+x)) == 1 + x
    x = TruncatedSeries([0, 1], 9)
    log1px = x.log1p()
    expx = TruncatedSeries([1 / math.factorial(k) for k in range(10)], 9)
    comp = expx.compose(log1px)
    expected = np.zeros(10)
    expected[0] = expected[1] = 1.0
    assert np.allclose(comp.coeffs.real, expected, atol=1e-12)


def test_compose_requires_zero_constant():
    with pytest.raises(PreconditionError):
        TruncatedSeries([1, 1], 3).compose(TruncatedSeries([1, 1], 3))


def test_log_requires_zero_constant():
    with pytest.raises(PreconditionError):
        TruncatedSeries([1, 1], 3).log1p()


def test_evaluation():
    s = TruncatedSeries([1, 2, 3], 2)
    assert s(0.5) == pytest.approx(1 + 1 + 0.75)
