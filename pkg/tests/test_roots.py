import math

import numpy as np
import pytest

from pgfclt.errors import NotAPGFError, PreconditionError
from pgfclt.gen import random_pgf
from pgfclt.roots import (
    PGFPoly,
    RootSet,
    find_roots,
    log_potential,
    log_potential_grid,
    normalize,
    poly_from_roots,
    root_geometry,
)


def test_normalize():
    assert np.allclose(normalize([1.0, 1.0]).coeffs, [0.5, 0.5])
    assert np.allclose(normalize([2.0, 0.0, 2.0]).coeffs, [0.5, 0.0, 0.5])
    with pytest.raises(NotAPGFError):
        normalize([1.0, -1.0])


def test_trailing_zeros_trimmed():
    poly = PGFPoly(np.array([0.5, 0.5, 0.0, 0.0]))
    assert poly.degree == 1


def test_find_roots_simple():
    rs = find_roots(PGFPoly(np.array([0.5, 0.5])))
    (z, m), = rs.roots
    assert m == 1 and z == pytest.approx(-1.0)
    assert rs.n_inside == 0
    assert rs.c_x == pytest.approx(-math.log(2))  # -log|1 - 1/(-1)| = -log 2


def test_find_roots_double():
    rs = find_roots(PGFPoly(np.array([0.25, 0.5, 0.25])))
    (z, m), = rs.roots
    assert m == 2
    assert z == pytest.approx(-1.0, abs=1e-7)


def test_find_roots_imaginary_pair():
    rs = find_roots(PGFPoly(np.array([0.5, 0.0, 0.5])))
    zs = sorted((z for z, _ in rs.roots), key=lambda w: w.imag)
    assert zs[0] == pytest.approx(-1j, abs=1e-10)
    assert zs[1] == pytest.approx(1j, abs=1e-10)
    assert zs[0] == np.conj(zs[1])  # exactly paired


def test_root_geometry_examples():
    geo = root_geometry(find_roots(PGFPoly(np.array([0.5, 0.5]))))
    assert geo.delta_ball == pytest.approx(2.0)
    assert geo.delta_sector == pytest.approx(math.pi)
    geo = root_geometry(find_roots(PGFPoly(np.array([0.5, 0.0, 0.5]))))
    assert geo.delta_ball == pytest.approx(math.sqrt(2.0))
    assert geo.delta_sector == pytest.approx(math.pi / 2)
    # root at zero is excluded from the sector minimum
    geo = root_geometry(find_roots(PGFPoly(np.array([0.0, 0.5, 0.5]))))
    assert geo.delta_ball == pytest.approx(1.0)
    assert geo.delta_sector == pytest.approx(math.pi)


def test_all_zero_roots_sector_is_pi():
    rs = find_roots(PGFPoly(np.array([0.0, 0.0, 1.0])))
    assert rs.roots == ((0j, 2),)
    assert root_geometry(rs).delta_sector == math.pi


def test_log_potential_basics():
    rng = np.random.default_rng(1)
    for _ in range(10):
        poly = random_pgf(rng, int(rng.integers(1, 12)))
        assert log_potential(poly, 1.0) == pytest.approx(0.0, abs=1e-12)
    bern = PGFPoly(np.array([0.5, 0.5]))
    assert log_potential(bern, -1.0) == -math.inf
    val = log_potential(bern, 2.0, subtract_mean=True)
    assert val == pytest.approx(math.log(1.5) - 0.5 * math.log(2.0), abs=1e-12)
    with pytest.raises(PreconditionError):
        log_potential(bern, 0.0, subtract_mean=True)


def test_log_potential_symmetry_exact():
    rng = np.random.default_rng(2)
    for _ in range(25):
        poly = random_pgf(rng, int(rng.integers(1, 20)))
        z = complex(rng.normal(), rng.normal())
        assert log_potential(poly, z) == log_potential(poly, np.conj(z))


def test_root_form_matches_direct_evaluation():
    rng = np.random.default_rng(7)
    for _ in range(200):
        poly = random_pgf(rng, int(rng.integers(1, 31)))
        rs = find_roots(poly)
        all_roots = rs.all_roots()
        zs = rng.normal(size=50) + 1j * rng.normal(size=50)
        for z in zs:
            if all_roots.size and np.min(np.abs(z - all_roots)) < 1e-3:
                continue
            if abs(z) < 1e-3:
                continue
            direct = log_potential(poly, z)
            from pgfclt.roots import _u_root_form

            assert _u_root_form(rs, complex(z)) == pytest.approx(direct, abs=1e-8)


def test_weak_positivity_random_grid():
    rng = np.random.default_rng(9)
    for _ in range(25):
        poly = random_pgf(rng, int(rng.integers(1, 15)))
        zs = rng.uniform(0.1, 2.0, 100) * np.exp(1j * rng.uniform(-np.pi, np.pi, 100))
        u = log_potential_grid(poly, zs)
        u_mod = log_potential_grid(poly, np.abs(zs).astype(complex))
        ok = np.isfinite(u)
        assert np.all(u_mod[ok] - u[ok] >= -1e-10)


def test_round_trip_roots_to_poly():
    rng = np.random.default_rng(13)
    for _ in range(40):
        poly = random_pgf(rng, int(rng.integers(1, 18)))
        rebuilt = poly_from_roots(find_roots(poly))
        assert np.max(np.abs(rebuilt.coeffs - poly.coeffs)) < 1e-8


def test_underflow_uses_root_form():
    # z^40 (1+z)/2 near z = 0: the direct product underflows to exactly 0.0
    # while the root form stays finite and correct.
    coeffs = np.zeros(42)
    coeffs[40] = coeffs[41] = 0.5
    poly = PGFPoly(coeffs)
    rs = find_roots(poly)
    z = 1e-10
    assert abs(poly(z)) == 0.0  # direct evaluation underflows completely
    u = log_potential(poly, z, roots=rs)
    expected = 40 * math.log(1e-10) + math.log1p(1e-10) - math.log(2.0)
    assert u == pytest.approx(expected, rel=1e-12)


def test_exact_root_keeps_sentinel():
    # binomial coefficients over 2^40 are dyadic, so Horner at z = -1 is exact
    from pgfclt.gen import binomial_pgf

    poly = binomial_pgf(40)
    assert poly(-1.0) == 0.0
    rs = RootSet(roots=((-1.0 + 0j, 40),), c_x=-40 * math.log(2.0), n_inside=0)
    assert log_potential(poly, -1.0, roots=rs) == -math.inf


def test_backward_error_certificate():
    rng = np.random.default_rng(17)
    for _ in range(20):
        poly = random_pgf(rng, int(rng.integers(2, 25)))
        rs = find_roots(poly, tol=1e-10)
        for z, _ in rs.roots:
            scale = float(np.polynomial.polynomial.polyval(abs(z), np.abs(poly.coeffs)))
            assert abs(poly(z)) <= 1e-6 * scale  # clusters may dilute single-root accuracy


def test_rootset_json_round_trip():
    rs = find_roots(PGFPoly(np.array([0.25, 0.5, 0.25])))
    again = RootSet.from_json(rs.to_json())
    assert again.roots == rs.roots
    assert again.n_inside == rs.n_inside
