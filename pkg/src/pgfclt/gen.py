"""Deterministic generators for families of test distributions."""

from __future__ import annotations

import numpy as np

from .construct import seed_sector_pgf
from .dist import DiscretePMF, convolve
from .roots import PGFPoly, normalize


def random_pgf(rng: np.random.Generator, degree: int, sparsity: float = 0.0) -> PGFPoly:
    """Random PGF of exactly the given degree with uniform coefficients;
    sparsity zeroes out that fraction of interior coefficients."""
    coeffs = rng.uniform(0.0, 1.0, degree + 1)
    if sparsity > 0:
        mask = rng.random(degree + 1) < sparsity
        mask[0] = mask[-1] = False
        coeffs[mask] = 0.0
    coeffs[-1] = max(coeffs[-1], 0.05)  # keep the stated degree
    return normalize(coeffs)


def random_seed_product(
    rng: np.random.Generator,
    n_factors: int,
    theta_min: float,
    rho_max: float = 2.0,
) -> PGFPoly:
    """Product of sector-seed quadratics with root arguments in
    [max(theta_min, pi/2), pi]: zero-free in the sector of half-angle theta_min."""
    lo = max(theta_min, np.pi / 2.0)
    pmf: DiscretePMF | None = None
    for _ in range(n_factors):
        theta = rng.uniform(lo, np.pi)
        rho = rng.uniform(1.0, rho_max)
        factor = seed_sector_pgf(rho, theta).to_pmf()
        pmf = factor if pmf is None else convolve(pmf, factor)
    return PGFPoly.from_pmf(pmf)


def binomial_pgf(n: int, p: float = 0.5) -> PGFPoly:
    """PGF of Binomial(n, p) by repeated squaring of (1-p) + p z."""
    acc = np.array([1.0])
    base = np.array([1.0 - p, p])
    m = n
    while m > 0:
        if m & 1:
            acc = np.convolve(acc, base)
        m >>= 1
        if m:
            base = np.convolve(base, base)
    return PGFPoly(acc)
