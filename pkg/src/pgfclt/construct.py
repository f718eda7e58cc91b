"""Families of lattice distributions that meet the distance bounds up to
constants.

All of them exploit the same lever: replacing X by k*X leaves the
standardized law (hence the distance to normal) unchanged while multiplying
sigma by k, so a lattice variable on k*Z with standard deviation sigma stays
at distance >= e^-16 * k / sigma from the normal.  The three families below
realize prescribed (sigma, delta) pairs:

  * sector-sharp: scaled sums of two-point-root seeds
        (z^2 - 2 rho cos(theta) z + rho^2) / (1 - 2 rho cos(theta) + rho^2),
    whose roots sit exactly at arguments +-theta/k after the z -> z^k lift;
  * ball-sharp: scaled binomials k * Binomial(floor(n/k), p), whose roots are
    the k-th roots of -(1-p)/p, all at distance about ((1-p)/p)^(1/k) - 1
    from 1;
  * scaled Poisson: (kappa/2) * Poisson(4 sigma^2 / kappa^2), with the
    closed-form potential (4 sigma^2/kappa^2)(Re z^{kappa/2} - 1), zero-free
    off the negative real axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .dist import DiscretePMF, convolve, kolmogorov_distance, moments, scale_support
from .errors import NotAPGFError, PreconditionError
from .roots import PGFPoly, RootSet, find_roots, root_geometry
from .roots import _root_form_constant  # shared constant-of-normalization helper

LOWER_BOUND_CONSTANT = math.exp(-16.0)
MIN_SEED_SIGMA = 0.125  # 2^-3, the smallest deviation the discrete gap bound covers
POISSON_SUPPORT_CAP = 10_000_000
LARGE_PMF_ATOMS = 100_000


@dataclass(frozen=True)
class ConstructionResult:
    """A constructed distribution with its verified geometry.

    pmf/poly describe the final law X; base_poly and base_multiplicity give
    the factorization poly = base_poly^base_multiplicity used for root
    checks (numerical root finding cannot resolve huge multiplicities, the
    base factor has simple roots).  For the Poisson family the law is not
    polynomial: pmf holds the truncated integer-lattice law and
    lattice_scale the real multiplier kappa/2.
    """

    pmf: DiscretePMF
    poly: PGFPoly | None
    k: int
    achieved_sigma: float
    achieved_delta: float
    lower_bound: float
    base_poly: PGFPoly | None = None
    base_multiplicity: int = 1
    roots: RootSet | None = None
    lattice_scale: float | None = None
    potential: object = None
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "k": self.k,
            "achieved_sigma": self.achieved_sigma,
            "achieved_delta": self.achieved_delta,
            "lower_bound": self.lower_bound,
            "base_multiplicity": self.base_multiplicity,
            "extras": self.extras,
        }
        if self.lattice_scale is not None:
            out["lattice_scale"] = self.lattice_scale
        if self.pmf.n_atoms <= LARGE_PMF_ATOMS:
            out["pmf"] = self.pmf.to_json()
        else:
            out["pmf"] = {"generator": self.extras.get("generator", "unspecified"), "atoms": self.pmf.n_atoms}
        return out


def discrete_lower_bound(sigma: float, k: int = 1) -> float:
    """e^-16 * k / sigma: the unavoidable distance of a lattice law on k*Z.

    Requires the underlying unit-lattice deviation sigma/k to be at least
    2^-3; below that the gap argument gives nothing.
    """
    if k < 1:
        raise PreconditionError("k must be a positive integer")
    if sigma <= 0:
        raise PreconditionError("sigma must be positive")
    if sigma / k < MIN_SEED_SIGMA:
        raise PreconditionError(
            f"unit-lattice deviation {sigma / k} below {MIN_SEED_SIGMA}; bound inapplicable"
        )
    return LOWER_BOUND_CONSTANT * k / sigma


def seed_sector_pgf(rho: float, theta: float) -> PGFPoly:
    """Quadratic PGF with roots exactly at rho e^{+-i theta}:

        (z^2 - 2 rho cos(theta) z + rho^2) / (1 - 2 rho cos(theta) + rho^2).

    Needs theta in [pi/2, pi] so the middle coefficient -2 rho cos(theta) is
    nonnegative, and rho >= 1.
    """
    if rho < 1.0:
        raise PreconditionError("rho must be at least 1")
    if theta > math.pi:
        raise PreconditionError("theta must lie in [pi/2, pi]")
    mid = -2.0 * rho * math.cos(theta)
    if -1e-12 <= mid < 0:  # cos(pi/2) is not exactly zero in floats
        mid = 0.0
    if mid < 0:
        raise NotAPGFError(f"theta = {theta} < pi/2 makes the middle coefficient {mid} negative")
    coeffs = np.array([rho * rho, mid, 1.0])
    return PGFPoly(coeffs / coeffs.sum())


def seed_variance(rho: float, theta: float) -> float:
    return moments(seed_sector_pgf(rho, theta).to_pmf()).sigma2


def solve_rho_for_variance(theta: float, target_var: float, tol: float = 1e-12) -> float:
    """Radius rho >= 1 with Var(seed(rho, theta)) = target_var, by bisection.

    The variance decreases continuously from its rho = 1 value toward 0, so
    any target in (0, Var(rho=1)] is feasible.
    """
    if target_var <= 0:
        raise PreconditionError("target variance must be positive")
    v1 = seed_variance(1.0, theta)
    if target_var > v1 + 1e-12:
        raise PreconditionError(f"target variance {target_var} exceeds the rho=1 value {v1}")
    if abs(target_var - v1) <= tol:
        return 1.0
    lo, hi = 1.0, 2.0
    while seed_variance(hi, theta) > target_var:
        hi *= 2.0
        if hi > 1e12:
            raise RuntimeError("bisection bracket expansion failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        v = seed_variance(mid, theta)
        if abs(v - target_var) <= tol:
            return mid
        if v > target_var:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _self_convolve(pmf: DiscretePMF, m: int) -> DiscretePMF:
    """m-fold convolution power by binary doubling."""
    result = None
    base = pmf
    while m > 0:
        if m & 1:
            result = base if result is None else convolve(result, base)
        m >>= 1
        if m:
            base = convolve(base, base)
    return result


def _lift_support(poly: PGFPoly, k: int) -> PGFPoly:
    """PGF of k*X: substitute z^k, spreading coefficients k apart."""
    if k == 1:
        return poly
    coeffs = np.zeros(k * poly.degree + 1)
    coeffs[::k] = poly.coeffs
    return PGFPoly(coeffs)


def construct_sector_sharp(sigma: float, delta: float) -> ConstructionResult:
    """Distribution with min root argument exactly delta, standard deviation
    sigma, and distance to normal at least e^-16 * k / sigma >= e^-16/(delta sigma).

    Writes delta = theta/k with theta in [pi/2, pi], sums m independent seeds
    (m minimal with m * Var(seed at rho=1) >= (sigma/k)^2, then rho re-solved
    by bisection), and lifts the sum onto the lattice k*Z.
    """
    if not (0 < delta <= math.pi):
        raise PreconditionError("delta must lie in (0, pi]")
    if delta * sigma < 1.0:
        raise PreconditionError(f"delta*sigma = {delta * sigma} < 1: family infeasible")
    k = max(1, math.ceil(math.pi / (2.0 * delta) - 1e-12))
    theta = k * delta
    if theta > math.pi + 1e-12:
        raise RuntimeError("internal: theta left [pi/2, pi]")
    theta = min(theta, math.pi)
    sigma_y = sigma / k
    v1 = seed_variance(1.0, theta)
    m = max(1, math.ceil(sigma_y * sigma_y / v1 - 1e-12))
    rho = solve_rho_for_variance(theta, sigma_y * sigma_y / m)
    seed = seed_sector_pgf(rho, theta)
    pmf_y = _self_convolve(seed.to_pmf(), m)
    pmf_x = scale_support(pmf_y, k)
    poly = PGFPoly.from_pmf(pmf_x)
    base = _lift_support(seed, k)
    base_roots = find_roots(base)
    lifted = tuple((z, mult * m) for z, mult in base_roots.roots)
    c_x, n_inside = _root_form_constant(lifted)
    roots = RootSet(roots=lifted, c_x=c_x, n_inside=n_inside)
    achieved_sigma = moments(pmf_x).sigma
    achieved_delta = root_geometry(base_roots).delta_sector
    return ConstructionResult(
        pmf=pmf_x,
        poly=poly,
        k=k,
        achieved_sigma=achieved_sigma,
        achieved_delta=achieved_delta,
        lower_bound=discrete_lower_bound(achieved_sigma, k),
        base_poly=base,
        base_multiplicity=m,
        roots=roots,
        extras={"theta": theta, "rho": rho, "m": m, "generator": "sector-seed-power"},
    )


def construct_ball_sharp(
    n: int, delta: float, sigma: float, c_k: float = 100.0
) -> ConstructionResult:
    """Scaled binomial k * Binomial(floor(n/k), p) with Var = sigma^2.

    k = floor(log n / (c_k delta)); p = n^-alpha is solved by bisection on
    alpha in [0.01, 1) along the p <= 1/2 branch, where the variance is
    monotone.  With the stated constant c_k = 100 every desk-scale instance
    degenerates to k = 0; c_k is exposed so the structure can be exercised
    at c_k = 1.
    """
    if n < 2:
        raise PreconditionError("n must be at least 2")
    if not (0 < delta < 2):
        raise PreconditionError("delta must lie in (0, 2)")
    sigma2 = sigma * sigma
    if not (1.0 <= sigma2 < n**0.9):
        raise PreconditionError(f"sigma^2 = {sigma2} outside [1, n^0.9)")
    logn = math.log(n)
    # The theorem regime is log n <= delta*sigma; outside it the construction
    # still runs (the variance solver reports infeasibility precisely), and
    # the flag below records which side the instance fell on.
    theorem_regime = logn / (delta * sigma) <= 1.0 + 1e-12
    k = math.floor(logn / (c_k * delta))
    if k < 1:
        raise PreconditionError(
            f"k = floor(log n / (c_k delta)) = 0 at c_k = {c_k}: construction degenerate"
        )
    m = n // k

    def variance(alpha: float) -> float:
        p = n**-alpha
        return k * k * m * p * (1.0 - p)

    alpha_lo = max(0.01, math.log(2.0) / logn)  # p <= 1/2: monotone branch
    alpha_hi = 1.0 - 1e-9
    if variance(alpha_lo) < sigma2:
        raise PreconditionError("sigma^2 unreachable on the p <= 1/2 branch")
    if variance(alpha_hi) > sigma2:
        raise PreconditionError("sigma^2 below the alpha < 1 floor")
    lo, hi = alpha_lo, alpha_hi
    for _ in range(200):
        mid_alpha = 0.5 * (lo + hi)
        v = variance(mid_alpha)
        if abs(v - sigma2) <= 1e-8:
            break
        if v > sigma2:
            lo = mid_alpha
        else:
            hi = mid_alpha
    alpha = mid_alpha
    p = n**-alpha

    ks = np.arange(m + 1)
    log_pmf = (
        gammaln(m + 1)
        - gammaln(ks + 1)
        - gammaln(m - ks + 1)
        + ks * math.log(p)
        + (m - ks) * math.log1p(-p)
    )
    pmf_y = DiscretePMF(np.exp(log_pmf))
    pmf_x = scale_support(pmf_y, k)
    base = PGFPoly(np.concatenate(([1.0 - p], np.zeros(k - 1), [p])))
    base_roots = find_roots(base)
    lifted = tuple((z, mult * m) for z, mult in base_roots.roots)
    c_x, n_inside = _root_form_constant(lifted)
    achieved_sigma = moments(pmf_x).sigma
    if achieved_sigma / k < MIN_SEED_SIGMA:
        raise PreconditionError("binomial factor too degenerate for the gap bound")
    return ConstructionResult(
        pmf=pmf_x,
        poly=PGFPoly.from_pmf(pmf_x),
        k=k,
        achieved_sigma=achieved_sigma,
        achieved_delta=root_geometry(base_roots).delta_ball,
        lower_bound=discrete_lower_bound(achieved_sigma, k),
        base_poly=base,
        base_multiplicity=m,
        roots=RootSet(roots=lifted, c_x=c_x, n_inside=n_inside),
        extras={
            "p": p,
            "alpha": alpha,
            "m": m,
            "theorem_regime": theorem_regime,
            "generator": "scaled-binomial",
        },
    )


def poisson_scaled(sigma: float, kappa: float, tail_tol: float = 1e-12) -> ConstructionResult:
    """(kappa/2) * Poisson(4 sigma^2 / kappa^2), truncated to mass 1 - tail_tol.

    The untruncated potential has the closed form
    u(z) = (4 sigma^2 / kappa^2) (Re z^{kappa/2} - 1): entire in the slit
    plane, zero-free in every sector, with growth exponent kappa/2 < kappa.
    The result's pmf is the integer-lattice law of Poisson and lattice_scale
    carries the real multiplier kappa/2 (the lattice stays integral only
    when kappa/2 is an integer, reflected in k).
    """
    if sigma <= 0 or kappa <= 0:
        raise PreconditionError("sigma and kappa must be positive")
    if sigma < kappa:
        raise PreconditionError(f"need sigma * (1/kappa) >= 1, got {sigma / kappa}")
    if not (0 < tail_tol < 1):
        raise PreconditionError("tail_tol must lie in (0, 1)")
    lam = 4.0 * sigma * sigma / (kappa * kappa)

    # Chernoff: log P(Y >= N) <= -lam + N (1 + log(lam/N)) for N > lam.
    target = math.log(tail_tol)
    N = int(lam) + 1
    while True:
        bound = -lam + N * (1.0 + math.log(lam / N)) if N > lam else 0.0
        if N > lam and bound < target:
            break
        N = max(N + 1, int(N * 1.1))
        if N > POISSON_SUPPORT_CAP:
            raise PreconditionError(
                f"tail tolerance {tail_tol} unreachable within {POISSON_SUPPORT_CAP} atoms"
            )
    ks = np.arange(N + 1)
    log_pmf = ks * math.log(lam) - lam - gammaln(ks + 1)
    probs = np.exp(log_pmf)
    mass = math.fsum(probs)
    if 1.0 - mass >= tail_tol:
        raise PreconditionError("truncation mass exceeded tail_tol")
    probs = probs / mass
    half_kappa = kappa / 2.0
    k_int = int(round(half_kappa)) if abs(half_kappa - round(half_kappa)) < 1e-12 else 1
    pmf_y = DiscretePMF(probs)
    pmf = scale_support(pmf_y, k_int) if k_int > 1 else pmf_y
    sigma_y = moments(pmf_y).sigma

    def potential(z):
        z = np.asarray(z, dtype=complex)
        return lam * (np.exp(half_kappa * np.log(z)).real - 1.0)

    return ConstructionResult(
        pmf=pmf,
        poly=None,
        k=max(k_int, 1),
        achieved_sigma=half_kappa * sigma_y,
        achieved_delta=math.pi,  # zero-free in every sector off the negative axis
        lower_bound=LOWER_BOUND_CONSTANT * half_kappa / (half_kappa * sigma_y),
        lattice_scale=half_kappa,
        potential=potential,
        extras={"lam": lam, "truncation": N, "generator": "poisson-scaled"},
    )
