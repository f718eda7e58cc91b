"""Characteristic functions, remainder control, smoothing inversion, and the
headline distance bounds.

The standardized characteristic function of a lattice variable with PGF f is
psi*(xi) = f(e^{i xi/sigma}) e^{-i mu xi / sigma}; near 0 it factors as
exp(-xi^2/2 + R(xi)) with remainder R(xi) = sum_{j>=3} (a_j/sigma^j)(i xi)^j
built from the normalized cumulants.  The smoothing inequality

    sup_t |F(t) - Phi(t)| <= (1/pi) int_{-T}^{T} |(psi*(xi)-e^{-xi^2/2})/xi| dxi + 4/T

turns closeness of characteristic functions into closeness of distributions.

The theorem-shaped bounds carry astronomically large constants (2^3261 and
friends), far beyond float range; they are exposed both as raw values (inf
when unrepresentable) and in log2 form, and reports additionally cap them at
1 since a Kolmogorov distance never exceeds 1.  The falsifiable content is
the scaling in (n, delta, sigma), tracked by the unit-constant empirical
ratios D*delta*sigma and D*delta*sigma/log n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cumulants import CumulantSeq, tame_cumulants
from .dist import DiscretePMF, kolmogorov_distance, moments
from .errors import DegenerateDistributionError, PreconditionError, QuadratureError
from .roots import PGFPoly, RootGeometry, RootSet, find_roots, root_geometry

LOG2_CONSTANT_BALL = 3261.0
LOG2_CONSTANT_SECTOR = 3257.0
LOG2_CONSTANT_GENERAL = 3258.0
LOG2_CONSTANT_DECREASING = 3255.0
LOG2_REMAINDER_C1 = 3246.0


@dataclass(frozen=True)
class GrowthSpec:
    """Growth exponent and sector half-angle for non-polynomial potentials:
    |u(z)|/|z|^kappa -> 0 along the sector of half-angle delta."""

    kappa: float
    delta: float

    def __post_init__(self):
        if self.kappa <= 0 or self.delta <= 0:
            raise PreconditionError("kappa and delta must be positive")


def characteristic_star(poly: PGFPoly, xi):
    """Standardized characteristic function psi*(xi); accepts arrays."""
    m = moments(poly.to_pmf())
    if m.sigma <= 0:
        raise DegenerateDistributionError("characteristic function of a point mass")
    xi = np.asarray(xi, dtype=float)
    z = np.exp(1j * xi / m.sigma)
    vals = poly(z) * np.exp(-1j * m.mu * xi / m.sigma)
    return vals if vals.shape else complex(vals)


@dataclass(frozen=True)
class RemainderSeries:
    """Coefficients r_j = a_j / sigma^j of the cubic-and-up remainder of
    log psi*; r_0 = r_1 = r_2 = 0 identically."""

    r: np.ndarray
    sigma: float

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float).copy()
        if r.size < 3 or np.any(r[:3] != 0.0):
            raise PreconditionError("remainder series must vanish through order 2")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @classmethod
    def from_cumulants(cls, a: CumulantSeq, sigma: float) -> "RemainderSeries":
        if sigma <= 0:
            raise DegenerateDistributionError("remainder series requires sigma > 0")
        r = np.zeros(a.J + 1)
        for j in range(3, a.J + 1):
            r[j] = a.a[j] / sigma**j
        return cls(r=r, sigma=sigma)

    def eval(self, xi: complex) -> complex:
        w = 1j * complex(xi)
        acc = 0j
        for rj in self.r[:2:-1]:
            acc = (acc + rj) * w
        return acc * w * w  # two powers folded out of the Horner loop


class RemainderValue(complex):
    """Complex remainder value carrying a flag for whether the evaluation
    point lay inside the trusted radius of the truncated series."""

    within_radius: bool

    def __new__(cls, value: complex, within_radius: bool):
        obj = super().__new__(cls, value)
        obj.within_radius = within_radius
        return obj


def remainder_radius(a: CumulantSeq, sigma: float) -> float:
    """Trusted |xi| radius sigma*s*/2 for the truncated remainder series, with
    s* from cumulant taming; infinite when the remainder vanishes."""
    if not np.any(np.abs(a.a[3:]) > 0):
        return math.inf
    for s in (0.25, 0.125, 0.0625, 0.03125, 2.0**-6, 2.0**-8, 2.0**-10):
        try:
            s_star = tame_cumulants(a, s=s, L=min(8, a.J))
        except (PreconditionError, RuntimeError):
            continue
        return sigma * s_star / 2.0
    return 0.0


def remainder_eval(a: CumulantSeq, sigma: float, xi: complex, radius: float | None = None) -> RemainderValue:
    """Truncated remainder sum_{j=3}^{J} (a_j/sigma^j)(i xi)^j.

    The within_radius flag on the result records whether |xi| lay inside the
    convergence heuristic (sigma*s*/2 by default).
    """
    series = RemainderSeries.from_cumulants(a, sigma)
    if radius is None:
        radius = remainder_radius(a, sigma)
    value = series.eval(xi)
    return RemainderValue(value, within_radius=abs(complex(xi)) <= radius)


def _adaptive_simpson(f, a: float, b: float, rel_tol: float, init_panels: int, max_depth: int = 48):
    """Composite Simpson with per-panel bisection to a relative tolerance."""
    edges = np.linspace(a, b, init_panels + 1)
    coarse = 0.0
    panels = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        flo, fmid, fhi = f(lo), f(mid), f(hi)
        s = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
        panels.append((lo, hi, flo, fmid, fhi, s, 0))
        coarse += s
    scale = max(abs(coarse), 1e-12)
    tol_total = rel_tol * scale
    total = 0.0
    worst_err = 0.0
    stack = panels
    while stack:
        lo, hi, flo, fmid, fhi, s, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lmid, rmid = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lmid), f(rmid)
        s_left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        s_right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        err = abs(s_left + s_right - s)
        if err <= 15.0 * tol_total * (hi - lo) / (b - a) or depth >= max_depth:
            if depth >= max_depth:
                worst_err = max(worst_err, err / 15.0)
            total += s_left + s_right + (s_left + s_right - s) / 15.0
        else:
            stack.append((lo, mid, flo, flm, fmid, s_left, depth + 1))
            stack.append((mid, hi, fmid, frm, fhi, s_right, depth + 1))
    if worst_err > tol_total:
        raise QuadratureError(
            f"quadrature stalled at error {worst_err:.3e} (target {tol_total:.3e})",
            achieved_tol=worst_err,
        )
    return total


def esseen_bound(poly: PGFPoly, T: float, quad: int = 64) -> float:
    """Smoothing-inequality value (1/pi) * integral + 4/T for the standardized
    characteristic function against the Gaussian one.

    The integrand |psi*(xi) - e^{-xi^2/2}| / |xi| has a removable singularity
    at 0 (the difference vanishes to third order) and is even, so the
    integral runs over [0, T] and is doubled.
    """
    if T <= 0:
        raise PreconditionError("T must be positive")
    m = moments(poly.to_pmf())
    if m.sigma <= 0:
        raise DegenerateDistributionError("smoothing bound requires sigma > 0")
    sigma, mu = m.sigma, m.mu

    def integrand(xi: float) -> float:
        if xi == 0.0:
            return 0.0
        z = complex(math.cos(xi / sigma), math.sin(xi / sigma))
        psi = complex(poly(z)) * complex(math.cos(mu * xi / sigma), -math.sin(mu * xi / sigma))
        return abs(psi - math.exp(-0.5 * xi * xi)) / abs(xi)

    integral = _adaptive_simpson(integrand, 0.0, T, rel_tol=1e-8, init_panels=quad)
    return (2.0 / math.pi) * integral + 4.0 / T


def paper_bound_log2(mode: str, n: int, geometry, sigma: float) -> float:
    """log2 of the theorem-shaped distance bound; immune to overflow."""
    if sigma <= 0:
        raise DegenerateDistributionError("bounds require sigma > 0")
    if mode == "ball":
        if not isinstance(geometry, RootGeometry):
            raise PreconditionError("ball mode needs root geometry")
        delta = geometry.delta_ball
        if delta <= 0:
            raise PreconditionError("root at 1: delta_ball = 0")
        if n < 2:
            raise PreconditionError("ball mode needs degree >= 2 for the log factor")
        return LOG2_CONSTANT_BALL + math.log2(math.log(n)) - math.log2(delta * sigma)
    if mode == "sector":
        if not isinstance(geometry, RootGeometry):
            raise PreconditionError("sector mode needs root geometry")
        delta = geometry.delta_sector
        if delta <= 0:
            raise PreconditionError("root on the positive axis: delta_sector = 0")
        return LOG2_CONSTANT_SECTOR - math.log2(delta * sigma)
    if mode == "general":
        if not isinstance(geometry, GrowthSpec):
            raise PreconditionError("general mode needs a growth specification")
        return LOG2_CONSTANT_GENERAL + math.log2(max(1.0 / geometry.delta, geometry.kappa)) - math.log2(sigma)
    raise PreconditionError(f"unknown mode {mode!r}")


def paper_bound(mode: str, n: int, geometry, sigma: float) -> float:
    """Theorem-shaped bound as a float; inf when it exceeds float range.

    The constants make the raw value astronomically larger than 1 at any
    desk scale; reports cap it (a Kolmogorov distance never exceeds 1) and
    keep the log2 value.
    """
    log2v = paper_bound_log2(mode, n, geometry, sigma)
    if log2v >= 1024.0:
        return math.inf
    return 2.0**log2v


@dataclass(frozen=True)
class BoundReport:
    """Exact distance, root geometry, capped theorem bounds with their log2
    raw values, unit-constant scaling ratios, and a smoothing-bound value."""

    n: int
    mu: float
    sigma: float
    D: float
    delta_ball: float
    delta_sector: float
    paper_bound_ball: float
    paper_bound_sector: float
    paper_bound_ball_log2: float
    paper_bound_sector_log2: float
    ratio_sector: float  # D * delta_sector * sigma
    ratio_ball: float  # D * delta_ball * sigma / log n   (nan when log n = 0)
    esseen_value: float
    esseen_T: float

    CSV_HEADER = "n,delta_ball,delta_sector,sigma,D,ratio_ball,ratio_sector,esseen_value"

    def to_json(self) -> dict:
        def num(x: float):
            return None if isinstance(x, float) and math.isnan(x) else x

        return {
            "n": self.n,
            "mu": self.mu,
            "sigma": self.sigma,
            "D": self.D,
            "delta_ball": self.delta_ball,
            "delta_sector": self.delta_sector,
            "paper_bound_ball": num(self.paper_bound_ball),
            "paper_bound_sector": num(self.paper_bound_sector),
            "paper_bound_ball_log2": num(self.paper_bound_ball_log2),
            "paper_bound_sector_log2": num(self.paper_bound_sector_log2),
            "ratio_sector": self.ratio_sector,
            "ratio_ball": num(self.ratio_ball),
            "esseen_value": self.esseen_value,
            "esseen_T": self.esseen_T,
        }

    def csv_row(self) -> str:
        cells = [
            self.n,
            self.delta_ball,
            self.delta_sector,
            self.sigma,
            self.D,
            self.ratio_ball,
            self.ratio_sector,
            self.esseen_value,
        ]
        return ",".join(repr(c) if isinstance(c, float) else str(c) for c in cells)


def verify_normal_approx(
    poly: PGFPoly,
    known_roots: RootSet | None = None,
    esseen_T: float | None = None,
) -> BoundReport:
    """Consolidated report: exact Kolmogorov distance, root geometry, capped
    theorem bounds, empirical scaling ratios, and a smoothing-bound value at
    T = max(sigma, 4).

    known_roots lets callers with an exact factorization (e.g. high powers of
    a seed polynomial) bypass numerical root finding, which cannot resolve
    large multiplicities.
    """
    pmf = poly.to_pmf()
    m = moments(pmf)
    if m.sigma <= 0:
        raise DegenerateDistributionError("report requires sigma > 0")
    D = kolmogorov_distance(pmf)
    roots = known_roots if known_roots is not None else find_roots(poly)
    geo = root_geometry(roots)
    n = poly.degree
    T = esseen_T if esseen_T is not None else max(m.sigma, 4.0)

    ball_log2 = (
        paper_bound_log2("ball", n, geo, m.sigma) if geo.delta_ball > 0 and n >= 2 else math.nan
    )
    sector_log2 = (
        paper_bound_log2("sector", n, geo, m.sigma) if geo.delta_sector > 0 else math.nan
    )

    def capped(log2v: float) -> float:
        if math.isnan(log2v):
            return math.nan
        return 1.0 if log2v >= 0 else 2.0**log2v

    logn = math.log(n) if n >= 2 else 0.0
    return BoundReport(
        n=n,
        mu=m.mu,
        sigma=m.sigma,
        D=D,
        delta_ball=geo.delta_ball,
        delta_sector=geo.delta_sector,
        paper_bound_ball=capped(ball_log2),
        paper_bound_sector=capped(sector_log2),
        paper_bound_ball_log2=ball_log2,
        paper_bound_sector_log2=sector_log2,
        ratio_sector=D * geo.delta_sector * m.sigma,
        ratio_ball=(D * geo.delta_ball * m.sigma / logn) if logn > 0 else math.nan,
        esseen_value=esseen_bound(poly, T),
        esseen_T=T,
    )
