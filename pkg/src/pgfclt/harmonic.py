"""Grid-based verification of the positivity machinery of log-potentials.

All checks share the same shape: evaluate u (or a difference of u values) on
a deterministic grid over a ball or truncated sector, report the minimum
slack and the worst point, and pass when the slack clears a small negative
tolerance.  Failures of these properties in practice are gross, not
marginal, so grids rather than certified arithmetic are the right tool.

Grid points within 1e-6 of a root are excluded and counted: u diverges to
-inf there and would produce spurious sentinel failures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EvaluationAtRootError,
    InapplicableCheckError,
    PreconditionError,
    RootFindingError,
)
from .roots import PGFPoly, RootSet, find_roots, log_potential_grid, root_geometry
from .dist import moments

WEAK_POSITIVITY_SLACK = -1e-10
B_DECREASING_SLACK = -1e-9
ROOT_EXCLUSION_RADIUS = 1e-6
REGION_ROOT_MARGIN = 1e-6
MAX_PAIR_ANGLES = 4096


@dataclass(frozen=True)
class SectorSpec:
    """Truncated sector {z : |z| in [1/R, R], arg(z) in [alpha, beta]}."""

    alpha: float
    beta: float
    R: float
    truncated: bool = True

    def __post_init__(self):
        if not (-math.pi <= self.alpha <= self.beta <= math.pi):
            raise PreconditionError("need -pi <= alpha <= beta <= pi")
        if self.R <= 1.0:
            raise PreconditionError("outer radius must exceed 1")

    @classmethod
    def symmetric(cls, eps: float, R: float) -> "SectorSpec":
        return cls(alpha=-eps, beta=eps, R=R)

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        mod = np.abs(z)
        ok = (mod > 0) & (np.angle(z) >= self.alpha) & (np.angle(z) <= self.beta)
        if self.truncated:
            ok &= (mod >= 1.0 / self.R) & (mod <= self.R)
        return ok

    def describe(self) -> dict:
        return {"kind": "sector", "alpha": self.alpha, "beta": self.beta, "R": self.R}


@dataclass(frozen=True)
class BallSpec:
    """Disk of given center (on the positive real axis) and radius."""

    center: complex
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise PreconditionError("radius must be positive")

    def contains(self, z) -> np.ndarray:
        return np.abs(np.asarray(z, dtype=complex) - self.center) <= self.radius

    def describe(self) -> dict:
        c = complex(self.center)
        return {"kind": "ball", "center": [c.real, c.imag], "radius": self.radius}


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid: radial x angular point counts over a region."""

    region: SectorSpec | BallSpec
    n_radial: int = 256
    n_angular: int = 1024

    def __post_init__(self):
        if self.n_radial < 8 or self.n_angular < 8:
            raise PreconditionError("grid counts must be at least 8")

    def points(self) -> np.ndarray:
        if isinstance(self.region, SectorSpec):
            radii = np.geomspace(1.0 / self.region.R, self.region.R, self.n_radial)
            angles = np.linspace(self.region.alpha, self.region.beta, self.n_angular)
            return (radii[:, None] * np.exp(1j * angles[None, :])).ravel()
        c, r = complex(self.region.center), self.region.radius
        radii = r * (np.arange(1, self.n_radial + 1) / self.n_radial)
        angles = np.linspace(0.0, 2.0 * math.pi, self.n_angular, endpoint=False)
        pts = (c + radii[:, None] * np.exp(1j * angles[None, :])).ravel()
        return np.concatenate(([c], pts))

    def describe(self) -> dict:
        return {
            "n_radial": self.n_radial,
            "n_angular": self.n_angular,
            "region": self.region.describe(),
        }


@dataclass
class CheckReport:
    """Outcome of a grid check: pass/fail, slack, worst point, skipped count."""

    name: str
    passed: bool
    min_slack: float
    worst_point: complex | None = None
    n_skipped: int = 0
    grid: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        w = None
        if self.worst_point is not None:
            w = [complex(self.worst_point).real, complex(self.worst_point).imag]
        return {
            "check": self.name,
            "pass": self.passed,
            "min_slack": self.min_slack,
            "worst_point": w,
            "n_skipped": self.n_skipped,
            "grid": self.grid,
            "detail": self.detail,
        }


def _roots_for_exclusion(poly: PGFPoly) -> np.ndarray:
    """Root locations used only to mask grid points; empty on failure."""
    if poly.degree < 1:
        return np.empty(0, dtype=complex)
    try:
        rs = find_roots(poly)
    except RootFindingError:
        return np.empty(0, dtype=complex)
    return np.array([z for z, _ in rs.roots], dtype=complex)


def _mask_near_roots(points: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """True where a point is safely away from every root."""
    if roots.size == 0:
        return np.ones(points.shape, dtype=bool)
    d = np.min(np.abs(points[:, None] - roots[None, :]), axis=1)
    return d > ROOT_EXCLUSION_RADIUS


def weak_positivity_potential(u_values_at_mod, u_values, points) -> tuple[float, complex]:
    """Min of u(|z|) - u(z) over precomputed values; returns (slack, worst point)."""
    slack = u_values_at_mod - u_values
    idx = int(np.argmin(slack))
    return float(slack[idx]), complex(points[idx])


def weak_positivity_check(poly: PGFPoly, grid: GridSpec) -> CheckReport:
    """Verify u(|z|) >= u(z) on the grid; the defining inequality of
    nonnegative-coefficient polynomials."""
    points = grid.points()
    keep = _mask_near_roots(points, _roots_for_exclusion(poly))
    pts = points[keep]
    u = log_potential_grid(poly, pts)
    u_mod = log_potential_grid(poly, np.abs(pts).astype(complex))
    finite = np.isfinite(u) & np.isfinite(u_mod)
    n_skipped = int(points.size - pts.size + np.count_nonzero(~finite))
    pts, u, u_mod = pts[finite], u[finite], u_mod[finite]
    if pts.size == 0:
        return CheckReport("weak_positivity", False, -math.inf, None, n_skipped, grid.describe())
    slack, worst = weak_positivity_potential(u_mod, u, pts)
    return CheckReport(
        name="weak_positivity",
        passed=slack >= WEAK_POSITIVITY_SLACK,
        min_slack=slack,
        worst_point=worst,
        n_skipped=n_skipped,
        grid=grid.describe(),
    )


def _ring_angular_range(region, rho: float) -> tuple[float, float] | None:
    """Angular interval [0, theta_max] of the ring of radius rho inside region."""
    if isinstance(region, SectorSpec):
        if not (1.0 / region.R <= rho <= region.R):
            return None
        hi = min(region.beta, math.pi)
        lo = max(0.0, region.alpha)
        if hi <= lo:
            return None
        return lo, hi
    c, r = abs(complex(region.center)), region.radius
    if rho <= max(0.0, c - r) or rho >= c + r:
        return None
    cosv = (rho * rho + c * c - r * r) / (2.0 * rho * c)
    if cosv >= 1.0:
        return None
    theta_max = math.pi if cosv <= -1.0 else math.acos(cosv)
    return 0.0, theta_max


def _region_radii(region, n_radial: int) -> np.ndarray:
    if isinstance(region, SectorSpec):
        return np.geomspace(1.0 / region.R, region.R, n_radial)
    c, r = abs(complex(region.center)), region.radius
    lo = max(1e-12, c - r * (1 - 1e-9))
    return np.linspace(lo, c + r * (1 - 1e-9), n_radial)


def b_decreasing_check(poly: PGFPoly, region, b: float, grid: GridSpec | None = None) -> CheckReport:
    """Verify u(rho e^{i theta1}) - u(rho e^{i theta2}) + b >= 0 for
    0 <= theta1 <= theta2 on rings inside the region.

    On each ring the minimum over ordered pairs equals
    min over theta2 of (running min of u up to theta2) - u(theta2), so a
    prefix-minimum scan covers every grid pair in linear time.
    """
    if b < 0:
        raise PreconditionError("b must be nonnegative")
    if grid is None:
        grid = GridSpec(region=region)
    n_ang = min(grid.n_angular, MAX_PAIR_ANGLES)
    roots = _roots_for_exclusion(poly)
    best = math.inf
    worst = None
    n_skipped = 0
    for rho in _region_radii(region, grid.n_radial):
        rng = _ring_angular_range(region, float(rho))
        if rng is None:
            continue
        lo, hi = rng
        angles = np.linspace(lo, hi, n_ang)
        pts = rho * np.exp(1j * angles)
        keep = _mask_near_roots(pts, roots)
        n_skipped += int(np.count_nonzero(~keep))
        pts = pts[keep]
        if pts.size < 2:
            continue
        u = log_potential_grid(poly, pts)
        finite = np.isfinite(u)
        n_skipped += int(np.count_nonzero(~finite))
        u, pts = u[finite], pts[finite]
        if u.size < 2:
            continue
        prefix = np.minimum.accumulate(u)
        slack = prefix[:-1] - u[1:] + b
        idx = int(np.argmin(slack))
        if slack[idx] < best:
            best = float(slack[idx])
            worst = complex(pts[idx + 1])
    if not math.isfinite(best):
        return CheckReport("b_decreasing", False, -math.inf, None, n_skipped, grid.describe())
    return CheckReport(
        name="b_decreasing",
        passed=best >= B_DECREASING_SLACK,
        min_slack=best,
        worst_point=worst,
        n_skipped=n_skipped,
        grid=grid.describe(),
        detail={"b": b},
    )


def certified_b(u_max_ends: float, r: float, R: float, delta: float) -> float:
    """Smallest b with (r/R)^(1/delta) * u_max_ends <= 3b/8.

    A weakly positive harmonic function whose modulus on the sector ends is
    at most u_max_ends is then b-decreasing on the inner truncated sector.
    """
    if u_max_ends < 0:
        raise PreconditionError("u_max_ends must be nonnegative")
    if not (R > r > 0):
        raise PreconditionError("need R > r > 0")
    if not (0 < delta < math.pi):
        raise PreconditionError("delta must lie in (0, pi)")
    return (8.0 / 3.0) * (r / R) ** (1.0 / delta) * u_max_ends


def difference_eval(poly: PGFPoly, z: complex, kind: str, angle: float, b: float) -> float:
    """Difference functions of the log-potential:

        h(z)   = u(z) - u(e^{i angle} conj(z)) + b   (reflection about angle/2)
        phi(z) = u(z) - u(e^{i angle} z) + b         (rotation by angle)
    """
    from .roots import log_potential

    z = complex(z)
    if kind == "h":
        other = np.exp(1j * angle) * np.conj(z)
    elif kind == "phi":
        other = np.exp(1j * angle) * z
    else:
        raise PreconditionError(f"kind must be 'h' or 'phi', got {kind!r}")
    u1 = log_potential(poly, z)
    u2 = log_potential(poly, complex(other))
    if not (math.isfinite(u1) and math.isfinite(u2)):
        raise EvaluationAtRootError("difference function evaluated at a root")
    return u1 - u2 + b


def money_check(
    poly: PGFPoly,
    eps: float,
    eta: float,
    b: float = 0.0,
    grid: GridSpec | None = None,
) -> CheckReport:
    """Check max_{B(1,eps)} |u0| <= 3^4 * 3^(96 eps/eta) * phi_{eta,b}(1).

    Hypotheses -- zero-freeness on B(1, 8 eps) and b-decreasingness there --
    are verified first; if they fail the check is inapplicable rather than
    failed.  The comparison is done in logs so the 3^(96 eps/eta) factor
    cannot overflow.
    """
    if not (0 < eps < 0.125):
        raise PreconditionError("eps must lie in (0, 1/8)")
    if not (0 < eta <= eps):
        raise PreconditionError("eta must lie in (0, eps]")
    if b < 0:
        raise PreconditionError("b must be nonnegative")

    if poly.degree >= 1:
        geo = root_geometry(find_roots(poly))
        delta_ball = geo.delta_ball
    else:
        delta_ball = math.inf
    if delta_ball <= 8.0 * eps + REGION_ROOT_MARGIN:
        raise InapplicableCheckError(
            f"not zero-free on B(1, 8 eps): nearest root at distance {delta_ball}"
        )
    hypothesis_ball = BallSpec(center=1.0 + 0j, radius=8.0 * eps)
    bdec = b_decreasing_check(
        poly, hypothesis_ball, b, GridSpec(region=hypothesis_ball, n_radial=64, n_angular=256)
    )
    if not bdec.passed:
        raise InapplicableCheckError(
            f"potential is not {b}-decreasing on B(1, 8 eps): slack {bdec.min_slack}"
        )

    if grid is None:
        grid = GridSpec(region=BallSpec(center=1.0 + 0j, radius=eps))
    pts = grid.points()
    u0 = log_potential_grid(poly, pts, subtract_mean=True)
    finite = np.isfinite(u0)
    if np.any(finite):
        mags = np.where(finite, np.abs(u0), -np.inf)
        worst_idx = int(np.argmax(mags))
        lhs = float(mags[worst_idx])
        worst = complex(pts[worst_idx])
    else:
        lhs, worst = 0.0, None

    phi1 = difference_eval(poly, 1.0 + 0j, "phi", eta, b)
    phi1 = max(phi1, 0.0)  # b-decreasing guarantees phi >= 0; clamp roundoff
    log_factor = (4.0 + 96.0 * eps / eta) * math.log(3.0)
    if phi1 == 0.0:
        passed = lhs == 0.0
        margin = math.inf if passed else -math.inf
    else:
        log_rhs = log_factor + math.log(phi1)
        margin = log_rhs - (math.log(lhs) if lhs > 0 else -math.inf)
        passed = margin >= -math.log1p(1e-9)
    return CheckReport(
        name="money",
        passed=passed,
        min_slack=margin,
        worst_point=worst,
        grid=grid.describe(),
        detail={"lhs_max_abs_u0": lhs, "phi_at_1": phi1, "log_rhs_factor": log_factor},
    )


def poisson_density_ball(z: complex, w: complex, center: complex = 0j, radius: float = 1.0) -> float:
    """Density (w.r.t. arclength) of the Brownian exit distribution of a disk:

        P_z(w) = (radius^2 - |z - c|^2) / (2 pi radius |z - w|^2),

    for z inside and w on the boundary.  At z = c it is the uniform density
    1/(2 pi radius), and it integrates to 1 over the boundary circle.
    """
    z, w, center = complex(z), complex(w), complex(center)
    if radius <= 0:
        raise PreconditionError("radius must be positive")
    dz = abs(z - center)
    if dz >= radius * (1.0 - 1e-12):
        raise PreconditionError("z must lie strictly inside the ball")
    if abs(abs(w - center) - radius) > 1e-8 * radius:
        raise PreconditionError("w must lie on the boundary circle")
    return (radius * radius - dz * dz) / (2.0 * math.pi * radius * abs(z - w) ** 2)


def end_bound(n: int, delta: float) -> float:
    """7 n log(4/delta): a ceiling for |u| on thin truncated sectors around 1
    when the polynomial of degree n is zero-free in B(1, delta).

    The guarantee is stated for delta in (0, 1/2); the formula itself is
    evaluated for any delta in (0, 4), where the log factor stays positive.
    """
    if n < 1:
        raise PreconditionError("degree must be at least 1")
    if not (0 < delta < 4):
        raise PreconditionError("delta must lie in (0, 4)")
    return 7.0 * n * math.log(4.0 / delta)


def harnack_segment_bound(d: float, eps: float) -> float:
    """Two-sided Harnack ratio bound 3^(2d/eps + 1) along a segment of length d
    kept at distance eps from the boundary."""
    if d < 0 or eps <= 0:
        raise PreconditionError("need d >= 0 and eps > 0")
    return 3.0 ** (2.0 * d / eps + 1.0)


# --- planar geometry predicates -------------------------------------------
#
# Each function takes an array of sample points satisfying the hypothesis of
# the corresponding inclusion and returns a boolean array marking samples
# that also satisfy the conclusion (all of them should).


def ball_gives_modulus_argument(zs, eps: float) -> np.ndarray:
    """For z in B(1, eps), eps <= 1/2:  |z| in [1-eps, 1+eps] and |arg z| <= 2 eps."""
    zs = np.asarray(zs, dtype=complex)
    mod = np.abs(zs)
    return (mod >= 1.0 - eps) & (mod <= 1.0 + eps) & (np.abs(np.angle(zs)) <= 2.0 * eps)


def modulus_argument_gives_ball(zs, eps: float) -> np.ndarray:
    """For |z| in [1-eps, 1+eps], |arg z| <= eps, eps <= 1:  |z - 1| <= 2 eps."""
    zs = np.asarray(zs, dtype=complex)
    return np.abs(zs - 1.0) <= 2.0 * eps


def exp_ball_in_ball(ws, eps: float) -> np.ndarray:
    """For w in B(0, eps), eps < 1/2:  e^w lies in B(1, 2 eps)."""
    ws = np.asarray(ws, dtype=complex)
    return np.abs(np.exp(ws) - 1.0) <= 2.0 * eps
