"""Monte Carlo estimates of Brownian exit probabilities by walk-on-spheres.

Each walker jumps to a uniformly random point on the largest disk inscribed
at its current position, which reproduces the exact exit law of planar
Brownian motion up to an absorption shell of width epsilon_abs around the
boundary.  There is no time-discretization bias; the only bias is the
O(epsilon_abs) side-assignment at absorption, far below statistical error at
the sample sizes used here.

Supported domains: axis-aligned rectangles (exit through the vertical ends
versus top/bottom), truncated sectors (exit through the circular ends versus
the straight sides; either simulated directly or through the exponential map
onto a rectangle, under which Brownian paths are invariant), and disks (for
checking the mean-value property of a harmonic function).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .harmonic import SectorSpec

DEFAULT_SHELL_FRACTION = 1e-5
DEFAULT_BATCHES = 16


@dataclass(frozen=True)
class RectangleSpec:
    """Open rectangle {|Re z| < b, |Im z| < delta}; its "ends" are the two
    vertical edges |Re z| = b."""

    b: float
    delta: float

    def __post_init__(self):
        if self.b <= 0 or self.delta <= 0:
            raise PreconditionError("rectangle half-sizes must be positive")

    @property
    def diameter(self) -> float:
        return 2.0 * math.hypot(self.b, self.delta)


@dataclass(frozen=True)
class WosConfig:
    """Walk-on-spheres parameters.  epsilon_abs defaults to 1e-5 times the
    domain diameter; n_batches fixes the RNG stream partition so results do
    not depend on how batches are scheduled."""

    seed: int
    epsilon_abs: float | None = None
    max_steps: int = 100_000
    n_batches: int = DEFAULT_BATCHES

    def __post_init__(self):
        if self.epsilon_abs is not None and self.epsilon_abs <= 0:
            raise PreconditionError("epsilon_abs must be positive")
        if self.max_steps < 1 or self.n_batches < 1:
            raise PreconditionError("max_steps and n_batches must be positive")

    def shell(self, diameter: float) -> float:
        return self.epsilon_abs if self.epsilon_abs is not None else DEFAULT_SHELL_FRACTION * diameter


@dataclass(frozen=True)
class ExitEstimate:
    """Binomial estimate of an exit probability."""

    p_hat: float
    stderr: float
    n_samples: int
    seed: int

    def to_json(self) -> dict:
        return {
            "p_hat": self.p_hat,
            "stderr": self.stderr,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def _batch_sizes(n: int, n_batches: int) -> list[int]:
    base, extra = divmod(n, n_batches)
    return [base + (1 if i < extra else 0) for i in range(n_batches)]


def _batch_rng(seed: int, index: int) -> np.random.Generator:
    # Philox is counter-based; keying by (seed, batch index) gives
    # independent, replayable streams.
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("PGFCLT_WORKERS", "1")))
    except ValueError:
        return 1


def _run_batches(worker, sizes):
    n_workers = _worker_count()
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            return list(pool.map(worker, range(len(sizes))))
    return [worker(i) for i in range(len(sizes))]


def _walk(start: complex, n: int, dist_fn, eps: float, max_steps: int, rng) -> np.ndarray:
    """Run n walkers from start until all are within eps of the boundary;
    returns the absorbed positions."""
    z = np.full(n, complex(start), dtype=complex)
    alive = dist_fn(z) > eps
    steps = 0
    while np.any(alive):
        if steps >= max_steps:
            raise RuntimeError(f"walk-on-spheres exceeded {max_steps} steps")
        za = z[alive]
        d = dist_fn(za)
        theta = rng.uniform(0.0, 2.0 * math.pi, za.size)
        za = za + d * np.exp(1j * theta)
        z[alive] = za
        alive_local = dist_fn(za) > eps
        idx = np.flatnonzero(alive)
        alive[idx] = alive_local
        steps += 1
    return z


def _rect_distances(Q: RectangleSpec, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dx = Q.b - np.abs(z.real)
    dy = Q.delta - np.abs(z.imag)
    return dx, dy


def estimate_exit_rectangle(start: complex, Q: RectangleSpec, cfg: WosConfig, n: int) -> ExitEstimate:
    """Probability that Brownian motion from start leaves the rectangle
    through one of the vertical ends |Re z| = b."""
    start = complex(start)
    dx0, dy0 = Q.b - abs(start.real), Q.delta - abs(start.imag)
    if dx0 < 0 or dy0 < 0:
        raise PreconditionError("start lies outside the rectangle")
    eps = cfg.shell(Q.diameter)

    def dist(z):
        dx, dy = _rect_distances(Q, z)
        return np.minimum(dx, dy)

    def run(i: int) -> int:
        rng = _batch_rng(cfg.seed, i)
        size = sizes[i]
        if size == 0:
            return 0
        absorbed = _walk(start, size, dist, eps, cfg.max_steps, rng)
        dx, dy = _rect_distances(Q, absorbed)
        return int(np.count_nonzero(dx <= dy))

    sizes = _batch_sizes(n, cfg.n_batches)
    hits = sum(_run_batches(run, sizes))
    p = hits / n
    return ExitEstimate(p_hat=p, stderr=math.sqrt(p * (1.0 - p) / n), n_samples=n, seed=cfg.seed)


def _sector_distances(sector: SectorSpec, z: np.ndarray):
    """Distance to the circular ends and to the straight sides of a symmetric
    truncated sector."""
    R = sector.R
    delta = sector.beta
    mod = np.abs(z)
    d_ends = np.minimum(R - mod, mod - 1.0 / R)
    # the two side segments from (1/R) e^{+-i delta} to R e^{+-i delta}
    d_sides = np.full(z.shape, np.inf)
    for sgn in (1.0, -1.0):
        a = (1.0 / R) * np.exp(1j * sgn * delta)
        bb = R * np.exp(1j * sgn * delta)
        seg = bb - a
        t = np.clip(((z - a) * np.conj(seg)).real / abs(seg) ** 2, 0.0, 1.0)
        proj = a + t * seg
        d_sides = np.minimum(d_sides, np.abs(z - proj))
    return d_ends, d_sides


def estimate_exit_sector(
    start: complex,
    sector: SectorSpec,
    cfg: WosConfig,
    n: int,
    route: str = "direct",
) -> ExitEstimate:
    """Probability that Brownian motion from start leaves the truncated sector
    through the circular ends |z| in {1/R, R}.

    route="direct" walks in the sector itself; route="conformal" walks in the
    rectangle {|Re w| < log R, |Im w| < delta} from w = log(start), which has
    the identical exit law because the exponential map preserves Brownian
    paths and carries rectangle ends to sector ends.
    """
    if sector.alpha != -sector.beta:
        raise PreconditionError("exit estimates require a symmetric sector")
    start = complex(start)
    if not bool(sector.contains(start)):
        raise PreconditionError("start lies outside the sector")
    if route == "conformal":
        w0 = complex(math.log(abs(start)), math.atan2(start.imag, start.real))
        return estimate_exit_rectangle(w0, RectangleSpec(b=math.log(sector.R), delta=sector.beta), cfg, n)
    if route != "direct":
        raise PreconditionError(f"unknown route {route!r}")

    eps = cfg.shell(2.0 * sector.R)

    def dist(z):
        d_ends, d_sides = _sector_distances(sector, z)
        return np.minimum(d_ends, d_sides)

    def run(i: int) -> int:
        rng = _batch_rng(cfg.seed, i)
        size = sizes[i]
        if size == 0:
            return 0
        absorbed = _walk(start, size, dist, eps, cfg.max_steps, rng)
        d_ends, d_sides = _sector_distances(sector, absorbed)
        return int(np.count_nonzero(d_ends <= d_sides))

    sizes = _batch_sizes(n, cfg.n_batches)
    hits = sum(_run_batches(run, sizes))
    p = hits / n
    return ExitEstimate(p_hat=p, stderr=math.sqrt(p * (1.0 - p) / n), n_samples=n, seed=cfg.seed)


@dataclass(frozen=True)
class MeanValueReport:
    """Monte Carlo mean of a function over Brownian exit points of a disk,
    against its value at the start point."""

    mc_mean: float
    u_start: float
    stderr: float
    z_score: float
    n_samples: int
    seed: int

    @property
    def passed(self) -> bool:
        return abs(self.z_score) <= 4.0

    def to_json(self) -> dict:
        return {
            "mc_mean": self.mc_mean,
            "u_start": self.u_start,
            "stderr": self.stderr,
            "z_score": self.z_score,
            "pass": self.passed,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def mean_value_check(
    potential,
    start: complex,
    center: complex,
    radius: float,
    cfg: WosConfig,
    n: int,
) -> MeanValueReport:
    """Estimate E[u(B_exit)] for Brownian motion killed on a circle and compare
    with u(start); for u harmonic on the disk the two agree (|z| <= 4)."""
    start, center = complex(start), complex(center)
    if abs(start - center) >= radius:
        raise PreconditionError("start must lie strictly inside the disk")
    eps = cfg.shell(2.0 * radius)

    def dist(z):
        return radius - np.abs(z - center)

    def run(i: int):
        rng = _batch_rng(cfg.seed, i)
        size = sizes[i]
        if size == 0:
            return 0.0, 0.0, 0
        absorbed = _walk(start, size, dist, eps, cfg.max_steps, rng)
        vals = np.asarray(potential(absorbed), dtype=float)
        return float(np.sum(vals)), float(np.sum(vals * vals)), size

    sizes = _batch_sizes(n, cfg.n_batches)
    parts = _run_batches(run, sizes)
    total = math.fsum(p[0] for p in parts)
    total_sq = math.fsum(p[1] for p in parts)
    mc_mean = total / n
    var = max(total_sq / n - mc_mean * mc_mean, 0.0)
    se = math.sqrt(var / n)
    u0 = float(np.asarray(potential(np.array([start], dtype=complex)), dtype=float)[0])
    if se == 0.0:
        z = 0.0 if mc_mean == u0 else math.inf
    else:
        z = (mc_mean - u0) / se
    return MeanValueReport(mc_mean=mc_mean, u_start=u0, stderr=se, z_score=z, n_samples=n, seed=cfg.seed)
