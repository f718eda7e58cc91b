"""Polynomial form of a probability generating function and its root geometry.

The log-potential u(z) = log|f(z)| of a PGF f is the central object: it is
harmonic wherever f is zero-free, and its behaviour near z = 1 controls how
close the underlying variable is to normal.  This module finds the complex
roots (companion-matrix eigenvalues polished by simultaneous Newton steps),
derives the two geometry statistics

    delta_ball   = min |zeta - 1|          over all roots,
    delta_sector = min |arg(zeta)|         over nonzero roots,

and evaluates u and its recentered form u0(z) = u(z) - mu*log|z|, falling
back to the product-over-roots representation when direct evaluation
underflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dist import NORMALIZATION_REJECT_TOL, NORMALIZATION_TOL, DiscretePMF, moments
from .errors import NotAPGFError, PreconditionError, RootFindingError

CONJUGATE_PAIR_TOL = 1e-8
MULTIPLICITY_CLUSTER_TOL = 1e-6
UNDERFLOW_THRESHOLD = 1e-300


@dataclass(frozen=True)
class PGFPoly:
    """Nonnegative-coefficient polynomial with f(1) = 1.

    coeffs[k] multiplies z^k; trailing zero coefficients are trimmed so the
    leading coefficient is positive and the degree is well defined.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float).copy()
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise NotAPGFError("coefficients must be a nonempty 1-d array")
        if np.any(coeffs < -1e-15):
            raise NotAPGFError(f"negative coefficient {coeffs.min()!r}")
        coeffs[coeffs < 0] = 0.0
        nz = np.nonzero(coeffs)[0]
        if nz.size == 0:
            raise NotAPGFError("all coefficients are zero")
        coeffs = coeffs[: nz[-1] + 1]
        total = math.fsum(coeffs)
        if abs(total - 1.0) > NORMALIZATION_REJECT_TOL:
            raise NotAPGFError(
                f"coefficients sum to {total!r}, beyond tolerance {NORMALIZATION_REJECT_TOL}"
            )
        if abs(total - 1.0) > NORMALIZATION_TOL:
            coeffs = coeffs / total
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, z):
        """Horner evaluation; accepts scalars or arrays, real or complex."""
        z = np.asarray(z)
        acc = np.full(z.shape, complex(self.coeffs[-1]))
        for c in self.coeffs[-2::-1]:
            acc = acc * z + c
        return acc if acc.shape else complex(acc)

    def to_pmf(self) -> DiscretePMF:
        return DiscretePMF(np.array(self.coeffs), span=1)

    @classmethod
    def from_pmf(cls, pmf: DiscretePMF) -> "PGFPoly":
        return cls(pmf.dense_unit_probs())

    def to_json(self) -> dict:
        return {"coeffs": [repr(float(c)) for c in self.coeffs]}


@dataclass(frozen=True)
class RootSet:
    """Roots with multiplicity, plus the constants of the product form

        u(z) = sum_{|zeta|<1} m log|1 - zeta/z| + sum_{|zeta|>=1} m log|1 - z/zeta|
               + c + n_inside * log|z|,

    with c fixed by u(1) = 0 and n_inside the number of roots inside the
    unit disk (counted with multiplicity).
    """

    roots: tuple  # ((complex, multiplicity), ...)
    c_x: float
    n_inside: int

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.roots)

    def all_roots(self) -> np.ndarray:
        """Roots repeated by multiplicity."""
        return np.array([z for z, m in self.roots for _ in range(m)], dtype=complex)

    def to_json(self) -> dict:
        return {
            "roots": [[z.real, z.imag, m] for z, m in self.roots],
            "c": self.c_x,
            "n_inside": self.n_inside,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RootSet":
        roots = tuple((complex(re, im), int(m)) for re, im, m in obj["roots"])
        return cls(roots=roots, c_x=float(obj["c"]), n_inside=int(obj["n_inside"]))


@dataclass(frozen=True)
class RootGeometry:
    """Distance of the root set from 1 and from the positive real axis."""

    delta_ball: float
    delta_sector: float


def normalize(raw_coeffs) -> PGFPoly:
    """Divide coefficients by their value at z = 1.

    Entries down to -1e-15 are treated as roundoff and clamped; anything more
    negative is rejected.
    """
    coeffs = np.asarray(raw_coeffs, dtype=float).copy()
    if coeffs.ndim != 1 or coeffs.size == 0:
        raise NotAPGFError("coefficients must be a nonempty 1-d array")
    if np.any(coeffs < -1e-15):
        raise NotAPGFError(f"negative coefficient {coeffs.min()!r}")
    coeffs[coeffs < 0] = 0.0
    total = math.fsum(coeffs)
    if total <= 0 or not math.isfinite(total):
        raise NotAPGFError("coefficients must have positive finite sum")
    return PGFPoly(coeffs / total)


def _aberth_polish(coeffs: np.ndarray, roots: np.ndarray, tol: float, max_iter: int = 60):
    """Simultaneous Newton (Ehrlich-Aberth) correction of all roots at once.

    Stops when the maximum relative backward error sinks below tol; the
    repulsion term keeps approximants of a multiple root separated rather
    than collapsing onto one copy.
    """
    deriv = np.polynomial.polynomial.polyder(coeffs)
    for _ in range(max_iter):
        fz = np.polynomial.polynomial.polyval(roots, coeffs)
        scale = np.polynomial.polynomial.polyval(np.abs(roots), np.abs(coeffs))
        if np.max(np.abs(fz) / np.maximum(scale, 1e-300)) <= tol:
            return roots, True
        fpz = np.polynomial.polynomial.polyval(roots, deriv)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = np.where(fpz != 0, fz / fpz, 0.0)
            diff = roots[:, None] - roots[None, :]
            np.fill_diagonal(diff, np.inf)
            repulse = np.sum(1.0 / diff, axis=1)
            denom = 1.0 - newton * repulse
            step = np.where(np.abs(denom) > 1e-12, newton / denom, newton)
        step = np.where(np.isfinite(step), step, 0.0)
        roots = roots - step
    fz = np.polynomial.polynomial.polyval(roots, coeffs)
    scale = np.polynomial.polynomial.polyval(np.abs(roots), np.abs(coeffs))
    return roots, bool(np.max(np.abs(fz) / np.maximum(scale, 1e-300)) <= tol)


def _pair_conjugates(roots: np.ndarray) -> np.ndarray:
    """Enforce the conjugate symmetry a real-coefficient spectrum must have."""
    roots = roots.copy()
    tol = CONJUGATE_PAIR_TOL * (1.0 + np.abs(roots))
    near_real = np.abs(roots.imag) <= tol
    roots[near_real] = roots[near_real].real
    upper = [i for i in range(roots.size) if roots[i].imag > 0]
    lower = [i for i in range(roots.size) if roots[i].imag < 0]
    used = set()
    for i in upper:
        best, best_d = None, np.inf
        for j in lower:
            if j in used:
                continue
            d = abs(roots[j] - np.conj(roots[i]))
            if d < best_d:
                best, best_d = j, d
        if best is not None and best_d <= CONJUGATE_PAIR_TOL * (1.0 + abs(roots[i])):
            used.add(best)
            mean = 0.5 * (roots[i] + np.conj(roots[best]))
            roots[i] = mean
            roots[best] = np.conj(mean)
    return roots


def _cluster(roots: np.ndarray) -> list:
    """Greedy clustering of numerically coincident roots into multiplicities."""
    remaining = sorted(
        (complex(z) for z in roots), key=lambda z: (round(z.real, 12), round(z.imag, 12))
    )
    clusters = []
    while remaining:
        seed = remaining.pop(0)
        members = [seed]
        keep = []
        for z in remaining:
            if abs(z - seed) <= MULTIPLICITY_CLUSTER_TOL:
                members.append(z)
            else:
                keep.append(z)
        remaining = keep
        center = complex(np.mean(members))
        if abs(center.imag) <= CONJUGATE_PAIR_TOL * (1.0 + abs(center)):
            center = complex(center.real, 0.0)
        clusters.append((center, len(members)))
    return clusters


def _root_form_constant(clusters) -> tuple:
    """c and n_inside of the product form, normalized so u(1) = 0."""
    n_inside = sum(m for z, m in clusters if abs(z) < 1)
    c = 0.0
    for z, m in clusters:
        if abs(z) < 1:
            c -= m * math.log(abs(1.0 - z))
        else:
            c -= m * math.log(abs(1.0 - 1.0 / z))
    return c, n_inside


def find_roots(poly: PGFPoly, tol: float = 1e-10) -> RootSet:
    """All complex roots of the polynomial, clustered into multiplicities.

    Companion-matrix eigenvalues give the starting points; simultaneous
    Newton polishing restores the accuracy lost to balancing.  Backward error
    |f(zeta)| is required to be at most tol times the coefficient-magnitude
    scale at zeta.
    """
    if poly.degree < 1:
        raise PreconditionError("root finding requires degree >= 1")
    coeffs = np.asarray(poly.coeffs, dtype=float)
    n_zero = int(np.nonzero(coeffs)[0][0])
    reduced = coeffs[n_zero:]
    if reduced.size > 1:
        eigen = np.polynomial.polynomial.polyroots(reduced).astype(complex)
        eigen, converged = _aberth_polish(reduced.astype(complex), eigen, tol)
        if not converged:
            raise RootFindingError(
                "root polishing did not reach the requested backward error",
                best_roots=eigen,
            )
        eigen = _pair_conjugates(eigen)
        clusters = _cluster(eigen)
    else:
        clusters = []
    if n_zero:
        clusters.insert(0, (0j, n_zero))
    c_x, n_inside = _root_form_constant(clusters)
    return RootSet(roots=tuple(clusters), c_x=c_x, n_inside=n_inside)


def root_geometry(roots: RootSet) -> RootGeometry:
    """Geometry statistics of a root set.

    Roots at the origin have no argument (sectors live on the punctured
    plane), so they are excluded from the sector minimum; a root set
    consisting only of zeros gets the vacuous value pi.
    """
    if not roots.roots:
        raise PreconditionError("geometry of an empty root set")
    delta_ball = min(abs(z - 1.0) for z, _ in roots.roots)
    args = [abs(np.angle(z)) for z, _ in roots.roots if z != 0]
    delta_sector = min(args) if args else math.pi
    return RootGeometry(delta_ball=delta_ball, delta_sector=float(delta_sector))


def poly_from_roots(roots: RootSet) -> PGFPoly:
    """Reconstruct the normalized polynomial from its root set.

    Conjugate pairs are combined into real quadratic factors so roundoff
    cannot leak imaginary parts into the coefficients.
    """
    acc = np.array([1.0])
    seen = set()
    for idx, (z, m) in enumerate(roots.roots):
        if idx in seen:
            continue
        if abs(z.imag) == 0:
            factor = np.array([-z.real, 1.0])
            for _ in range(m):
                acc = np.convolve(acc, factor)
        else:
            # find the conjugate partner
            partner = None
            for jdx in range(idx + 1, len(roots.roots)):
                w, mw = roots.roots[jdx]
                if jdx not in seen and mw == m and abs(w - np.conj(z)) <= 1e-9 * (1 + abs(z)):
                    partner = jdx
                    break
            if partner is None:
                raise PreconditionError("root set is not conjugate-symmetric")
            seen.add(partner)
            quad = np.array([abs(z) ** 2, -2.0 * z.real, 1.0])
            for _ in range(m):
                acc = np.convolve(acc, quad)
    return normalize(acc)


def _u_root_form(roots: RootSet, z: complex) -> float:
    if z == 0:
        return math.inf if roots.n_inside == 0 else -math.inf
    total = roots.c_x + roots.n_inside * math.log(abs(z))
    for zeta, m in roots.roots:
        if abs(zeta) < 1:
            mod = abs(1.0 - zeta / z)
        else:
            mod = abs(1.0 - z / zeta)
        if mod == 0.0:
            return -math.inf
        total += m * math.log(mod)
    return total


def log_potential(
    poly: PGFPoly,
    z: complex,
    subtract_mean: bool = False,
    roots: RootSet | None = None,
) -> float:
    """u(z) = log|f(z)|, or u0(z) = u(z) - mu*log|z| when subtract_mean is set.

    Returns -inf at exact roots.  Where |f(z)| underflows but is nonzero, the
    product-over-roots form is used instead (supplying a precomputed RootSet
    avoids re-finding roots).
    """
    z = complex(z)
    if subtract_mean and z == 0:
        raise PreconditionError("u0 requires z != 0")
    fz = poly(z)
    mod = abs(fz)
    if mod < UNDERFLOW_THRESHOLD or not math.isfinite(mod):
        # Horner underflows to 0.0 well before z reaches a high-multiplicity
        # root; the product form stays finite except exactly at a root.
        if roots is None:
            roots = find_roots(poly)
        u = _u_root_form(roots, z)
    else:
        u = math.log(mod)
    if subtract_mean and math.isfinite(u):
        mu = moments(poly.to_pmf()).mu
        u -= mu * math.log(abs(z))
    return u


def log_potential_grid(poly: PGFPoly, zs: np.ndarray, subtract_mean: bool = False) -> np.ndarray:
    """Vectorized u (or u0) on an array of points; -inf where f vanishes."""
    fz = poly(np.asarray(zs, dtype=complex))
    mod = np.abs(fz)
    with np.errstate(divide="ignore"):
        u = np.log(mod)
    if subtract_mean:
        mu = moments(poly.to_pmf()).mu
        u = u - mu * np.log(np.abs(zs))
    return u
