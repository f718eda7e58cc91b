"""Sparse multivariate PGFs, constructively stable products, and projections.

A polynomial with no roots in the open polydisk-product of upper half-planes
is stable; products of affine-linear forms with nonnegative coefficients are
stable by inspection (each form has strictly positive imaginary part there),
and that is the only stability certificate this module issues.  For a stable
f and a direction v of nonnegative integers, the univariate projection
f_v(z) = f(z^{v_1}, ..., z^{v_d}) -- the PGF of <v, Y> -- has no zeros in the
sector of half-angle pi / max(v), which is what makes every such projection
approximately normal once its variance grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .roots import PGFPoly, find_roots, root_geometry
from .dist import NORMALIZATION_REJECT_TOL, NORMALIZATION_TOL


@dataclass(frozen=True)
class DirectionVector:
    """Nonnegative-integer projection direction."""

    v: tuple

    def __post_init__(self):
        v = tuple(int(x) for x in self.v)
        if len(v) == 0 or any(x < 0 for x in v) or all(x == 0 for x in v):
            raise PreconditionError("direction must be nonnegative integers, not all zero")
        object.__setattr__(self, "v", v)

    @property
    def guaranteed_half_angle(self) -> float:
        return math.pi / max(self.v)


@dataclass(frozen=True)
class MultiPGF:
    """Sparse multivariate PGF: exponent tuple -> nonnegative coefficient.

    Terms are stored in lexicographic exponent order; coefficients sum to 1
    (renormalized within 1e-9, rejected beyond).  constructively_stable marks
    generating functions built as products of nonnegative affine-linear
    forms, the only route through which stability is asserted.
    """

    terms: tuple  # ((exponents, coeff), ...) sorted lexicographically
    d: int
    constructively_stable: bool = False

    def __post_init__(self):
        cleaned = {}
        for exps, coeff in self.terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.d or any(e < 0 for e in exps):
                raise PreconditionError(f"bad exponent vector {exps}")
            coeff = float(coeff)
            if coeff < -1e-15:
                raise PreconditionError(f"negative coefficient {coeff}")
            if coeff <= 0:
                continue
            cleaned[exps] = cleaned.get(exps, 0.0) + coeff
        if not cleaned:
            raise PreconditionError("no positive terms")
        total = math.fsum(cleaned.values())
        if abs(total - 1.0) > NORMALIZATION_REJECT_TOL:
            raise PreconditionError(f"coefficients sum to {total!r}")
        if abs(total - 1.0) > NORMALIZATION_TOL:
            cleaned = {e: c / total for e, c in cleaned.items()}
        object.__setattr__(self, "terms", tuple(sorted(cleaned.items())))

    @classmethod
    def from_dict(cls, terms: dict, d: int, constructively_stable: bool = False) -> "MultiPGF":
        return cls(terms=tuple(terms.items()), d=d, constructively_stable=constructively_stable)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "stable": self.constructively_stable,
            "terms": [
                {"exponents": list(e), "coeff": repr(float(c))} for e, c in self.terms
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MultiPGF":
        terms = {tuple(t["exponents"]): float(t["coeff"]) for t in obj["terms"]}
        return cls.from_dict(terms, int(obj["d"]), bool(obj.get("stable", False)))


@dataclass(frozen=True)
class CovStats:
    """Mean vector, covariance matrix, and its operator norm."""

    mu: np.ndarray
    A: np.ndarray
    sigma2_max: float


def project(mpgf: MultiPGF, v) -> PGFPoly:
    """PGF of <v, Y>: aggregate each term's coefficient at exponent <v, e>."""
    if not isinstance(v, DirectionVector):
        v = DirectionVector(tuple(v))
    varr = np.array(v.v)
    degree = max(int(np.dot(varr, e)) for e, _ in mpgf.terms)
    coeffs = np.zeros(degree + 1)
    for e, c in mpgf.terms:
        coeffs[int(np.dot(varr, e))] += c
    return PGFPoly(coeffs)


def covariance_stats(mpgf: MultiPGF) -> CovStats:
    """Exact first and second moments by term summation; operator norm by a
    symmetric eigensolve."""
    d = mpgf.d
    exps = np.array([e for e, _ in mpgf.terms], dtype=float)
    coeffs = np.array([c for _, c in mpgf.terms])
    mu = coeffs @ exps
    second = (exps * coeffs[:, None]).T @ exps
    A = second - np.outer(mu, mu)
    A = 0.5 * (A + A.T)
    eigs = np.linalg.eigvalsh(A)
    if eigs.min() < -1e-10 * max(1.0, eigs.max()):
        raise RuntimeError(f"covariance not PSD: min eigenvalue {eigs.min()}")
    return CovStats(mu=mu, A=A, sigma2_max=float(max(eigs.max(), 0.0)))


def _random_forms(d: int, n_forms: int, seed: int) -> list:
    rng = np.random.default_rng(seed)
    forms = []
    for _ in range(n_forms):
        c = rng.uniform(0.0, 1.0, d + 1)
        keep = rng.random(d) < 0.75
        if not keep.any():
            keep[rng.integers(d)] = True
        c[1:] = np.where(keep, c[1:], 0.0)
        c[1:] = np.maximum(c[1:], 0.0)
        if not np.any(c[1:] > 0):
            c[1] = 1.0
        forms.append(c)
    return forms


def stable_product_generator(
    d: int,
    forms=None,
    seed: int | None = None,
    n_forms: int = 10,
) -> MultiPGF:
    """Product of affine-linear forms c0 + sum_i c_i z_i with all c >= 0,
    normalized at the all-ones point and tagged constructively stable.

    Pass explicit forms (sequences of length d+1, constant term first), or a
    seed to draw n_forms random ones deterministically.
    """
    if d < 1:
        raise PreconditionError("dimension must be at least 1")
    if forms is None:
        if seed is None:
            raise PreconditionError("either forms or a seed must be supplied")
        forms = _random_forms(d, n_forms, seed)
    terms = {tuple([0] * d): 1.0}
    for form in forms:
        form = np.asarray(form, dtype=float)
        if form.shape != (d + 1,):
            raise PreconditionError(f"form must have length d+1 = {d + 1}")
        if np.any(form < 0):
            raise PreconditionError("form coefficients must be nonnegative")
        if not np.any(form[1:] > 0):
            raise PreconditionError("form has an all-zero linear part")
        new_terms: dict = {}
        for e, c in terms.items():
            if form[0] > 0:
                new_terms[e] = new_terms.get(e, 0.0) + c * form[0]
            for i in range(d):
                if form[1 + i] > 0:
                    e2 = list(e)
                    e2[i] += 1
                    e2 = tuple(e2)
                    new_terms[e2] = new_terms.get(e2, 0.0) + c * form[1 + i]
        terms = new_terms
    total = math.fsum(terms.values())
    terms = {e: c / total for e, c in terms.items()}
    return MultiPGF.from_dict(terms, d, constructively_stable=True)


@dataclass(frozen=True)
class SectorCheckReport:
    """Result of the projected-root sector check for one direction."""

    v: tuple
    passed: bool
    threshold: float
    min_abs_arg: float | None  # None when the projection has no nonzero roots

    def to_json(self) -> dict:
        return {
            "v": list(self.v),
            "pass": self.passed,
            "threshold": self.threshold,
            "min_abs_arg": self.min_abs_arg,
        }


def projection_sector_check(mpgf: MultiPGF, v, tol: float = 1e-6) -> SectorCheckReport:
    """Check that every nonzero root of the projection onto v has argument at
    least pi/max(v) - tol in absolute value.

    Only constructively stable inputs are accepted: stability of arbitrary
    multivariate polynomials is not certified here.
    """
    if not mpgf.constructively_stable:
        raise PreconditionError("sector guarantee requires a constructively stable PGF")
    if not isinstance(v, DirectionVector):
        v = DirectionVector(tuple(v))
    proj = project(mpgf, v)
    threshold = v.guaranteed_half_angle
    if proj.degree < 1:
        return SectorCheckReport(v=v.v, passed=True, threshold=threshold, min_abs_arg=None)
    rs = find_roots(proj)
    args = [abs(np.angle(z)) for z, _ in rs.roots if z != 0]
    if not args:
        return SectorCheckReport(v=v.v, passed=True, threshold=threshold, min_abs_arg=None)
    min_arg = float(min(args))
    return SectorCheckReport(
        v=v.v,
        passed=min_arg >= threshold - tol,
        threshold=threshold,
        min_abs_arg=min_arg,
    )


def all_directions(d: int, max_entry: int = 3):
    """Every nonzero direction in {0, ..., max_entry}^d, lexicographically."""
    grid = np.indices([max_entry + 1] * d).reshape(d, -1).T
    return [DirectionVector(tuple(row)) for row in grid if row.any()]
