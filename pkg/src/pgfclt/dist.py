"""Exact arithmetic on finitely supported lattice distributions.

A distribution lives on {0, k, 2k, ...} for an integer span k >= 1 and is
stored as the probability vector of the underlying {0, 1, 2, ...} law.
Everything here is deterministic and exact up to floating point: moments and
cumulants by compensated summation and the moment-to-cumulant recurrence,
and the Kolmogorov distance to the standard normal by evaluating the normal
CDF at every standardized atom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import (
    DegenerateDistributionError,
    NotAPGFError,
    PreconditionError,
    SpanMismatchError,
)

# Inputs whose mass differs from 1 by more than this are rejected;
# anything closer is silently renormalized.
NORMALIZATION_REJECT_TOL = 1e-9
NORMALIZATION_TOL = 1e-12
# Entries more negative than this are genuine sign errors, not roundoff.
NEGATIVE_CLAMP_TOL = -1e-15


def _kahan_sum(values: np.ndarray) -> float:
    """Compensated sum (Shewchuk, via math.fsum): correctly rounded, so wide
    supports (~1e6 atoms) lose nothing to accumulation order."""
    return math.fsum(values)


def _weighted_power_sum(probs: np.ndarray, values: np.ndarray, r: int) -> float:
    return _kahan_sum(probs * values**r)


@dataclass(frozen=True)
class MomentSummary:
    """Mean and variance of a lattice distribution."""

    mu: float
    sigma2: float
    sigma: float = field(init=False)

    def __post_init__(self):
        if self.sigma2 < 0:
            object.__setattr__(self, "sigma2", 0.0)
        object.__setattr__(self, "sigma", math.sqrt(self.sigma2))


@dataclass(frozen=True)
class DiscretePMF:
    """Probability vector on {0, span, 2*span, ...}.

    probs[j] is the mass at j*span.  All entries must be nonnegative and sum
    to 1 within NORMALIZATION_REJECT_TOL (they are renormalized on entry).
    """

    probs: np.ndarray
    span: int = 1

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).copy()
        if probs.ndim != 1 or probs.size == 0:
            raise NotAPGFError("probability vector must be a nonempty 1-d array")
        if int(self.span) < 1:
            raise PreconditionError(f"span must be a positive integer, got {self.span}")
        object.__setattr__(self, "span", int(self.span))
        neg = probs < 0
        if np.any(probs < NEGATIVE_CLAMP_TOL):
            worst = probs.min()
            raise NotAPGFError(f"negative probability {worst!r}")
        probs[neg] = 0.0
        total = _kahan_sum(probs)
        if not math.isfinite(total) or total <= 0:
            raise NotAPGFError("probabilities must have positive finite mass")
        if abs(total - 1.0) > NORMALIZATION_REJECT_TOL:
            raise NotAPGFError(
                f"probabilities sum to {total!r}, beyond tolerance {NORMALIZATION_REJECT_TOL}"
            )
        if abs(total - 1.0) > NORMALIZATION_TOL:
            probs = probs / total
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def n_atoms(self) -> int:
        return self.probs.size

    def atoms(self) -> np.ndarray:
        """Support points j*span, including zero-mass placeholders."""
        return self.span * np.arange(self.probs.size, dtype=float)

    def dense_unit_probs(self) -> np.ndarray:
        """Probability vector on {0, 1, 2, ...} with zeros filling skipped atoms."""
        if self.span == 1:
            return np.array(self.probs)
        dense = np.zeros(self.span * (self.probs.size - 1) + 1)
        dense[:: self.span] = self.probs
        return dense

    def to_json(self) -> dict:
        return {"probs": [repr(float(p)) for p in self.probs], "span": self.span}

    @classmethod
    def from_json(cls, obj: dict) -> "DiscretePMF":
        return cls(np.array([float(s) for s in obj["probs"]]), int(obj.get("span", 1)))


def moments(pmf: DiscretePMF) -> MomentSummary:
    """Mean and variance by compensated summation over the support."""
    values = pmf.atoms()
    mu = _weighted_power_sum(pmf.probs, values, 1)
    # Central second moment: summing (x-mu)^2 directly avoids the cancellation
    # of E[X^2] - mu^2 on wide supports.
    sigma2 = _kahan_sum(pmf.probs * (values - mu) ** 2)
    return MomentSummary(mu=mu, sigma2=max(sigma2, 0.0))


def cumulants_from_pmf(pmf: DiscretePMF, J: int):
    """Cumulants kappa_j and normalized cumulants a_j = kappa_j/j! for j <= J.

    Computed through central moments and the moment-to-cumulant recurrence
    (the Bell-polynomial triangle).  Cumulants of order >= 2 are
    shift-invariant, so centering first removes the cancellation that raw
    moments would suffer on supports with a large mean.
    """
    from .cumulants import CumulantSeq  # local import to avoid a cycle

    if J < 2 or J > 64:
        raise PreconditionError(f"truncation order must be in [2, 64], got {J}")
    values = pmf.atoms()
    mu = _weighted_power_sum(pmf.probs, values, 1)
    centered = values - mu
    central = np.zeros(J + 1)
    central[0] = 1.0
    kappa = np.zeros(J + 1)
    kappa[1] = mu
    with np.errstate(over="ignore", invalid="ignore"):
        for r in range(2, J + 1):
            central[r] = _kahan_sum(pmf.probs * centered**r)
        # kappa_n = c_n - sum_{i=2}^{n-2} C(n-1, i-1) kappa_i c_{n-i} for the
        # centered variable (its first moment vanishes).
        for n in range(2, J + 1):
            acc = central[n]
            for i in range(2, n - 1):
                acc -= math.comb(n - 1, i - 1) * kappa[i] * central[n - i]
            kappa[n] = acc
            if not math.isfinite(kappa[n]):
                raise OverflowError(f"cumulant of order {n} exceeds the representable range")
    a = np.zeros(J + 1)
    for j in range(1, J + 1):
        a[j] = kappa[j] / math.factorial(j)
    return CumulantSeq(a=a, kappa=kappa, J=J)


def convolve(p: DiscretePMF, q: DiscretePMF) -> DiscretePMF:
    """Distribution of the sum of independent draws from p and q."""
    if p.span != q.span:
        raise SpanMismatchError(f"span mismatch: {p.span} != {q.span}")
    return DiscretePMF(np.convolve(p.probs, q.probs), span=p.span)


def scale_support(p: DiscretePMF, k: int) -> DiscretePMF:
    """Law of k*X: the same probability vector on a lattice k times as wide."""
    if k < 1:
        raise PreconditionError(f"scale factor must be a positive integer, got {k}")
    if k == 1:
        return p
    return DiscretePMF(np.array(p.probs), span=p.span * k)


def kolmogorov_distance(pmf: DiscretePMF) -> float:
    """sup_t |F(t) - Phi(t)| for the standardized variable (X - mu)/sigma.

    The standardized CDF is a step function and Phi is continuous, so the
    supremum is attained at an atom, comparing Phi against both the CDF value
    and its left limit there.
    """
    # Standardize on the unit lattice: the span cancels from (X - mu)/sigma
    # exactly, so never multiplying it in makes the distance bit-identical
    # under support scaling.
    unit = DiscretePMF(np.array(pmf.probs), span=1) if pmf.span != 1 else pmf
    m = moments(unit)
    if m.sigma <= 0:
        raise DegenerateDistributionError("Kolmogorov distance undefined for a point mass")
    t = (unit.atoms() - m.mu) / m.sigma
    cdf = np.cumsum(pmf.probs)
    cdf[-1] = 1.0
    phi = ndtr(t)
    left = np.concatenate(([0.0], cdf[:-1]))
    return float(max(np.max(np.abs(cdf - phi)), np.max(np.abs(left - phi))))
