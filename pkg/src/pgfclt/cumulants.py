"""Normalized cumulants and the machinery that tames them.

The normalized cumulant sequence a_j = kappa_j/j! consists of the Taylor
coefficients of log f(e^w) at w = 0.  It can be computed from the roots of
the PGF: each root zeta contributes log(1 + t*(e^w - 1)) with t = 1/(1-zeta),
because e^w - zeta = (1-zeta)(1 + t(e^w - 1)); conjugate roots sum to a real
series.

On top of the sequence itself this module provides:

  * tail_ratio            -- relative weight of the tail sum_{j>=L} |a_j| eps^j;
  * dominant_term_search  -- finds an index ell and radius s* at which one
                             term dominates the whole sum by a factor A;
  * tame_cumulants        -- specialization to (|a_j|)_{j>=2} certifying
                             |a_2| >= s*^(j-2) |a_j| for all j;
  * negcos_extrema        -- extrema of (cos t)^j - cos(j t), whose sign
                             forces the dominant index to be 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, RootAtOneError
from .roots import RootSet
from .series import TruncatedSeries

DEFAULT_ORDER = 16
MAX_ORDER = 64


@dataclass(frozen=True)
class CumulantSeq:
    """Normalized cumulants a_j = kappa_j/j!, stored at index j (index 0 unused)."""

    a: np.ndarray
    kappa: np.ndarray
    J: int

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        kappa = np.asarray(self.kappa, dtype=float)
        if a.shape != (self.J + 1,) or kappa.shape != (self.J + 1,):
            raise PreconditionError("cumulant arrays must have length J+1")
        if not np.all(np.isfinite(a)):
            raise OverflowError("non-finite normalized cumulant")
        if self.J >= 2 and kappa[2] < -1e-12:
            raise PreconditionError(f"negative variance {kappa[2]!r}")
        a = a.copy()
        kappa = kappa.copy()
        a.setflags(write=False)
        kappa.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "kappa", kappa)

    @property
    def mu(self) -> float:
        return float(self.kappa[1])

    @property
    def sigma2(self) -> float:
        return float(max(self.kappa[2], 0.0))

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    def to_json(self) -> dict:
        return {
            "J": self.J,
            "a": [repr(float(v)) for v in self.a[1:]],
            "kappa": [repr(float(v)) for v in self.kappa[1:]],
        }


def cumulants_from_roots(roots: RootSet, J: int = DEFAULT_ORDER) -> CumulantSeq:
    """Normalized cumulants from the root set, by summing per-root series.

    Each root contributes log(1 + t*(e^w - 1)) with t = 1/(1 - zeta); the sum
    over all roots is exactly log f(e^w) because the constant terms cancel
    by f(1) = 1.  A root at 1 makes t singular and is rejected.
    """
    if J < 2 or J > MAX_ORDER:
        raise PreconditionError(f"truncation order must be in [2, {MAX_ORDER}], got {J}")
    expm1 = TruncatedSeries.expm1(J)
    total = TruncatedSeries.zero(J)
    for zeta, mult in roots.roots:
        if abs(1.0 - zeta) <= 1e-12:
            raise RootAtOneError("root at z = 1: cumulant series undefined")
        t = 1.0 / (1.0 - zeta)
        total = total + float(mult) * (t * expm1).log1p()
    a = total.coeffs
    if np.max(np.abs(a.imag)) > 1e-9 * max(1.0, np.max(np.abs(a.real))):
        raise PreconditionError("root set lacks conjugate symmetry: complex cumulants")
    a_real = np.concatenate(([0.0], a.real[1:]))
    kappa = np.array([a_real[j] * math.factorial(j) for j in range(J + 1)])
    if not np.all(np.isfinite(kappa)):
        raise OverflowError("cumulant exceeds the representable range")
    return CumulantSeq(a=a_real, kappa=kappa, J=J)


def tail_ratio(a: CumulantSeq, eps: float, L: int) -> float:
    """(sum_{j>=L} |a_j| eps^j) / (sum_{j>=2} |a_j| eps^j), truncated at J."""
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    if L < 2:
        raise PreconditionError("L must be at least 2")
    weights = np.abs(a.a[2:]) * eps ** np.arange(2, a.J + 1, dtype=float)
    denom = math.fsum(weights)
    if denom == 0.0:
        raise PreconditionError("degenerate cumulant sequence: zero denominator")
    if L > a.J:
        return 0.0
    num = math.fsum(weights[L - 2 :])
    return num / denom


def dominant_term_search(c, s: float, A: float, L: int) -> tuple[int, float]:
    """Find (ell, s*) with one term of sum c_i x^i dominating all others at x = s*.

    Inputs are a nonnegative sequence c (c[i-1] is the coefficient of x^i),
    a starting radius s > 0, a dominance factor A >= 1 and a cutoff L with

        sum_{i<=L} c_i s^i  >  sum_{i>L} c_i s^i.          (truncation)

    The search starts from s_0 = s/(2A) and index L, and repeatedly either
    halts -- when c_j s_t^j exceeds 2A times the other head terms -- or moves
    to the argmax head index (smallest index on ties) and shrinks the radius
    by 16A.  The returned pair satisfies

        c_ell s*^ell > A * sum_{i != ell} c_i s*^i,

    with s* > s (16A)^-(L+1), in at most L halting checks; both facts are
    re-verified by direct summation before returning.
    """
    c = np.asarray(c, dtype=float)
    if np.any(c < 0):
        raise PreconditionError("sequence must be nonnegative")
    if s <= 0 or A < 1:
        raise PreconditionError("require s > 0 and A >= 1")
    if L < 1 or L > c.size:
        raise PreconditionError(f"cutoff L must be in [1, {c.size}]")
    if not np.all(np.isfinite(c)):
        raise PreconditionError("sequence must be finite")
    powers = np.arange(1, c.size + 1, dtype=float)
    head = math.fsum(c[:L] * s ** powers[:L])
    tail = math.fsum(c[L:] * s ** powers[L:])
    if not head > tail:
        raise PreconditionError(
            f"truncation condition fails: head {head!r} <= tail {tail!r} at cutoff {L}"
        )

    s_t = s / (2.0 * A)
    j_t = L
    for _ in range(L):
        terms = c[:L] * s_t ** powers[:L]
        if c[j_t - 1] * s_t**j_t > 2.0 * A * (math.fsum(terms) - terms[j_t - 1]):
            ell, s_star = j_t, s_t
            break
        # The argmax must be taken at the shrunken radius: that is what makes
        # the index sequence strictly decreasing (a head term beaten by a
        # factor (16A)^(i-j) at the old radius stays beaten at the new one).
        s_t = s_t / (16.0 * A)
        head_terms = c[:j_t] * s_t ** powers[:j_t]
        j_t = int(np.argmax(head_terms)) + 1  # argmax picks the smallest index on ties
    else:
        raise RuntimeError("dominant-term search failed to halt within L steps")

    all_terms = c * s_star**powers
    others = math.fsum(all_terms) - all_terms[ell - 1]
    if not all_terms[ell - 1] > A * others:
        raise RuntimeError("dominance postcondition failed on direct summation")
    if not s_star > s * (16.0 * A) ** -(L + 1):
        raise RuntimeError("radius postcondition failed")
    return ell, s_star


def tame_cumulants(a: CumulantSeq, s: float, L: int) -> float:
    """Radius s* with |a_2| >= s*^(j-2) |a_j| for every stored j >= 3.

    Requires s in (0, 1/2), a not-identically-zero tail (a_j)_{j>=2} and the
    cutoff condition sum_{2<=j<=L} |a_j| s^j >= sum_{j>L} |a_j| s^j at the
    stored truncation.  Runs the dominant-term search on (|a_j|)_{j>=2} with
    dominance factor 4; nonnegativity of u(|z|) - u(z) forces the dominant
    index to be 2, which is verified directly along with the lower bound
    s* > s 2^-6(L+1).
    """
    if not 0 < s < 0.5:
        raise PreconditionError("s must lie in (0, 1/2)")
    if L < 2:
        raise PreconditionError("L must be at least 2")
    tail_seq = np.abs(a.a[2:])
    if not np.any(tail_seq > 0):
        raise PreconditionError("cumulant tail is identically zero")
    j = np.arange(2, a.J + 1, dtype=float)
    weights = tail_seq * s**j
    Lc = min(L, a.J)
    # weights index 0 corresponds to j = 2, so j <= L covers [0, L-2].
    head = math.fsum(weights[: Lc - 1])
    tail = math.fsum(weights[Lc - 1 :])
    if head < tail:
        raise PreconditionError("cutoff condition fails at the stored truncation order")
    # Shifted index: c_i = |a_{i+1}|, so the cutoff L for j corresponds to L-1.
    ell, s_star = dominant_term_search(tail_seq, s, A=4.0, L=Lc - 1)
    if ell != 1:
        raise RuntimeError(
            f"dominant cumulant index is {ell + 1}, not 2; sequence is not weakly positive"
        )
    if not s_star > s * 2.0 ** (-6.0 * (L + 1)):
        raise RuntimeError("radius lower bound failed")
    a2 = abs(a.a[2])
    for jj in range(3, a.J + 1):
        if not a2 >= s_star ** (jj - 2) * abs(a.a[jj]) * (1.0 - 1e-12):
            raise RuntimeError(f"taming failed at order {jj}")
    return s_star


def negcos_extrema(j: int, grid_points: int = 10_000) -> tuple[float, float]:
    """Extrema of g(t) = (cos t)^j - cos(j t) over one period.

    Grid search with golden-section refinement around the best cells; for
    every j >= 3 the minimum is below -1/2 and the maximum above 1/2.
    """
    if j < 3:
        raise PreconditionError("requires j >= 3")

    def g(theta):
        return np.cos(theta) ** j - np.cos(j * theta)

    thetas = np.linspace(0.0, 2.0 * math.pi, grid_points)
    vals = g(thetas)
    lo_i = int(np.argmin(vals))
    hi_i = int(np.argmax(vals))
    h = thetas[1] - thetas[0]

    def refine(center: float, sign: float) -> float:
        a_, b_ = center - h, center + h
        phi = (math.sqrt(5.0) - 1.0) / 2.0
        x1 = b_ - phi * (b_ - a_)
        x2 = a_ + phi * (b_ - a_)
        f1, f2 = sign * g(x1), sign * g(x2)
        for _ in range(80):
            if f1 <= f2:
                b_, x2, f2 = x2, x1, f1
                x1 = b_ - phi * (b_ - a_)
                f1 = sign * g(x1)
            else:
                a_, x1, f1 = x1, x2, f2
                x2 = a_ + phi * (b_ - a_)
                f2 = sign * g(x2)
        return float(min(f1, f2)) * sign

    min_val = min(float(vals[lo_i]), refine(float(thetas[lo_i]), 1.0))
    max_val = max(float(vals[hi_i]), refine(float(thetas[hi_i]), -1.0))
    return min_val, max_val
