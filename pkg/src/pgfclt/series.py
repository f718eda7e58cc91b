"""Truncated power series arithmetic.

A series is a coefficient vector c[0..J]; every operation is exact through
order J and silently discards higher orders.  log and exp use the standard
derivative recurrences (O(J^2)); composition requires the inner series to
have zero constant term.
"""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError


class TruncatedSeries:
    """Power series truncated at a fixed order J."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order: int | None = None):
        coeffs = np.asarray(coeffs, dtype=complex)
        if order is None:
            order = coeffs.size - 1
        buf = np.zeros(order + 1, dtype=complex)
        k = min(coeffs.size, order + 1)
        buf[:k] = coeffs[:k]
        self.coeffs = buf
        self.order = order

    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries":
        return cls(np.zeros(order + 1), order)

    @classmethod
    def expm1(cls, order: int) -> "TruncatedSeries":
        """Series of e^w - 1: coefficients 1/j! with zero constant term."""
        c = np.zeros(order + 1, dtype=complex)
        fact = 1.0
        for j in range(1, order + 1):
            fact *= j
            c[j] = 1.0 / fact
        return cls(c, order)

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs.imag) <= tol))

    def real(self) -> np.ndarray:
        return self.coeffs.real.copy()

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            n = min(self.order, other.order)
            return TruncatedSeries(self.coeffs[: n + 1] + other.coeffs[: n + 1], n)
        c = self.coeffs.copy()
        c[0] += other
        return TruncatedSeries(c, self.order)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self.coeffs, self.order)

    def __sub__(self, other):
        return self + (-other if isinstance(other, TruncatedSeries) else -other)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            n = min(self.order, other.order)
            full = np.convolve(self.coeffs[: n + 1], other.coeffs[: n + 1])
            return TruncatedSeries(full[: n + 1], n)
        return TruncatedSeries(self.coeffs * other, self.order)

    __rmul__ = __mul__

    def log1p(self) -> "TruncatedSeries":
        """log(1 + self) for a series with zero constant term."""
        if self.coeffs[0] != 0:
            raise PreconditionError("log1p requires zero constant term")
        n = self.order
        h = self.coeffs.copy()
        h[0] = 1.0
        out = np.zeros(n + 1, dtype=complex)
        # h = exp(L)  =>  k*h_k = sum_{j=1..k} j*L_j*h_{k-j}
        for k in range(1, n + 1):
            acc = k * h[k]
            for j in range(1, k):
                acc -= j * out[j] * h[k - j]
            out[k] = acc / k
        return TruncatedSeries(out, n)

    def exp(self) -> "TruncatedSeries":
        """exp(self) for a series with zero constant term."""
        if self.coeffs[0] != 0:
            raise PreconditionError("exp requires zero constant term")
        n = self.order
        out = np.zeros(n + 1, dtype=complex)
        out[0] = 1.0
        # E' = self' * E
        for k in range(1, n + 1):
            acc = 0.0
            for j in range(1, k + 1):
                acc += j * self.coeffs[j] * out[k - j]
            out[k] = acc / k
        return TruncatedSeries(out, n)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner(w)); inner must have zero constant term."""
        if inner.coeffs[0] != 0:
            raise PreconditionError("composition requires zero inner constant term")
        n = min(self.order, inner.order)
        acc = TruncatedSeries.zero(n) + self.coeffs[n]
        for k in range(n - 1, -1, -1):
            acc = acc * TruncatedSeries(inner.coeffs[: n + 1], n) + self.coeffs[k]
        return acc

    def __call__(self, w: complex) -> complex:
        acc = 0j
        for c in self.coeffs[::-1]:
            acc = acc * w + c
        return acc

    def __repr__(self):
        return f"TruncatedSeries({np.array2string(self.coeffs, precision=6)}, order={self.order})"
