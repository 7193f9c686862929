"""Uniform B-spline basis evaluation for spline-parameterized activations.

The basis lives on a uniform grid of `intervals` spans over [lo, hi],
extended by `degree` knots on each side, giving `intervals + degree`
basis functions that form a partition of unity on the domain. Inputs
outside the domain are clamped to the boundary before evaluation, and the
derivative with respect to the input is zero beyond the boundary.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

__all__ = ["BSplineBasis", "silu", "silu_grad"]


def silu(t):
    """t * sigmoid(t), the smooth base nonlinearity."""
    t = np.asarray(t, dtype=np.float64)
    return t * expit(t)


def silu_grad(t):
    t = np.asarray(t, dtype=np.float64)
    s = expit(t)
    return s * (1.0 + t * (1.0 - s))


class BSplineBasis:
    """Cubic-by-default B-spline basis on a uniform extended knot grid."""

    def __init__(self, degree: int = 3, lo: float = -1.0, hi: float = 1.0, intervals: int = 5):
        if degree < 1:
            raise ValueError(f"degree must be >= 1, got {degree}")
        if intervals < 1:
            raise ValueError(f"intervals must be >= 1, got {intervals}")
        if not lo < hi:
            raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
        self.degree = int(degree)
        self.lo = float(lo)
        self.hi = float(hi)
        self.intervals = int(intervals)
        step = (self.hi - self.lo) / self.intervals
        # degree extra knots on each side of the domain
        self.knots = self.lo + step * np.arange(-self.degree, self.intervals + self.degree + 1)

    @property
    def num_basis(self) -> int:
        return self.intervals + self.degree

    def _tables(self, t):
        """Iterative Cox-de Boor up to self.degree; returns the last two tables."""
        tc = np.clip(np.asarray(t, dtype=np.float64), self.lo, self.hi)
        flat = tc.reshape(-1, 1)
        kn = self.knots
        bases = ((flat >= kn[:-1]) & (flat < kn[1:])).astype(np.float64)
        # make the rightmost domain interval closed so t == hi stays covered
        bases[flat[:, 0] == self.hi, self.intervals + self.degree - 1] = 1.0
        prev = bases
        for q in range(1, self.degree + 1):
            prev = bases
            left = (flat - kn[: -(q + 1)]) / (kn[q:-1] - kn[: -(q + 1)]) * bases[:, :-1]
            right = (kn[q + 1 :] - flat) / (kn[q + 1 :] - kn[1:-q]) * bases[:, 1:]
            bases = left + right
        return bases, prev

    def design_matrix(self, t):
        """Basis values for each input: shape t.shape + (num_basis,)."""
        t = np.asarray(t, dtype=np.float64)
        values, _ = self._tables(t)
        return values.reshape(t.shape + (self.num_basis,))

    def design_and_derivative(self, t):
        """Basis values and d/dt values; the derivative is zeroed where t was clamped."""
        t = np.asarray(t, dtype=np.float64)
        values, lower = self._tables(t)
        p = self.degree
        span = self.knots[p:] - self.knots[:-p]  # uniform: all equal p * step
        scaled = lower / span
        deriv = p * (scaled[:, :-1] - scaled[:, 1:])
        out_of_range = (t.reshape(-1) < self.lo) | (t.reshape(-1) > self.hi)
        deriv[out_of_range] = 0.0
        shape = t.shape + (self.num_basis,)
        return values.reshape(shape), deriv.reshape(shape)
