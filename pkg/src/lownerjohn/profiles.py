"""Scalar radial profiles: convex nondecreasing functions on [0, oo).

A profile ``phi`` is the exponent of a rotation-invariant log-concave
function ``f(x) = exp(-phi(||x||))``.  The algebra kept here is small on
purpose: power sums ``sum c_i r^{p_i}`` (coefficients > 0, exponents >= 1),
the hard wall ``0 on [0, c], +oo beyond`` (the exponent of a ball
indicator), and one-sided conjugates of either.

The one-sided conjugate is

    phi*(rho) = sup_{r >= 0} (r * rho - phi(r)),   rho >= 0,

which is again a profile; it is what the polar of a radial function is
built from.  Conjugating twice returns the original object, so the
involution is exact by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError

_BISECT_STEPS = 200


def _bisect(g, lo, hi, steps=_BISECT_STEPS):
    """Root of a nondecreasing g on [lo, hi] with g(lo) <= 0 <= g(hi)."""
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if g(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class ScalarProfile:
    """Interface shared by all profiles."""

    def value(self, r):
        raise NotImplementedError

    def derivative(self, r):
        """Right derivative; may be +oo past a wall."""
        raise NotImplementedError

    def inverse(self, u):
        """Largest r >= 0 with value(r) <= u (level radius); 0 if u < value(0)."""
        raise NotImplementedError

    def conjugate(self) -> "ScalarProfile":
        raise NotImplementedError

    def finite_radius(self):
        """Sup of r with value(r) < oo (may be inf)."""
        return math.inf

    def is_integrable_exponent(self, dim):
        """True when exp(-value(||x||)) has finite positive integral in R^dim."""
        raise NotImplementedError


@dataclass(frozen=True)
class PowerSumProfile(ScalarProfile):
    """phi(r) = sum_i c_i r^{p_i} with c_i > 0 and p_i >= 1."""

    terms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.terms:
            raise ArgumentError("power-sum profile needs at least one term")
        for c, p in self.terms:
            if not (c > 0 and np.isfinite(c)):
                raise ArgumentError(f"coefficient must be positive, got {c}")
            if not (p >= 1 and np.isfinite(p)):
                raise ArgumentError(f"exponent must be >= 1, got {p}")

    def value(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for c, p in self.terms:
            out = out + c * r**p
        return out if out.shape else float(out)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for c, p in self.terms:
            if p == 1.0:
                out = out + c
            else:
                out = out + c * p * r ** (p - 1.0)
        return out if out.shape else float(out)

    def inverse(self, u):
        if u < 0:
            return 0.0
        hi = 1.0
        while self.value(hi) < u:
            hi *= 2.0
            if hi > 1e300:
                return math.inf
        return _bisect(lambda r: self.value(r) - u, 0.0, hi)

    def _slope_at_zero(self):
        return sum(c for c, p in self.terms if p == 1.0)

    def _max_slope(self):
        if all(p == 1.0 for _, p in self.terms):
            return self._slope_at_zero()
        return math.inf

    def conjugate_argmax(self, rho):
        """Maximizer r* of r*rho - phi(r) over r >= 0."""
        if rho <= self._slope_at_zero():
            return 0.0
        if rho >= self._max_slope():
            return math.inf
        hi = 1.0
        while self.derivative(hi) < rho:
            hi *= 2.0
        return _bisect(lambda r: self.derivative(r) - rho, 0.0, hi)

    def conjugate(self):
        # A single strict power has a closed-form dual power; log it exactly.
        if len(self.terms) == 1:
            c, p = self.terms[0]
            if p > 1.0:
                q = p / (p - 1.0)
                cq = (c * p) ** (-1.0 / (p - 1.0)) * (p - 1.0) / p
                return PowerSumProfile(((cq, q),))
            return WallProfile(c)
        return ConjugateProfile(self)

    def is_integrable_exponent(self, dim):
        return True  # every power-sum grows at least linearly

    def describe(self):
        return " + ".join(f"{c:g}*r^{p:g}" for c, p in self.terms)


@dataclass(frozen=True)
class WallProfile(ScalarProfile):
    """phi(r) = 0 for r <= radius, +oo beyond: a ball indicator exponent."""

    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and np.isfinite(self.radius)):
            raise ArgumentError(f"wall radius must be positive, got {self.radius}")

    def value(self, r):
        r = np.asarray(r, dtype=float)
        out = np.where(r <= self.radius * (1 + 1e-12), 0.0, np.inf)
        return out if out.shape else float(out)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        out = np.where(r < self.radius, 0.0, np.inf)
        return out if out.shape else float(out)

    def inverse(self, u):
        return self.radius if u >= 0 else 0.0

    def conjugate(self):
        # sup_{r<=R} r*rho = R*rho: the cone with slope R.
        return PowerSumProfile(((self.radius, 1.0),))

    def finite_radius(self):
        return self.radius

    def is_integrable_exponent(self, dim):
        return True

    def describe(self):
        return f"wall(r<={self.radius:g})"


@dataclass(frozen=True)
class ConjugateProfile(ScalarProfile):
    """Numeric one-sided conjugate of a base profile (used for power sums)."""

    base: PowerSumProfile

    def value(self, rho):
        rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
        out = np.empty_like(rho_arr)
        for i, p in enumerate(rho_arr):
            if p >= self.base._max_slope():
                out[i] = np.inf
                continue
            r = self.base.conjugate_argmax(p)
            out[i] = r * p - self.base.value(r)
        return out if np.ndim(rho) else float(out[0])

    def derivative(self, rho):
        # (phi*)'(rho) is the argmax radius.
        rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
        out = np.array([self.base.conjugate_argmax(p) for p in rho_arr])
        return out if np.ndim(rho) else float(out[0])

    def inverse(self, u):
        if u < 0:
            return 0.0
        hi = 1.0
        while self.value(hi) < u:
            hi *= 2.0
            if hi >= self.base._max_slope():
                hi = self.base._max_slope()
                break
        return _bisect(lambda p: self.value(p) - u, 0.0, hi)

    def conjugate(self):
        return self.base  # exact involution

    def finite_radius(self):
        return self.base._max_slope()

    def is_integrable_exponent(self, dim):
        return True

    def describe(self):
        return f"conjugate[{self.base.describe()}]"


GAUSSIAN_PROFILE = PowerSumProfile(((0.5, 2.0),))
CONE_PROFILE = PowerSumProfile(((1.0, 1.0),))
