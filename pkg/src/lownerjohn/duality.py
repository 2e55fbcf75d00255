"""Polars of ellipsoidal functions and the majorant/minorant duality check.

For an even log-concave f the polar of its minimal ellipsoidal majorant
equals the maximal scaled-indicator minorant of the polar of f.  That
identity fails for general centers; this module carries both the check and
the one-dimensional function witnessing the failure (a piecewise-quadratic
exponent 4x^2 / x^2 whose dual-side objective has nonzero slope at the
level where equality would force a maximum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import EllipsoidalFunction, LogConcaveFunction, PiecewiseQuadratic1D
from .errors import ArgumentError, DomainError
from .legendre import polar
from .solver import SolveReport, john, lowner

COUNTEREXAMPLE_CENTER = 3.0 / (8.0 * math.sqrt(5.0))

DEFAULT_TOLERANCES = {
    "log_s": 1e-3,
    "ttt_rel": 1e-2,
    "center": 1e-3,
}


def counterexample_function() -> PiecewiseQuadratic1D:
    """The asymmetric 1-D function 4x^2 (x <= 0) / x^2 (x > 0)."""
    return PiecewiseQuadratic1D(
        [(-math.inf, 0.0, 4.0, 0.0, 0.0), (0.0, math.inf, 1.0, 0.0, 0.0)]
    )


@dataclass(frozen=True)
class EllipsoidalPolar:
    """Polar of exp(-||T(x+b)|| + t) at a center z.

    Always of the form exp(-t + <linear, y - z>) restricted to T B + z;
    a scaled ellipsoid indicator exactly when ``linear`` vanishes, which
    happens iff z is the distinguished center -b.
    """

    log_scale: float  # -t
    T: np.ndarray
    center: np.ndarray  # the indicator region is T B + center
    linear: np.ndarray  # exp tilt coefficient; 0 <=> scaled indicator

    @property
    def is_indicator(self):
        return bool(np.linalg.norm(self.linear) <= 1e-10)

    @property
    def s(self):
        return math.exp(self.log_scale)

    def value(self, y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        w = y - self.center
        if np.linalg.norm(np.linalg.solve(self.T, w)) > 1.0 + 1e-12:
            return 0.0
        return math.exp(self.log_scale + float(self.linear @ w))


def polar_of_ellipsoidal(E: EllipsoidalFunction, z) -> EllipsoidalPolar:
    """Closed-form polar of an ellipsoidal function with respect to z.

    The exponent transform gives t - <b + z, y - z> on T B + z (+oo
    outside), so the polar is ellipsoidal iff z = -b.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape != (E.dim,):
        raise ArgumentError("center dimension mismatch")
    return EllipsoidalPolar(
        log_scale=-E.t,
        T=E.T,
        center=z,
        linear=E.b + z,
    )


def polar_back(desc: EllipsoidalPolar) -> EllipsoidalFunction:
    """Inverse transform of a scaled-indicator polar taken at its own center."""
    if not desc.is_indicator:
        raise ArgumentError("only a scaled-indicator polar can be inverted directly")
    return EllipsoidalFunction(desc.T, -desc.center, -desc.log_scale)


@dataclass(frozen=True)
class DualityReport:
    left: EllipsoidalPolar  # polar of the majorant, as indicator parameters
    right: SolveReport  # minorant of the polar function
    delta_log_s: float
    delta_ttt: float
    delta_center: float
    verdict: str  # "equal-within-tol" or "distinct"
    tolerances: dict

    @property
    def equal(self):
        return self.verdict == "equal-within-tol"


def duality_check(f: LogConcaveFunction, center, tolerances=None, seed=0) -> DualityReport:
    """Compare the polar of the majorant of f against the minorant of f^center.

    Ellipsoids are compared through T T' (gauge invariant) together with the
    scale and center; the verdict is equal-within-tol iff every delta is
    below its tolerance.  For even f at center 0 the two sides agree.
    """
    center = np.atleast_1d(np.asarray(center, dtype=float))
    tols = dict(DEFAULT_TOLERANCES)
    if tolerances:
        tols.update(tolerances)

    lown = lowner(f, seed=seed)
    left = polar_of_ellipsoidal(lown.optimizer, center)
    fpol = polar(f, center)
    right = john(fpol.fn, seed=seed)

    s_r, T_r, c_r = right.john_indicator()
    d_log_s = abs(left.log_scale - math.log(s_r))
    TT_l = left.T @ left.T
    TT_r = T_r @ T_r
    d_ttt = float(np.linalg.norm(TT_l - TT_r) / max(np.linalg.norm(TT_l), 1e-300))
    d_center = float(np.linalg.norm(left.center - c_r))

    equal = (
        left.is_indicator
        and d_log_s <= tols["log_s"]
        and d_ttt <= tols["ttt_rel"]
        and d_center <= tols["center"]
    )
    return DualityReport(
        left=left,
        right=right,
        delta_log_s=d_log_s,
        delta_ttt=d_ttt,
        delta_center=d_center,
        verdict="equal-within-tol" if equal else "distinct",
        tolerances=tols,
    )


def counterexample_h(s: float) -> float:
    """Dual-side objective of the counterexample: level times interval length.

    Two branches meeting at s = 1; raises DomainError when a radicand is
    negative (s above the sup of the polar).
    """
    if not (s > 0):
        raise DomainError("h is defined for s > 0")
    ln = math.log(s)
    r80 = 9.0 - 80.0 * ln
    r320 = 9.0 - 320.0 * ln
    if r320 < 0 or r80 < 0:
        raise DomainError(f"radicand negative at s={s}")
    if s <= 1.0:
        return (s / (4.0 * math.sqrt(5.0))) * (
            4.0 * math.sqrt(r80) + math.sqrt(r320) - 9.0
        )
    return (s / (2.0 * math.sqrt(5.0))) * math.sqrt(r320)


@dataclass(frozen=True)
class CounterexampleReport:
    hprime: float
    verdict: str
    step_values: dict
    duality: DualityReport

    @property
    def duality_fails(self):
        return self.verdict == "duality fails"


def counterexample_report(step=1e-6, seed=0) -> CounterexampleReport:
    """Central-difference slope of h at s = e^{-1/2} plus the full cross-check.

    A zero slope there is what the ellipsoidal duality would force; the
    computed slope is about -0.354, and the end-to-end duality check on the
    same function is asserted distinct.
    """
    s_star = math.exp(-0.5)
    steps = {h: _central_diff(s_star, h) for h in (1e-5, step, 1e-7)}
    hprime = steps[step]
    # error bound of the central scheme: |h'''| step^2 / 6, with a crude
    # third-derivative estimate from a wider stencil
    h3 = abs(
        _central_diff(s_star, 1e-3) - _central_diff(s_star, 5e-4)
    ) / (1e-3**2 - 5e-4**2 + 1e-300) * 6.0
    bound = max(h3 * step**2 / 6.0, 1e-12)
    verdict = "duality fails" if abs(hprime) > 10.0 * bound else "inconclusive"
    rep = duality_check(counterexample_function(), np.array([COUNTEREXAMPLE_CENTER]), seed=seed)
    if rep.verdict != "distinct":
        verdict = "inconclusive"
    return CounterexampleReport(
        hprime=hprime,
        verdict=verdict,
        step_values=steps,
        duality=rep,
    )


def _central_diff(s, h):
    return (counterexample_h(s + h) - counterexample_h(s - h)) / (2.0 * h)
