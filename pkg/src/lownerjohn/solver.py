"""Scalar level maximization, center search, and the full drivers.

Pipeline for the minimal ellipsoidal majorant of f = exp(-psi):

1. fix a center offset b; the constraint ||T(x+b)|| - t <= psi(x) becomes,
   after a Legendre transform, exp(-t) 1_{T B} <= polar of x -> f(x-b);
2. with s = exp(-t), the inner problem is max over s of
   xi(s) = s * max{det T : T B inside the symmetrized level set at s},
   solved by golden section in log s (xi is log-concave in log s);
3. the outer center search minimizes the closed-form integral over b with
   derivative-free restarts (even inputs short-circuit to b = 0).

The maximal scaled-indicator minorant (the John side) runs the same inner
machinery directly on the translated level sets of f.
"""

from __future__ import annotations

import math
import time
import warnings as _pywarnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .core import (
    EllipsoidalFunction,
    GridFunction,
    IndicatorFunction,
    LogConcaveFunction,
    PiecewiseQuadratic1D,
    ellipsoidal_integral,
    unit_ball_volume,
)
from .errors import (
    ArgumentError,
    BracketError,
    CenterOutsideError,
    ConvergenceError,
    DegeneracyError,
    EmptyLevelSetError,
    InvariantError,
    SearchRegionError,
)
from .geometry import level_set, symmetrize, translate
from .mvie import centered_mvie

S_FLOOR_FACTOR = 1e-9
GOLDEN_UTOL = 1e-8
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class UnimodalityWarning(UserWarning):
    """The level scan looked multi-modal beyond tolerance; full scan used."""


# ---------------------------------------------------------------------------
# level-set providers


class PolarLevelSets:
    """Level sets of the tilted polar exp(-(L psi + <b, .>)).

    The feasible region of the inner max-det problem at level s is the
    symmetrization of these sets.  The origin stays interior exactly for
    s < 1/sup(f), independent of b, which caps the search range; the cap is
    an open end (xi -> 0 there).
    """

    cap_attainable = False

    def __init__(self, f: LogConcaveFunction, b, base_polar=None):
        self.f = f
        self.b = np.atleast_1d(np.asarray(b, dtype=float))
        base = base_polar if base_polar is not None else f.polar_base()
        self.fn = tilt_polar_base(base, self.b)
        sup, _ = f.sup_norm()
        self.s_cap = 1.0 / sup

    def polytope(self, s):
        return self.fn._tilted_level(-math.log(s), np.zeros(self.f.dim))

    def structure(self):
        """("homothetic", Q, const) when G(s) = (-log s - const) Q about 0.

        Polars of indicators are support-function exponents, whose level
        sets scale linearly in the level; the inner maximization then has a
        closed form (the optimal radius factor is exactly the dimension).
        """
        from .core import SupportFunction, TiltedFunction

        fn = self.fn
        if isinstance(fn, SupportFunction):
            Q = fn._tilted_level(1.0, np.zeros(self.f.dim))
            return None if Q is None else ("homothetic", Q, 0.0)
        if (
            isinstance(fn, TiltedFunction)
            and isinstance(fn.base, SupportFunction)
            and np.linalg.norm(fn.shift) == 0
        ):
            Q = fn.base._tilted_level(1.0, fn.tilt)
            return None if Q is None else ("homothetic", Q, fn.const)
        return None


def tilt_polar_base(base: LogConcaveFunction, b):
    from .core import tilt_function

    return tilt_function(base, b)


class PrimalLevelSets:
    """Translated level sets G_f(s) + b: the feasible region of the minorant
    problem s 1_{T B}(x) <= f(x - b).  The cap s = f(-b) is attainable
    (indicator inputs peak there)."""

    cap_attainable = True

    def __init__(self, f: LogConcaveFunction, b):
        self.f = f
        self.b = np.atleast_1d(np.asarray(b, dtype=float))
        p = f.psi(-self.b)
        self.s_cap = 0.0 if p == math.inf else math.exp(-p)

    def polytope(self, s):
        P = self.f._tilted_level(-math.log(s), np.zeros(self.f.dim))
        if P is None:
            return None
        return translate(P, self.b)

    def structure(self):
        from .core import SupportFunction

        if isinstance(self.f, IndicatorFunction):
            Q = translate(self.f.body, self.b)
            return ("constant", Q, 0.0)
        if isinstance(self.f, SupportFunction) and np.linalg.norm(self.b) == 0:
            Q = self.f._tilted_level(1.0, np.zeros(self.f.dim))
            return None if Q is None else ("homothetic", Q, 0.0)
        return None


def _as_provider(levels, s_range=None):
    if hasattr(levels, "polytope") and hasattr(levels, "s_cap"):
        return levels
    if s_range is None:
        raise ArgumentError("a bare callable provider needs an explicit s_range")

    class _Wrapped:
        cap_attainable = True
        s_cap = float(s_range[1])

        @staticmethod
        def polytope(s):
            return levels(s)

    return _Wrapped()


# ---------------------------------------------------------------------------
# the inner scalar problem


def xi(levels, s):
    """(s * det T, T) for the largest centered ellipsoid in the level set at s.

    Raises CenterOutsideError when the origin is not interior to the level
    set (the caller must translate or tilt first) and EmptyLevelSetError
    when the set is empty.
    """
    provider = _as_provider(levels, s_range=(0.0, math.inf))
    P = provider.polytope(s)
    if P is None:
        raise EmptyLevelSetError(f"level set empty at s={s}")
    S = symmetrize(P)
    sol = centered_mvie(S)
    return s * sol.det, sol.T


def _xi_safe(provider, s, counters):
    try:
        P = provider.polytope(s)
    except (EmptyLevelSetError, DegeneracyError):
        return 0.0, None
    if P is None:
        return 0.0, None
    try:
        S = symmetrize(P)
        sol = centered_mvie(S)
    except (CenterOutsideError, DegeneracyError):
        return 0.0, None
    counters["xi_evaluations"] += 1
    counters["mvie_newton_steps"] += sol.newton_steps
    return s * sol.det, sol.T


@dataclass(frozen=True)
class XiMaximum:
    s0: float
    T0: np.ndarray
    xi0: float
    pinned_floor: bool = False
    pinned_cap: bool = False
    evaluations: int = 0
    newton_steps: int = 0
    warnings: tuple = ()


def _maximize_structured(struct, s_floor, s_cap, cap_attainable):
    """Closed-form inner maxima for level-set families with scaling structure.

    Homothetic family G(s) = (-log s - c) Q: xi(s) = s (-log s - c)^n det T_Q
    peaks at -log s = c + n, with T0 = n T_Q.  Constant family G(s) = Q:
    xi(s) = s det T_Q peaks at the (attainable) cap.
    """
    kind, Q, const = struct
    try:
        S = symmetrize(Q)
        sol = centered_mvie(S)
    except (CenterOutsideError, DegeneracyError):
        return None
    n = Q.dim
    if kind == "constant":
        s0 = s_cap
        return XiMaximum(
            s0=s0,
            T0=sol.T,
            xi0=s0 * sol.det,
            pinned_cap=True,
            evaluations=1,
            newton_steps=sol.newton_steps,
        )
    u_star = const + n
    s_star = math.exp(-u_star)
    if not (s_floor <= s_star <= s_cap):
        return None  # fall back to the generic search
    return XiMaximum(
        s0=s_star,
        T0=float(n) * sol.T,
        xi0=s_star * float(n) ** n * sol.det,
        evaluations=1,
        newton_steps=sol.newton_steps,
    )


def maximize_xi(levels, s_range=None, utol=GOLDEN_UTOL, floor_factor=S_FLOOR_FACTOR):
    """Golden-section maximization of xi over s, seeded by a log-uniform scan.

    Works in u = log s where xi is log-concave, hence unimodal; a 17-point
    scan brackets the mode (and falls back to a 129-point scan with a
    warning if the samples look multi-modal).  End pins are flagged: the
    floor is never a legitimate maximizer, the cap only is for providers
    whose top level is attainable (indicators).
    """
    provider = _as_provider(levels, s_range)
    counters = {"xi_evaluations": 0, "mvie_newton_steps": 0}
    warn = []

    s_cap = provider.s_cap if s_range is None else float(s_range[1])
    s_floor = s_cap * floor_factor if s_range is None else float(s_range[0])
    if not (s_cap > 0 and s_floor > 0 and s_floor < s_cap):
        raise ArgumentError("invalid level range")
    u_lo, u_hi = math.log(s_floor), math.log(s_cap)

    struct = getattr(provider, "structure", lambda: None)()
    if struct is not None:
        res = _maximize_structured(struct, s_floor, s_cap, provider.cap_attainable)
        if res is not None:
            return res

    cache = {}

    def lam(u):
        if u not in cache:
            v, T = _xi_safe(provider, math.exp(u), counters)
            cache[u] = (math.log(v) if v > 0 else -math.inf, T)
        return cache[u][0]

    def scan(npts):
        us = np.linspace(u_lo, u_hi, npts)
        vals = np.array([lam(u) for u in us])
        return us, vals

    us, vals = scan(17)
    if not np.any(np.isfinite(vals)):
        raise ConvergenceError("xi vanished on the whole scan range")
    # multi-modality guard on the seed scan
    finite = np.where(np.isfinite(vals), vals, -np.inf)
    peaks = [
        i
        for i in range(len(us))
        if finite[i] > -np.inf
        and (i == 0 or finite[i] >= finite[i - 1])
        and (i == len(us) - 1 or finite[i] > finite[i + 1])
    ]
    if len(peaks) > 1:
        span = float(np.max(finite[np.isfinite(finite)]))
        dips = []
        for a, b in zip(peaks, peaks[1:]):
            seg = finite[a : b + 1]
            dips.append(min(finite[a], finite[b]) - np.min(seg))
        if max(dips) > 1e-7 * max(1.0, abs(span)):
            warn.append("non-unimodal scan; fell back to a 129-point grid")
            _pywarnings.warn(warn[-1], UnimodalityWarning)
            us, vals = scan(129)
            finite = np.where(np.isfinite(vals), vals, -np.inf)

    k = int(np.argmax(finite))
    a = us[max(k - 1, 0)]
    b = us[min(k + 1, len(us) - 1)]
    if a == b:
        a, b = u_lo, u_hi

    # golden section on the bracket
    c1 = b - _INV_PHI * (b - a)
    c2 = a + _INV_PHI * (b - a)
    f1, f2 = lam(c1), lam(c2)
    while (b - a) > utol * max(1.0, abs(a), abs(b)):
        if f1 < f2:
            a, c1, f1 = c1, c2, f2
            c2 = a + _INV_PHI * (b - a)
            f2 = lam(c2)
        else:
            b, c2, f2 = c2, c1, f1
            c1 = b - _INV_PHI * (b - a)
            f1 = lam(c1)

    candidates = [0.5 * (a + b), u_lo, u_hi, us[k]]
    best_u = max(candidates, key=lam)
    best_val, best_T = cache[best_u][0], cache[best_u][1]
    if best_T is None:  # force evaluation bookkeeping for the winner
        v, T = _xi_safe(provider, math.exp(best_u), counters)
        best_T = T
    if best_T is None:
        raise ConvergenceError("maximizer evaluation lost the inner ellipsoid")

    width = u_hi - u_lo
    pinned_floor = best_u <= u_lo + 1e-6 * width
    pinned_cap = best_u >= u_hi - 1e-6 * width
    if pinned_floor:
        warn.append("level search pinned at its floor")
    if pinned_cap and not provider.cap_attainable:
        warn.append("level search pinned at its (open) cap")
    return XiMaximum(
        s0=math.exp(best_u),
        T0=best_T,
        xi0=math.exp(best_val),
        pinned_floor=pinned_floor,
        pinned_cap=pinned_cap,
        evaluations=counters["xi_evaluations"],
        newton_steps=counters["mvie_newton_steps"],
        warnings=tuple(warn),
    )


@dataclass(frozen=True)
class XiProfile:
    """Sampled map s -> (xi(s), T(s)) over the admissible level range.

    Ts stacks the inner maximizers (zero matrix where xi vanished); the
    det_T column of scan exports derives from it.
    """

    s: np.ndarray
    xi: np.ndarray
    Ts: np.ndarray
    dets: np.ndarray
    identity: str
    s_range: tuple

    def log_concavity_defect(self):
        """Most negative midpoint defect of log xi on the log-s grid."""
        ls = np.log(self.s)
        lx = np.where(self.xi > 0, np.log(self.xi), -np.inf)
        fin = np.isfinite(lx)
        worst = 0.0
        for i in range(1, len(ls) - 1):
            if fin[i - 1] and fin[i] and fin[i + 1]:
                mid = 0.5 * (lx[i - 1] + lx[i + 1])
                worst = min(worst, lx[i] - mid)
        return worst


def xi_scan(levels, points=129, s_range=None, floor_factor=S_FLOOR_FACTOR, identity=""):
    """Log-uniform xi profile used by tests, reports and the scan task."""
    provider = _as_provider(levels, s_range)
    s_cap = provider.s_cap if s_range is None else float(s_range[1])
    s_floor = s_cap * floor_factor if s_range is None else float(s_range[0])
    counters = {"xi_evaluations": 0, "mvie_newton_steps": 0}
    ss = np.exp(np.linspace(math.log(s_floor), math.log(s_cap), points))
    vals = np.empty(points)
    dim = getattr(getattr(provider, "f", None), "dim", None)
    Ts = None
    dets = np.empty(points)
    for i, s in enumerate(ss):
        v, T = _xi_safe(provider, float(s), counters)
        vals[i] = v
        if Ts is None:
            k = T.shape[0] if T is not None else (dim or 1)
            Ts = np.zeros((points, k, k))
        if T is not None:
            Ts[i] = T
        dets[i] = float(np.linalg.det(T)) if T is not None else 0.0
    return XiProfile(ss, vals, Ts, dets, identity, (s_floor, s_cap))


# ---------------------------------------------------------------------------
# fixed centers


@dataclass(frozen=True)
class CenterObjective:
    """Value of the center-indexed objective with its inner optimum."""

    b: np.ndarray
    value: float
    s0: float
    T0: np.ndarray
    t0: float
    xi0: float
    pinned_floor: bool = False
    pinned_cap: bool = False

    def recompute(self):
        n = self.T0.shape[0]
        det = float(np.linalg.det(self.T0))
        return (
            math.factorial(n)
            * unit_ball_volume(n)
            * math.exp(self.t0)
            / det
        )


def lowner_at_center(f: LogConcaveFunction, b, base_polar=None, _counters=None):
    """Best ellipsoidal majorant with center offset fixed at b.

    The distinguished center of the majorant is -b and must be interior to
    supp f (1-D callers may pass the symmetrized function instead, see
    ``symmetral_1d``).  Returns the closed-form integral value
    n! vol(B) e^t / det T together with the inner optimum.
    """
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if not f.support_contains(-b, interior=True):
        raise CenterOutsideError(
            "majorant center -b must lie in the interior of supp f"
        )
    provider = PolarLevelSets(f, b, base_polar=base_polar)
    res = maximize_xi(provider)
    if _counters is not None:
        _counters["xi_evaluations"] += res.evaluations
        _counters["mvie_newton_steps"] += res.newton_steps
    n = f.dim
    t0 = -math.log(res.s0)
    det = float(np.linalg.det(res.T0))
    value = math.factorial(n) * unit_ball_volume(n) * math.exp(t0) / det
    return CenterObjective(
        b=b,
        value=value,
        s0=res.s0,
        T0=res.T0,
        t0=t0,
        xi0=res.xi0,
        pinned_floor=res.pinned_floor,
        pinned_cap=res.pinned_cap,
    )


def john_at_center(f: LogConcaveFunction, b, _counters=None):
    """Best scaled-indicator minorant with the ellipsoid center at -b."""
    b = np.atleast_1d(np.asarray(b, dtype=float))
    provider = PrimalLevelSets(f, b)
    if provider.s_cap <= 0:
        raise CenterOutsideError("minorant center -b must lie inside supp f")
    res = maximize_xi(provider)
    if _counters is not None:
        _counters["xi_evaluations"] += res.evaluations
        _counters["mvie_newton_steps"] += res.newton_steps
    t0 = -math.log(res.s0)
    return CenterObjective(
        b=b,
        value=res.xi0,
        s0=res.s0,
        T0=res.T0,
        t0=t0,
        xi0=res.xi0,
        pinned_floor=res.pinned_floor,
        pinned_cap=res.pinned_cap,
    )


# ---------------------------------------------------------------------------
# symmetral (1-D)


def as_piecewise_1d(f: LogConcaveFunction):
    """Normalize 1-D closed-form inputs to piecewise-quadratic exponents."""
    if isinstance(f, PiecewiseQuadratic1D):
        return f
    if isinstance(f, IndicatorFunction) and f.dim == 1:
        lo, hi = f.body._interval_bounds()
        return PiecewiseQuadratic1D([(lo, hi, 0.0, 0.0, 0.0)], validate=False)
    return None


def symmetral_1d(f: LogConcaveFunction, w):
    """Pointwise max of psi and its reflection through w, as a new function.

    Both psi and its reflection are convex, so the max is already the
    greatest convex function below it.  Returns None when the supports of
    the two copies fail to overlap in an interval (the objective is +oo
    there).
    """
    pw = as_piecewise_1d(f)
    if pw is None:
        raise ArgumentError("symmetral is implemented for 1-D closed forms only")
    w = float(np.atleast_1d(w)[0])
    refl = []
    for lo, hi, a2, a1, a0 in pw.pieces:
        nlo, nhi = 2 * w - hi, 2 * w - lo
        refl.append((nlo, nhi, a2, -4 * a2 * w - a1, 4 * a2 * w * w + 2 * a1 * w + a0))
    dia = PiecewiseQuadratic1D(refl, validate=False)
    lo = max(pw.domain()[0], dia.domain()[0])
    hi = min(pw.domain()[1], dia.domain()[1])
    if hi - lo < 1e-12:
        return None

    def midpoint(a, b):
        if math.isfinite(a) and math.isfinite(b):
            return 0.5 * (a + b)
        if math.isfinite(a):
            return a + 1.0
        if math.isfinite(b):
            return b - 1.0
        return 0.0

    knots = {lo, hi}
    for g in (pw, dia):
        for plo, phi_, *_ in g.pieces:
            for e in (plo, phi_):
                if lo < e < hi:
                    knots.add(e)
    ordered = sorted(knots)
    # split each cell at crossings of the two (there constant) quadratics
    fine = set(ordered)
    for a, b in zip(ordered, ordered[1:]):
        mid = midpoint(a, b)
        p1 = pw._piece_at(mid)
        p2 = dia._piece_at(mid)
        if p1 is None or p2 is None:
            continue
        d2, d1, d0 = (p1[0] - p2[0], p1[1] - p2[1], p1[2] - p2[2])
        roots = []
        if abs(d2) > 1e-300:
            disc = d1 * d1 - 4 * d2 * d0
            if disc > 0:
                rt = math.sqrt(disc)
                roots = [(-d1 - rt) / (2 * d2), (-d1 + rt) / (2 * d2)]
        elif abs(d1) > 1e-300:
            roots = [-d0 / d1]
        fine.update(r for r in roots if a < r < b)
    fine = sorted(fine)

    pieces = []
    for a, b in zip(fine, fine[1:]):
        if not b > a:
            continue
        mid = midpoint(a, b)
        p1 = pw._piece_at(mid)
        p2 = dia._piece_at(mid)
        if p1 is None or p2 is None:
            continue
        v1 = p1[0] * mid * mid + p1[1] * mid + p1[2]
        v2 = p2[0] * mid * mid + p2[1] * mid + p2[2]
        chosen = p1 if v1 >= v2 else p2
        pieces.append((a, b, chosen[0], chosen[1], chosen[2]))
    if not pieces:
        return None
    merged = [pieces[0]]
    for p in pieces[1:]:
        q = merged[-1]
        if all(abs(p[2 + i] - q[2 + i]) < 1e-12 for i in range(3)) and abs(p[0] - q[1]) < 1e-12:
            merged[-1] = (q[0], p[1], q[2], q[3], q[4])
        else:
            merged.append(p)
    return PiecewiseQuadratic1D(merged, validate=False)


# ---------------------------------------------------------------------------
# reports and drivers


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a full driver run.

    ``optimizer`` carries (T, b, t); for the majorant it encodes
    exp(-||T(x+b)|| + t), for the minorant the scaled indicator
    exp(-t) 1_{T B - b}.  ``objective`` always matches the closed-form
    recomputation from the optimizer fields.
    """

    kind: str
    optimizer: EllipsoidalFunction
    objective: float
    feasibility_margin: float
    s0: float
    iterations: dict
    wall_time: float
    warnings: tuple = ()
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind == "lowner":
            ref = ellipsoidal_integral(self.optimizer)
        else:
            ref = self.s0 * self.optimizer.det_T()
        if abs(self.objective - ref) > 1e-12 * max(1.0, abs(ref)):
            raise InvariantError("objective disagrees with its closed-form recomputation")

    def john_indicator(self):
        """(s0, T, center) of the scaled-indicator minorant."""
        if self.kind != "john":
            raise ArgumentError("not a minorant report")
        return self.s0, self.optimizer.T, self.optimizer.center


def _search_centers(f, objective, seed, warnings, counters, maximizing=False):
    """Derivative-free center search with 1+n restarts inside an inflated box."""
    n = f.dim
    sup, _ = f.sup_norm()
    G0 = level_set(f, sup / 2.0)
    c0 = G0.centroid()
    lo, hi = G0.bounding_box()
    width = np.maximum(hi - lo, 1e-6)
    box_c = 0.5 * (lo + hi)
    sign = -1.0 if maximizing else 1.0

    rng = np.random.default_rng(seed)
    starts = [c0]
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        pert = (0.25 * width[j]) * (1.0 + 0.05 * rng.random())
        starts.append(c0 + ((-1.0) ** j) * pert * e)

    def run_box(half):
        blo, bhi = box_c - half, box_c + half

        def wrapped(c):
            if np.any(c < blo) or np.any(c > bhi):
                return math.inf
            v = objective(c)
            return sign * v if math.isfinite(v) else math.inf

        best = None
        iters = 0
        for x0 in starts:
            x0 = np.clip(x0, blo + 1e-9 * width, bhi - 1e-9 * width)
            simplex = [x0]
            for j in range(n):
                e = np.zeros(n)
                e[j] = 1.0
                simplex.append(x0 + 0.125 * width[j] * e)
            res = minimize(
                wrapped,
                x0,
                method="Nelder-Mead",
                options={
                    "initial_simplex": np.array(simplex),
                    "xatol": 1e-7 * float(np.max(width)),
                    "fatol": 1e-12,
                    "maxiter": 400 * n,
                    "maxfev": 600 * n,
                },
            )
            iters += res.nit
            cand = (float(res.fun), tuple(np.asarray(res.x, dtype=float)))
            if best is None or cand < best:
                best = cand
        c_best = np.array(best[1])
        on_edge = np.any(c_best < blo + 1e-3 * width) or np.any(c_best > bhi - 1e-3 * width)
        return c_best, sign * best[0], on_edge, iters

    half = width.astype(float).copy()  # bounding box inflated by factor 2
    c_best, val, on_edge, iters = run_box(half)
    total_iters = iters
    if on_edge:
        warnings.append("center search touched its region boundary; box doubled")
        c_best, val, on_edge, iters = run_box(2.0 * half)
        total_iters += iters
        if on_edge:
            raise SearchRegionError(
                "center search pinned to the enlarged region boundary"
            )
    counters["nm_iterations"] += total_iters
    counters["restarts"] += len(starts)
    return c_best, val


def lowner(f: LogConcaveFunction, even_shortcut=True, seed=0) -> SolveReport:
    """Minimal-integral ellipsoidal majorant exp(-||T0(x+b0)|| + t0) of f."""
    t_start = time.perf_counter()
    n = f.dim
    counters = {"xi_evaluations": 0, "mvie_newton_steps": 0, "nm_iterations": 0, "restarts": 0}
    warnings = []
    base = f.polar_base()

    def value_at_center(c):
        b = -np.asarray(c, dtype=float)
        if f.support_contains(c, interior=True):
            return lowner_at_center(f, b, base_polar=base, _counters=counters)
        if n == 1 and as_piecewise_1d(f) is not None:
            fs = symmetral_1d(f, float(c[0]))
            if fs is None:
                return None
            return lowner_at_center(fs, b, base_polar=None, _counters=counters)
        return None

    if even_shortcut and f.is_even():
        co = lowner_at_center(f, np.zeros(n), base_polar=base, _counters=counters)
    else:
        def obj(c):
            res = value_at_center(np.asarray(c, dtype=float))
            return res.value if res is not None else math.inf

        c0, _ = _search_centers(f, obj, seed, warnings, counters, maximizing=False)
        co = value_at_center(c0)
        if co is None:
            raise ConvergenceError("center search returned an infeasible center")

    if co.pinned_floor:
        warnings.append("inner level search hit its floor")
    E = EllipsoidalFunction(co.T0, co.b, co.t0)
    margin = verify_domination(E, f)
    report = SolveReport(
        kind="lowner",
        optimizer=E,
        objective=co.value,
        feasibility_margin=margin,
        s0=co.s0,
        iterations=dict(counters),
        wall_time=time.perf_counter() - t_start,
        warnings=tuple(warnings),
        diagnostics=_diagnostics(f),
    )
    return report


def john(f: LogConcaveFunction, even_shortcut=True, seed=0) -> SolveReport:
    """Maximal scaled-indicator minorant s0 1_{T0 B - b0} of f."""
    t_start = time.perf_counter()
    n = f.dim
    counters = {"xi_evaluations": 0, "mvie_newton_steps": 0, "nm_iterations": 0, "restarts": 0}
    warnings = []

    def value_at_center(c):
        b = -np.asarray(c, dtype=float)
        try:
            return john_at_center(f, b, _counters=counters)
        except (CenterOutsideError, ConvergenceError):
            return None

    if even_shortcut and f.is_even():
        co = john_at_center(f, np.zeros(n), _counters=counters)
    else:
        def obj(c):
            res = value_at_center(np.asarray(c, dtype=float))
            return res.value if res is not None else -math.inf

        c0, _ = _search_centers(f, obj, seed, warnings, counters, maximizing=True)
        co = value_at_center(c0)
        if co is None:
            raise ConvergenceError("center search returned an infeasible center")

    if co.pinned_floor:
        warnings.append("inner level search hit its floor")
    E = EllipsoidalFunction(co.T0, co.b, co.t0)
    margin = _john_margin(E, f)
    return SolveReport(
        kind="john",
        optimizer=E,
        objective=co.value,
        feasibility_margin=margin,
        s0=co.s0,
        iterations=dict(counters),
        wall_time=time.perf_counter() - t_start,
        warnings=tuple(warnings),
        diagnostics=_diagnostics(f),
    )


def _diagnostics(f):
    diag = {"function": f.describe()}
    if isinstance(f, GridFunction):
        diag["interpolation_tolerance"] = f.interpolation_tolerance()
    sides = getattr(f, "sides", None)
    if sides:
        diag["level_set_sides"] = sides
    return diag


# ---------------------------------------------------------------------------
# feasibility checks


def _sample_box(f: LogConcaveFunction, E: EllipsoidalFunction = None):
    sup, arg = f.sup_norm()
    try:
        P = level_set(f, sup * 1e-6)
        lo, hi = P.bounding_box()
    except Exception:
        scale = f.support_scale()
        lo = arg - 4 * scale
        hi = arg + 4 * scale
    if E is not None:
        rho = E.t + 14.0
        Minv = np.linalg.inv(E.T)
        rad = rho * np.linalg.norm(Minv, axis=1)
        lo = np.minimum(lo, E.center - rad)
        hi = np.maximum(hi, E.center + rad)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return mid - 1.25 * half, mid + 1.25 * half


def verify_domination(E: EllipsoidalFunction, f: LogConcaveFunction, extra_points=None, refine=True):
    """sup over samples of ||T(x+b)|| - t - psi(x): <= 0 certifies E >= f.

    Dense grid plus the vertices of a few primal level sets, then a local
    derivative-free polish around the best sample.
    """
    n = f.dim
    lo, hi = _sample_box(f)
    counts = {1: 4097, 2: 129, 3: 33}[n]
    axes = [np.linspace(lo[d], hi[d], counts) for d in range(n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.column_stack([m.ravel() for m in mesh])
    pts = [X]
    sup, _ = f.sup_norm()
    for s in (0.9 * sup, 0.5 * sup, 0.1 * sup, 1e-3 * sup):
        try:
            pts.append(level_set(f, s).vertices())
        except Exception:
            pass
    if isinstance(f, IndicatorFunction):
        pts.append(f.body.vertices())
    if extra_points is not None and len(extra_points):
        pts.append(np.atleast_2d(np.asarray(extra_points, dtype=float)))
    X = np.vstack(pts)

    gap = E.exponent_batch(X) - f.psi_batch(X)
    gap = np.where(np.isnan(gap), -np.inf, gap)
    margin = float(np.max(gap))
    if not refine:
        return margin
    k = int(np.argmax(gap))
    x0 = X[k]

    def neg_gap(x):
        p = f.psi(np.asarray(x, dtype=float))
        if p == math.inf:
            return math.inf
        return -(E.exponent(np.asarray(x, dtype=float)) - p)

    res = minimize(
        neg_gap,
        x0,
        method="Nelder-Mead",
        options={"xatol": 1e-11, "fatol": 1e-13, "maxiter": 800},
    )
    if math.isfinite(res.fun):
        margin = max(margin, -float(res.fun))
    return margin


def _john_margin(E: EllipsoidalFunction, f: LogConcaveFunction):
    """sup over the indicator ellipsoid of psi(x) - t0: <= 0 certifies s0 1 <= f."""
    n = E.dim
    if n == 1:
        dirs = np.array([[1.0], [-1.0]])
    elif n == 2:
        ang = np.linspace(0, 2 * np.pi, 512, endpoint=False)
        dirs = np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        from .geometry import icosphere_directions

        dirs = icosphere_directions()
    radii = np.linspace(0.0, 1.0, 17)
    U = np.vstack([r * dirs for r in radii])
    X = U @ E.T + E.center
    vals = f.psi_batch(X) - E.t
    vals = np.where(np.isfinite(vals), vals, np.inf)
    return float(np.max(vals))


# ---------------------------------------------------------------------------
# radial fixed point


def radial_lowner(profile, dim):
    """Closed-form route for rotation-invariant inputs.

    Solves the stationarity equation a = phi'(n/a) (the left side increases
    in a, the right side decreases) by predicate bisection and returns
    (a, t0 = n - phi(n/a)).
    """
    n = int(dim)
    if n < 1:
        raise ArgumentError("dimension must be >= 1")

    def ok(a):
        d = profile.derivative(n / a)
        return a >= d

    a_lo, a_hi = 1.0, 1.0
    for _ in range(200):
        if ok(a_lo):
            a_lo /= 2.0
        else:
            break
    else:
        raise BracketError("could not bracket the fixed point from below")
    for _ in range(200):
        if not ok(a_hi):
            a_hi *= 2.0
        else:
            break
    else:
        raise BracketError("could not bracket the fixed point from above")
    for _ in range(200):
        mid = 0.5 * (a_lo + a_hi)
        if mid == a_lo or mid == a_hi:
            break
        if ok(mid):
            a_hi = mid
        else:
            a_lo = mid
    a = 0.5 * (a_lo + a_hi)
    r = n / a
    d_lo = profile.derivative(r * (1 - 1e-7))
    d_hi = profile.derivative(r * (1 + 1e-7))
    smooth = math.isfinite(d_hi) and abs(d_hi - d_lo) <= 1e-4 * max(1.0, abs(d_lo))
    if smooth and abs(a - profile.derivative(r)) > 1e-10 * max(1.0, a):
        raise ConvergenceError("fixed-point residual above tolerance", a)
    t0 = n - float(profile.value(r))
    return a, t0
