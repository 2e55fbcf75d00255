"""Domain types: log-concave functions f = exp(-psi) and ellipsoidal functions.

Variants of :class:`LogConcaveFunction`:

* ``RadialFunction``     -- psi(x) = phi(||x||) for a scalar profile phi.
* ``IndicatorFunction``  -- f = 1 on a polytope K, 0 outside (psi = 0 / +oo).
* ``PiecewiseQuadratic1D`` -- convex piecewise-quadratic psi on the line.
* ``GridFunction``       -- psi sampled on an axis grid (n in {1, 2}),
  multilinear inside the grid hull, +oo outside.
* ``SupportFunction``    -- psi(y) = h_K(y); arises as the polar of an
  indicator and is first-class so polars stay closed-form.
* ``TiltedFunction``     -- psi(x) = base(x - shift) + <tilt, x - shift> + c;
  the recentering/tilting wrapper used by polar transforms.

All values are immutable after construction and every operation is pure, so
instances can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

from .errors import (
    ArgumentError,
    ConvexityError,
    DegeneracyError,
    DimensionMismatchError,
    EmptyLevelSetError,
    InvariantError,
)
from .geometry import HPolytope, icosphere_directions
from .profiles import ScalarProfile, WallProfile

_TINY_RADIUS = 1e-12


def unit_ball_volume(n: int) -> float:
    """Volume of the Euclidean unit ball in R^n."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


# ---------------------------------------------------------------------------
# ellipsoidal functions


@dataclass(frozen=True)
class EllipsoidalFunction:
    """x -> exp(-||T(x + b)|| + t) with T symmetric positive definite.

    The distinguished center (the peak) sits at x = -b.  T is stored as the
    symmetric positive-definite representative of its O(n) orbit.
    """

    T: np.ndarray
    b: np.ndarray
    t: float

    def __init__(self, T, b, t):
        T = np.atleast_2d(np.asarray(T, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        n = T.shape[0]
        if T.shape != (n, n) or b.shape != (n,):
            raise DimensionMismatchError("T must be n x n and b length n")
        if np.linalg.norm(T - T.T) > 1e-10 * max(1.0, np.linalg.norm(T)):
            raise InvariantError("T must be symmetric")
        if np.min(np.linalg.eigvalsh(T)) <= 0:
            raise InvariantError("T must be positive definite")
        T = 0.5 * (T + T.T)
        T.setflags(write=False)
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "t", float(t))

    @property
    def dim(self):
        return self.T.shape[0]

    @property
    def center(self):
        return -self.b

    def exponent(self, x):
        """||T(x+b)|| - t, the convex exponent of the function."""
        x = np.asarray(x, dtype=float)
        return float(np.linalg.norm(self.T @ (x + self.b)) - self.t)

    def exponent_batch(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.linalg.norm((X + self.b) @ self.T.T, axis=1) - self.t

    def __call__(self, x):
        return math.exp(-self.exponent(x))

    def det_T(self):
        return float(np.linalg.det(self.T))

    def level_ellipsoid(self, value):
        """(M, center) with the super-level set {E >= value} = M B + center."""
        rho = self.t - math.log(value)
        if rho < 0:
            raise EmptyLevelSetError("value exceeds the sup of the function")
        M = rho * np.linalg.inv(self.T)
        return M, self.center


def ellipsoidal_integral(E: EllipsoidalFunction) -> float:
    """Closed-form integral n! vol(B_2^n) e^t / det T of an ellipsoidal function."""
    n = E.dim
    return math.factorial(n) * unit_ball_volume(n) * math.exp(E.t) / E.det_T()


# ---------------------------------------------------------------------------
# log-concave function variants


class LogConcaveFunction:
    """Abstract f = exp(-psi), psi convex with nonempty-interior support."""

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def psi(self, x) -> float:
        raise NotImplementedError

    def psi_batch(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.array([self.psi(row) for row in X])

    def value(self, x) -> float:
        p = self.psi(x)
        return 0.0 if p == math.inf else math.exp(-p)

    def sup_norm(self):
        """(sup f, argmax).  Exact for closed forms; refined fit for grids."""
        raise NotImplementedError

    def level_set(self, s) -> HPolytope:
        P = self._tilted_level(-math.log(s), np.zeros(self.dim))
        if P is None:
            raise EmptyLevelSetError(f"empty super-level set at s={s}")
        return P

    def _tilted_level(self, u, tilt):
        """{x : psi(x) + <tilt, x> <= u} as a polytope, or None if empty."""
        raise NotImplementedError

    def polar_base(self) -> "LogConcaveFunction":
        """The function exp(-L psi) with L the origin-centered transform."""
        raise NotImplementedError

    def is_even(self) -> bool:
        return False

    def support_contains(self, x, interior=True) -> bool:
        raise NotImplementedError

    def support_scale(self) -> float:
        """Characteristic length of the support region (for sampling grids)."""
        raise NotImplementedError

    def describe(self) -> str:
        return type(self).__name__

    def _check_point(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.dim,):
            raise DimensionMismatchError(
                f"point of dimension {x.shape} passed to function of dim {self.dim}"
            )
        if not np.all(np.isfinite(x)):
            raise ArgumentError("evaluation point must be finite")
        return x


def eval_psi(f: LogConcaveFunction, x) -> float:
    """psi(x) as an extended real; exp(-eval_psi(f, x)) is f(x)."""
    return f.psi(f._check_point(x))


def sup_norm(f: LogConcaveFunction):
    """(||f||_oo, argmax) of a nondegenerate log-concave function."""
    return f.sup_norm()


# -- radial -------------------------------------------------------------


class RadialFunction(LogConcaveFunction):
    """psi(x) = phi(||x||_2) with phi a convex nondecreasing profile."""

    def __init__(self, profile: ScalarProfile, dim: int, sides=None):
        if dim < 1:
            raise ArgumentError("dimension must be >= 1")
        if not profile.is_integrable_exponent(dim):
            raise InvariantError("profile does not give an integrable function")
        self.profile = profile
        self._dim = int(dim)
        # facet budget of level-ball approximations, recorded for reports
        self.sides = int(sides) if sides else (128 if dim == 2 else 0)

    @property
    def dim(self):
        return self._dim

    def psi(self, x):
        x = self._check_point(x)
        return float(self.profile.value(np.linalg.norm(x)))

    def psi_batch(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.asarray(self.profile.value(np.linalg.norm(X, axis=1)))

    def sup_norm(self):
        v0 = float(self.profile.value(0.0))
        return math.exp(-v0), np.zeros(self.dim)

    def _tilted_level(self, u, tilt):
        tilt = np.asarray(tilt, dtype=float)
        if np.linalg.norm(tilt) <= 1e-14:
            if u < float(self.profile.value(0.0)):
                return None
            r = self.profile.inverse(u)
            return HPolytope.ball_approx(max(r, _TINY_RADIUS), self.dim, self.sides or 128)
        if isinstance(self.profile, WallProfile):
            ball = HPolytope.ball_approx(self.profile.radius, self.dim, self.sides or 128)
            nt = np.linalg.norm(tilt)
            return ball.intersect_halfspace(tilt / nt, u / nt)
        return _rayshoot_level(self, u, tilt)

    def polar_base(self):
        return RadialFunction(self.profile.conjugate(), self.dim, self.sides)

    def is_even(self):
        return True

    def support_contains(self, x, interior=True):
        r = self.profile.finite_radius()
        nx = np.linalg.norm(np.asarray(x, dtype=float))
        return nx < r if interior else nx <= r

    def support_scale(self):
        r = self.profile.finite_radius()
        if math.isfinite(r):
            return r
        return max(self.profile.inverse(12.0), 1.0)

    def describe(self):
        return f"radial[{self.profile.describe()}, n={self.dim}]"


def _rayshoot_level(fn: LogConcaveFunction, u, tilt, sides=None):
    """Tangent-halfspace polytope of the smooth body {psi(x) + <tilt,x> <= u}.

    Shoots rays from the (numerically located) minimizer and places a
    supporting halfspace at each boundary point; the result circumscribes
    the true body with O(1/m^2) Hausdorff gap.  All rays advance together
    through batched evaluations.
    """
    n = fn.dim
    tilt = np.asarray(tilt, dtype=float)

    def field(x):
        return fn.psi(x) + float(tilt @ x)

    def field_batch(X):
        return fn.psi_batch(X) + X @ tilt

    # interior point: descend along -tilt from the peak of the base function
    _, x0 = fn.sup_norm()
    nt = np.linalg.norm(tilt)
    if nt > 1e-14:
        d = -tilt / nt

        def g(r):
            return field(x0 + r * d)

        hi = 1.0
        while g(2 * hi) < g(hi) and hi < 1e12:
            hi *= 2.0
        # golden-section for the 1-D minimum along the descent ray
        inv = (math.sqrt(5) - 1) / 2
        a, bb = 0.0, 2 * hi
        c1, c2 = bb - inv * (bb - a), a + inv * (bb - a)
        f1, f2 = g(c1), g(c2)
        for _ in range(200):
            if f1 < f2:
                bb, c2, f2 = c2, c1, f1
                c1 = bb - inv * (bb - a)
                f1 = g(c1)
            else:
                a, c1, f1 = c1, c2, f2
                c2 = a + inv * (bb - a)
                f2 = g(c2)
            if bb - a < 1e-13 * max(1.0, abs(bb)):
                break
        x0 = x0 + 0.5 * (a + bb) * d
    fmin = field(x0)
    if fmin > u - 1e-13:
        return None

    if n == 1:
        dirs = np.array([[1.0], [-1.0]])
    elif n == 2:
        m = sides or 128
        ang = np.arange(m) * (2 * np.pi / m)
        dirs = np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        dirs = icosphere_directions()

    m = dirs.shape[0]
    lo = np.zeros(m)
    hi = np.ones(m)
    for _ in range(64):
        inside = field_batch(x0 + hi[:, None] * dirs) <= u
        if not inside.any():
            break
        lo[inside] = hi[inside]
        hi[inside] *= 2.0
        if np.max(hi) > 1e12:
            raise DegeneracyError("level set appears unbounded along a ray")
    else:
        raise DegeneracyError("level set appears unbounded along a ray")
    for _ in range(70):
        mid = 0.5 * (lo + hi)
        inside = field_batch(x0 + mid[:, None] * dirs) <= u
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    P = x0 + (0.5 * (lo + hi))[:, None] * dirs
    # field gradients at the boundary points by batched central differences
    h = 1e-6
    grads = np.empty((m, n))
    for d in range(n):
        e = np.zeros(n)
        e[d] = h
        grads[:, d] = (field_batch(P + e) - field_batch(P - e)) / (2 * h)
    ng = np.linalg.norm(grads, axis=1)
    keep = ng > 1e-12
    if keep.sum() < n + 1:
        raise DegeneracyError("too few supporting halfspaces found")
    rows = grads[keep] / ng[keep, None]
    offs = np.einsum("ij,ij->i", rows, P[keep])
    return HPolytope(rows, offs)


# -- indicator ------------------------------------------------------------


class IndicatorFunction(LogConcaveFunction):
    """Characteristic function of a full-dimensional bounded polytope."""

    def __init__(self, body: HPolytope, validate=True):
        self.body = body
        if validate:
            _, radius = body.chebyshev_center()
            if radius <= 1e-12:
                raise DegeneracyError("indicator body has empty interior")
            if not body.is_bounded():
                raise DegeneracyError("indicator body is unbounded")

    @property
    def dim(self):
        return self.body.dim

    def psi(self, x):
        x = self._check_point(x)
        return 0.0 if self.body.contains(x) else math.inf

    def psi_batch(self, X):
        inside = self.body.contains_points(X)
        return np.where(inside, 0.0, np.inf)

    def sup_norm(self):
        center, _ = self.body.chebyshev_center()
        return 1.0, center

    def _tilted_level(self, u, tilt):
        tilt = np.asarray(tilt, dtype=float)
        if u < 0:
            # psi >= 0 everywhere, so only the tilt can reach below 0
            pass
        if np.linalg.norm(tilt) <= 1e-14:
            return self.body if u >= 0 else None
        nt = np.linalg.norm(tilt)
        P = self.body.intersect_halfspace(tilt / nt, u / nt)
        try:
            _, r = P.chebyshev_center()
        except DegeneracyError:
            return None
        return P if r > 1e-13 else None

    def polar_base(self):
        return SupportFunction(self.body)

    def is_even(self):
        return self.body.is_symmetric()

    def support_contains(self, x, interior=True):
        return self.body.interior_contains(x) if interior else self.body.contains(x)

    def support_scale(self):
        lo, hi = self.body.bounding_box()
        return float(np.max(np.abs(np.concatenate([lo, hi]))))

    def describe(self):
        return f"indicator[{self.body.num_rows} facets, n={self.dim}]"


# -- support-function exponent ---------------------------------------------


class SupportFunction(LogConcaveFunction):
    """f(y) = exp(-h_K(y)): the polar of the indicator of K.

    Integrable on its own only when 0 is interior to K; with 0 outside, the
    exponent still serves as a polar constraint family whose tilted level
    sets become valid exactly when the tilt moves K around the origin.
    """

    def __init__(self, body: HPolytope):
        self.body = body
        self._verts = body.vertices()

    @property
    def dim(self):
        return self.body.dim

    def psi(self, x):
        x = self._check_point(x)
        return float(np.max(self._verts @ x))

    def psi_batch(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.max(X @ self._verts.T, axis=1)

    def sup_norm(self):
        if np.any(self.body.offsets <= 1e-12):
            raise DegeneracyError(
                "support-function exponent is unbounded below: 0 not interior to K"
            )
        return 1.0, np.zeros(self.dim)

    def _tilted_level(self, u, tilt):
        # h_K(y) + <tilt, y> = h_{K + tilt}(y), so the level set is u*(K+tilt)^polar
        tilt = np.asarray(tilt, dtype=float)
        K = self.body.translate(tilt) if np.linalg.norm(tilt) > 0 else self.body
        if np.any(K.offsets <= 1e-12):
            return None
        if u <= 0:
            if u < -1e-12:
                return None
            return HPolytope.ball_approx(_TINY_RADIUS, self.dim, 16)
        return K.polar().scale(u)

    def polar_base(self):
        return IndicatorFunction(self.body, validate=False)

    def is_even(self):
        return self.body.is_symmetric()

    def support_contains(self, x, interior=True):
        return True  # h_K is finite everywhere

    def support_scale(self):
        # slope range of h_K sets the dual scale; level sets grow like u/offset
        return float(12.0 / np.min(self.body.offsets))

    def describe(self):
        return f"support_exp[{self.body.num_rows} facets, n={self.dim}]"


# -- piecewise quadratic on the line ----------------------------------------


class PiecewiseQuadratic1D(LogConcaveFunction):
    """Convex psi given piecewise as a2 x^2 + a1 x + a0 on contiguous intervals.

    Pieces are (lo, hi, a2, a1, a0) with lo/hi possibly infinite.  Validity:
    a2 >= 0, value continuity at the knots, slopes nondecreasing across knots.
    """

    def __init__(self, pieces, validate=True):
        pieces = [tuple(float(v) for v in p) for p in pieces]
        pieces.sort(key=lambda p: p[0])
        if validate:
            self._validate(pieces)
        self.pieces = tuple(pieces)

    @staticmethod
    def _validate(pieces):
        if not pieces:
            raise ArgumentError("need at least one piece")
        for lo, hi, a2, a1, a0 in pieces:
            if not hi > lo:
                raise ArgumentError("piece interval must have positive length")
            if a2 < -1e-15:
                raise ArgumentError("quadratic coefficient must be nonnegative")
        for (lo1, hi1, a2a, a1a, a0a), (lo2, hi2, a2b, a1b, a0b) in zip(
            pieces, pieces[1:]
        ):
            if abs(hi1 - lo2) > 1e-9 * max(1.0, abs(hi1)):
                raise ArgumentError("pieces must be contiguous")
            x = hi1
            va = a2a * x * x + a1a * x + a0a
            vb = a2b * x * x + a1b * x + a0b
            scale = max(1.0, abs(va), abs(vb))
            if abs(va - vb) > 1e-8 * scale:
                raise ArgumentError(f"discontinuity at knot x={x}")
            if (2 * a2a * x + a1a) > (2 * a2b * x + a1b) + 1e-8 * scale:
                raise ArgumentError(f"slope decreases at knot x={x}: not convex")
        lo0 = pieces[0][0]
        if math.isinf(lo0) and pieces[0][2] == 0 and pieces[0][3] >= 0:
            raise InvariantError("psi not coercive on the left: not integrable")
        hiN, a2N, a1N = pieces[-1][1], pieces[-1][2], pieces[-1][3]
        if math.isinf(hiN) and a2N == 0 and a1N <= 0:
            raise InvariantError("psi not coercive on the right: not integrable")

    @property
    def dim(self):
        return 1

    def domain(self):
        return self.pieces[0][0], self.pieces[-1][1]

    def _piece_at(self, x):
        for lo, hi, a2, a1, a0 in self.pieces:
            if lo - 1e-12 <= x <= hi + 1e-12:
                return a2, a1, a0
        return None

    def psi(self, x):
        x = float(self._check_point(x)[0])
        p = self._piece_at(x)
        if p is None:
            return math.inf
        a2, a1, a0 = p
        return a2 * x * x + a1 * x + a0

    def psi_batch(self, X):
        X = np.asarray(X, dtype=float).reshape(-1)
        out = np.full(X.shape, np.inf)
        for lo, hi, a2, a1, a0 in self.pieces:
            m = (X >= lo - 1e-12) & (X <= hi + 1e-12)
            out[m] = a2 * X[m] ** 2 + a1 * X[m] + a0
        return out

    def sup_norm(self):
        best, arg = math.inf, 0.0
        for lo, hi, a2, a1, a0 in self.pieces:
            cands = []
            if a2 > 0:
                v = -a1 / (2 * a2)
                if lo <= v <= hi:
                    cands.append(v)
            for e in (lo, hi):
                if math.isfinite(e):
                    cands.append(e)
            for x in cands:
                val = a2 * x * x + a1 * x + a0
                if val < best:
                    best, arg = val, x
        return math.exp(-best), np.array([arg])

    def _tilted_level(self, u, tilt):
        tl = float(np.atleast_1d(tilt)[0])
        lo_all, hi_all = math.inf, -math.inf
        for lo, hi, a2, a1, a0 in self.pieces:
            b1 = a1 + tl
            c0 = a0 - u
            if a2 > 1e-300:
                disc = b1 * b1 - 4 * a2 * c0
                if disc < 0:
                    continue
                rt = math.sqrt(disc)
                x1, x2 = (-b1 - rt) / (2 * a2), (-b1 + rt) / (2 * a2)
            else:
                if abs(b1) < 1e-300:
                    if c0 <= 0:
                        x1, x2 = lo, hi
                    else:
                        continue
                elif b1 > 0:
                    x1, x2 = -math.inf, -c0 / b1
                else:
                    x1, x2 = -c0 / b1, math.inf
            seg_lo, seg_hi = max(x1, lo), min(x2, hi)
            if seg_hi >= seg_lo:
                lo_all = min(lo_all, seg_lo)
                hi_all = max(hi_all, seg_hi)
        if hi_all < lo_all:
            return None
        if not (math.isfinite(lo_all) and math.isfinite(hi_all)):
            raise DegeneracyError("unbounded level set of 1D exponent")
        if hi_all - lo_all < _TINY_RADIUS:
            mid = 0.5 * (lo_all + hi_all)
            lo_all, hi_all = mid - _TINY_RADIUS, mid + _TINY_RADIUS
        return HPolytope.interval(lo_all, hi_all)

    def reparametrize(self, shift=0.0, tilt=0.0, const=0.0):
        """The piecewise quadratic x -> psi(x - shift) + tilt*(x - shift) + const."""
        out = []
        for lo, hi, a2, a1, a0 in self.pieces:
            b1 = a1 + tilt
            b0 = a0 + const
            # substitute w = x - shift
            na2 = a2
            na1 = b1 - 2 * a2 * shift
            na0 = a2 * shift * shift - b1 * shift + b0
            out.append((lo + shift, hi + shift, na2, na1, na0))
        return PiecewiseQuadratic1D(out, validate=False)

    def conjugate(self):
        """Exact Legendre transform, again piecewise quadratic."""
        pieces = self.pieces
        events = []

        def val(piece, x):
            _, _, a2, a1, a0 = piece
            return a2 * x * x + a1 * x + a0

        def slope(piece, x):
            _, _, a2, a1, _ = piece
            return 2 * a2 * x + a1

        for lo, hi, a2, a1, a0 in pieces:
            if a2 > 0:
                ylo = 2 * a2 * lo + a1 if math.isfinite(lo) else -math.inf
                yhi = 2 * a2 * hi + a1 if math.isfinite(hi) else math.inf
                A2 = 1.0 / (4 * a2)
                A1 = -a1 / (2 * a2)
                A0 = a1 * a1 / (4 * a2) - a0
                events.append((ylo, yhi, A2, A1, A0))
        # knot (and endpoint) contributions: linear pieces x_k y - psi(x_k)
        knots = []
        first_lo = pieces[0][0]
        if math.isfinite(first_lo):
            knots.append((first_lo, -math.inf, slope(pieces[0], first_lo)))
        for left, right in zip(pieces, pieces[1:]):
            xk = left[1]
            knots.append((xk, slope(left, xk), slope(right, xk)))
        last_hi = pieces[-1][1]
        if math.isfinite(last_hi):
            knots.append((last_hi, slope(pieces[-1], last_hi), math.inf))
        for xk, sl, sr in knots:
            if sr > sl + 1e-14:
                pc = next(p for p in pieces if p[0] - 1e-12 <= xk <= p[1] + 1e-12)
                events.append((sl, sr, 0.0, xk, -val(pc, xk)))
        events = [e for e in events if e[1] > e[0] + 1e-15]
        events.sort(key=lambda e: e[0])
        merged = []
        for e in events:
            if merged and e[0] < merged[-1][1] - 1e-12:
                raise InvariantError("overlapping conjugate pieces")
            merged.append(e)
        return PiecewiseQuadratic1D(merged, validate=False)

    def polar_base(self):
        return self.conjugate()

    def is_even(self, tol=1e-12):
        refl = sorted(
            ((-hi, -lo, a2, -a1, a0) for lo, hi, a2, a1, a0 in self.pieces),
            key=lambda p: p[0],
        )
        if len(refl) != len(self.pieces):
            return False
        for p, q in zip(self.pieces, refl):
            for a, b in zip(p, q):
                if not (a == b or abs(a - b) <= tol * max(1.0, abs(a), abs(b))):
                    return False
        return True

    def support_contains(self, x, interior=True):
        lo, hi = self.domain()
        x = float(np.atleast_1d(x)[0])
        return lo < x < hi if interior else lo <= x <= hi

    def support_scale(self):
        lo, hi = self.domain()
        if math.isfinite(lo) and math.isfinite(hi):
            return max(abs(lo), abs(hi))
        P = self._tilted_level(float(-math.log(self.sup_norm()[0]) + 14.0), np.zeros(1))
        lo2, hi2 = P._interval_bounds()
        return max(abs(lo2), abs(hi2), 1.0)

    def describe(self):
        return f"piecewise_quadratic[{len(self.pieces)} pieces]"


# -- gridded psi -------------------------------------------------------------


class GridFunction(LogConcaveFunction):
    """psi sampled on an axis-aligned grid, multilinear inside, +oo outside.

    Convexity is validated on load: second differences along every grid
    line and midpoint convexity on a deterministic sample of node pairs,
    both up to the recorded interpolation tolerance.
    """

    def __init__(self, axes, values, validate=True):
        axes = tuple(np.asarray(a, dtype=float) for a in axes)
        values = np.asarray(values, dtype=float)
        if len(axes) not in (1, 2):
            raise ArgumentError("grid functions support n in {1, 2}")
        if values.shape != tuple(a.size for a in axes):
            raise ArgumentError("value array shape does not match axes")
        for a in axes:
            if a.size < 2 or np.any(np.diff(a) <= 0):
                raise ArgumentError("axes must be strictly increasing, length >= 2")
        self.axes = axes
        self.values = values
        for a in self.axes:
            a.setflags(write=False)
        self.values.setflags(write=False)
        if validate:
            self._validate()

    @property
    def dim(self):
        return len(self.axes)

    def interpolation_tolerance(self):
        """Bound on the convexity defect introduced by multilinear cells."""
        if self.dim == 1:
            return 1e-12
        v = self.values
        cross = v[:-1, :-1] + v[1:, 1:] - v[:-1, 1:] - v[1:, :-1]
        cross = cross[np.isfinite(cross)]
        return float(np.max(np.abs(cross)) / 4.0 + 1e-12) if cross.size else 1e-12

    def _validate(self):
        tol = 1e-9
        v = self.values
        finite = np.isfinite(v)
        if finite.sum() < 2:
            raise DegeneracyError("grid support needs at least two finite samples")
        if self.dim == 1:
            lines = [v]
        else:
            if finite.sum(axis=0).max() < 2 or finite.sum(axis=1).max() < 2:
                raise DegeneracyError("grid support needs >= 2 finite samples per axis")
            lines = list(v) + list(v.T)
        for line in lines:
            idx = np.where(np.isfinite(line))[0]
            if idx.size == 0:
                continue
            if idx.size >= 2 and not np.all(np.diff(idx) == 1):
                raise ConvexityError("finite samples are not contiguous on a grid line")
            seg = line[idx]
            if seg.size >= 3:
                d2 = seg[:-2] - 2 * seg[1:-1] + seg[2:]
                scale = max(1.0, float(np.max(np.abs(seg))))
                if np.min(d2) < -tol * scale:
                    raise ConvexityError("second differences violate convexity")
        # midpoint convexity on sampled node pairs
        rng = np.random.default_rng(0)
        pts = np.argwhere(finite)
        if pts.shape[0] >= 4:
            itol = self.interpolation_tolerance() + 1e-9
            sel = rng.integers(0, pts.shape[0], size=(200, 2))
            for i, j in sel:
                xa = np.array([self.axes[k][pts[i][k]] for k in range(self.dim)])
                xb = np.array([self.axes[k][pts[j][k]] for k in range(self.dim)])
                mid = 0.5 * (xa + xb)
                vm = self.psi(mid)
                if math.isfinite(vm):
                    if vm > 0.5 * (v[tuple(pts[i])] + v[tuple(pts[j])]) + 4 * itol:
                        raise ConvexityError("midpoint convexity violated on grid")

    def psi(self, x):
        x = self._check_point(x)
        return float(self.psi_batch(x[None, :])[0])

    def psi_batch(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.full(X.shape[0], np.inf)
        if self.dim == 1:
            xs = self.axes[0]
            t = X[:, 0]
            ok = (t >= xs[0]) & (t <= xs[-1])
            idx = np.clip(np.searchsorted(xs, t[ok], side="right") - 1, 0, xs.size - 2)
            w = (t[ok] - xs[idx]) / (xs[idx + 1] - xs[idx])
            vals = (1 - w) * self.values[idx] + w * self.values[idx + 1]
            out[ok] = vals
            return out
        xs, ys = self.axes
        tx, ty = X[:, 0], X[:, 1]
        ok = (tx >= xs[0]) & (tx <= xs[-1]) & (ty >= ys[0]) & (ty <= ys[-1])
        ix = np.clip(np.searchsorted(xs, tx[ok], side="right") - 1, 0, xs.size - 2)
        iy = np.clip(np.searchsorted(ys, ty[ok], side="right") - 1, 0, ys.size - 2)
        wx = (tx[ok] - xs[ix]) / (xs[ix + 1] - xs[ix])
        wy = (ty[ok] - ys[iy]) / (ys[iy + 1] - ys[iy])
        v = self.values
        vals = (
            v[ix, iy] * (1 - wx) * (1 - wy)
            + v[ix + 1, iy] * wx * (1 - wy)
            + v[ix, iy + 1] * (1 - wx) * wy
            + v[ix + 1, iy + 1] * wx * wy
        )
        out[ok] = vals
        return out

    def sup_norm(self):
        v = self.values
        flat = np.where(np.isfinite(v), v, np.inf)
        k = np.unravel_index(np.argmin(flat), v.shape)
        best = v[k]
        arg = np.array([self.axes[d][k[d]] for d in range(self.dim)])
        # one Newton step on a per-axis quadratic fit around the best node
        refined = arg.copy()
        val = best
        for d in range(self.dim):
            i = k[d]
            if 0 < i < self.axes[d].size - 1:
                xm, x0, xp = self.axes[d][i - 1], self.axes[d][i], self.axes[d][i + 1]
                idx_m = list(k); idx_m[d] = i - 1
                idx_p = list(k); idx_p[d] = i + 1
                fm, f0, fp = v[tuple(idx_m)], best, v[tuple(idx_p)]
                if np.isfinite(fm) and np.isfinite(fp):
                    denom = fm - 2 * f0 + fp
                    if denom > 1e-15:
                        h = 0.5 * (xp - xm)
                        step = 0.5 * h * (fm - fp) / denom
                        step = float(np.clip(step, xm - x0, xp - x0))
                        refined[d] = x0 + step
                        val = min(val, f0 - (fm - fp) ** 2 / (8 * denom))
        return math.exp(-val), refined

    def _node_points(self):
        if self.dim == 1:
            return self.axes[0][:, None]
        gx, gy = np.meshgrid(self.axes[0], self.axes[1], indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel()])

    def _tilted_level(self, u, tilt):
        tilt = np.atleast_1d(np.asarray(tilt, dtype=float))
        nodes = self._node_points()
        field = self.values.reshape(-1) + nodes @ tilt
        field = field.reshape(self.values.shape)
        if self.dim == 1:
            return self._level_1d(field, u)
        return self._level_2d(field, u)

    def _level_1d(self, field, u):
        xs = self.axes[0]
        below = np.isfinite(field) & (field <= u)
        if not below.any():
            return None
        idx = np.where(below)[0]
        lo_i, hi_i = idx[0], idx[-1]
        lo = xs[lo_i]
        hi = xs[hi_i]
        if lo_i > 0 and np.isfinite(field[lo_i - 1]):
            w = (u - field[lo_i]) / (field[lo_i - 1] - field[lo_i])
            lo = xs[lo_i] + w * (xs[lo_i - 1] - xs[lo_i])
        if hi_i < xs.size - 1 and np.isfinite(field[hi_i + 1]):
            w = (u - field[hi_i]) / (field[hi_i + 1] - field[hi_i])
            hi = xs[hi_i] + w * (xs[hi_i + 1] - xs[hi_i])
        if hi - lo < _TINY_RADIUS:
            mid = 0.5 * (lo + hi)
            lo, hi = mid - _TINY_RADIUS, mid + _TINY_RADIUS
        return HPolytope.interval(lo, hi)

    def _level_2d(self, field, u):
        # marching squares: inside nodes plus linear edge crossings, then a
        # convex-hull repair pass to remove interpolation jitter
        xs, ys = self.axes
        pts = []
        fin = np.isfinite(field)
        inside = fin & (field <= u)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        pts.append(np.column_stack([gx[inside], gy[inside]]))
        # horizontal edges (vary x)
        fin_pair = fin[:-1, :] & fin[1:, :]
        a, b = field[:-1, :], field[1:, :]
        ok = fin_pair & (((a <= u) & (b > u)) | ((a > u) & (b <= u)))
        if ok.any():
            w = (u - a[ok]) / (b[ok] - a[ok])
            xe = gx[:-1, :][ok] + w * (gx[1:, :][ok] - gx[:-1, :][ok])
            ye = gy[:-1, :][ok]
            pts.append(np.column_stack([xe, ye]))
        # vertical edges (vary y)
        fin_pair = fin[:, :-1] & fin[:, 1:]
        a, b = field[:, :-1], field[:, 1:]
        ok = fin_pair & (((a <= u) & (b > u)) | ((a > u) & (b <= u)))
        if ok.any():
            w = (u - a[ok]) / (b[ok] - a[ok])
            ye = gy[:, :-1][ok] + w * (gy[:, 1:][ok] - gy[:, :-1][ok])
            xe = gx[:, :-1][ok]
            pts.append(np.column_stack([xe, ye]))
        P = np.vstack([p for p in pts if p is not None and p.size])
        if P.shape[0] < 3:
            return None
        if np.ptp(P[:, 0]) < 1e-12 or np.ptp(P[:, 1]) < 1e-12:
            return None
        hull = ConvexHull(P)
        return HPolytope(hull.equations[:, :-1], -hull.equations[:, -1])

    def polar_base(self):
        from .legendre import legendre_nd

        dual_axes, lpsi = legendre_nd(self.axes, self.values)
        return GridFunction(dual_axes, lpsi, validate=False)

    def is_even(self):
        for a in self.axes:
            if not np.allclose(a, -a[::-1], atol=1e-9):
                return False
        v = self.values
        flip = v[tuple(slice(None, None, -1) for _ in range(self.dim))]
        both = np.isfinite(v) & np.isfinite(flip)
        if not np.array_equal(np.isfinite(v), np.isfinite(flip)):
            return False
        return bool(np.allclose(v[both], flip[both], atol=1e-9))

    def support_contains(self, x, interior=True):
        return math.isfinite(self.psi(np.asarray(x, dtype=float)))

    def support_scale(self):
        return float(max(np.max(np.abs(a)) for a in self.axes))

    def describe(self):
        shape = "x".join(str(a.size) for a in self.axes)
        return f"grid[{shape}]"


# -- tilted / recentered wrapper ---------------------------------------------


class TiltedFunction(LogConcaveFunction):
    """psi(x) = base(x - shift) + <tilt, x - shift> + const.

    The wrapper realizes both recentring (shift) and the linear tilt that a
    translation of the primal function induces on its polar.
    """

    def __init__(self, base: LogConcaveFunction, shift=None, tilt=None, const=0.0):
        n = base.dim
        self.base = base
        self.shift = np.zeros(n) if shift is None else np.asarray(shift, dtype=float).copy()
        self.tilt = np.zeros(n) if tilt is None else np.asarray(tilt, dtype=float).copy()
        self.const = float(const)
        if self.shift.shape != (n,) or self.tilt.shape != (n,):
            raise DimensionMismatchError("shift/tilt dimension mismatch")
        self.shift.setflags(write=False)
        self.tilt.setflags(write=False)

    @property
    def dim(self):
        return self.base.dim

    def psi(self, x):
        x = self._check_point(x)
        w = x - self.shift
        p = self.base.psi(w)
        if p == math.inf:
            return math.inf
        return p + float(self.tilt @ w) + self.const

    def psi_batch(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        W = X - self.shift
        p = self.base.psi_batch(W)
        return np.where(np.isfinite(p), p + W @ self.tilt + self.const, np.inf)

    def sup_norm(self):
        val, arg = _minimize_tilted(self.base, self.tilt)
        return math.exp(-(val + self.const)), arg + self.shift

    def _tilted_level(self, u, tilt):
        total = self.tilt + np.atleast_1d(np.asarray(tilt, dtype=float))
        # {x : base(w) + <self.tilt, w> + const + <tilt, x> <= u}, w = x - shift
        # <tilt, x> = <tilt, w> + <tilt, shift>
        u_eff = u - self.const - float(np.atleast_1d(tilt) @ self.shift)
        P = self.base._tilted_level(u_eff, total)
        if P is None:
            return None
        return P.translate(self.shift)

    def polar_base(self):
        raise NotImplementedError("polar of a wrapped function is not needed")

    def is_even(self):
        if np.linalg.norm(self.shift) == 0 and np.linalg.norm(self.tilt) == 0:
            return self.base.is_even()
        return False

    def support_contains(self, x, interior=True):
        return self.base.support_contains(np.asarray(x, dtype=float) - self.shift, interior)

    def support_scale(self):
        return self.base.support_scale() + float(np.linalg.norm(self.shift))

    def describe(self):
        return f"tilted[{self.base.describe()}]"


def _minimize_tilted(base: LogConcaveFunction, tilt):
    """(min, argmin) of base.psi(w) + <tilt, w> by scan plus local refinement."""
    n = base.dim
    tilt = np.asarray(tilt, dtype=float)
    if isinstance(base, PiecewiseQuadratic1D):
        tl = float(tilt[0])
        best, arg = math.inf, 0.0
        for lo, hi, a2, a1, a0 in base.pieces:
            b1 = a1 + tl
            cands = [e for e in (lo, hi) if math.isfinite(e)]
            if a2 > 0:
                v = -b1 / (2 * a2)
                if lo <= v <= hi:
                    cands.append(v)
            for x in cands:
                val = a2 * x * x + b1 * x + a0
                if val < best:
                    best, arg = val, x
        return best, np.array([arg])
    if np.linalg.norm(tilt) <= 1e-14:
        v, arg = base.sup_norm()
        return -math.log(v), arg
    scale = base.support_scale()
    if n == 1:
        xs = np.linspace(-4 * scale, 4 * scale, 4097)
        vals = base.psi_batch(xs[:, None]) + xs * tilt[0]
    else:
        g = np.linspace(-4 * scale, 4 * scale, 257)
        mesh = np.meshgrid(*([g] * n), indexing="ij")
        pts = np.column_stack([m.ravel() for m in mesh])
        vals = base.psi_batch(pts) + pts @ tilt
        xs = pts
    k = int(np.argmin(vals))
    x0 = np.atleast_1d(xs[k]) if n == 1 else xs[k]
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    from scipy.optimize import minimize

    def obj(w):
        p = base.psi(w)
        return p + float(tilt @ w) if math.isfinite(p) else 1e30

    res = minimize(obj, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000})
    return float(res.fun), np.asarray(res.x, dtype=float)


def tilt_function(f: LogConcaveFunction, b) -> LogConcaveFunction:
    """The function exp(-(psi(x) + <b, x>)); absorbs into closed forms."""
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if np.linalg.norm(b) == 0:
        return f
    if isinstance(f, PiecewiseQuadratic1D):
        return f.reparametrize(shift=0.0, tilt=float(b[0]))
    if isinstance(f, TiltedFunction):
        return TiltedFunction(
            f.base,
            f.shift,
            f.tilt + b,
            f.const + float(b @ f.shift),
        )
    return TiltedFunction(f, None, b, 0.0)


def recenter_function(base: LogConcaveFunction, z) -> LogConcaveFunction:
    """The exponent psi_base(y - z) - <z, y - z>: the recentered transform."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.linalg.norm(z) == 0:
        return base
    if isinstance(base, PiecewiseQuadratic1D):
        return base.reparametrize(shift=float(z[0]), tilt=-float(z[0]))
    return TiltedFunction(base, z, -z, 0.0)
