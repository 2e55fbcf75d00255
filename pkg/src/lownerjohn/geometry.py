"""Convex-body machinery: H-polytopes, symmetrization, Hausdorff distance.

Every polytope is stored in halfspace form with *unit* facet normals, so a
row (a_i, c_i) encodes <a_i, x> <= c_i with ||a_i|| = 1.  Unit normals make
the inscribed-ellipsoid constraint ||T a_i|| <= c_i scale-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import linprog, nnls
from scipy.spatial import ConvexHull, HalfspaceIntersection

from .errors import (
    ArgumentError,
    CenterOutsideError,
    DegeneracyError,
    DimensionMismatchError,
    EmptyLevelSetError,
    InvariantError,
)

_TOL = 1e-9


def _as_matrix(normals, offsets):
    A = np.atleast_2d(np.asarray(normals, dtype=float))
    c = np.atleast_1d(np.asarray(offsets, dtype=float))
    if A.shape[0] != c.shape[0]:
        raise ArgumentError("normals and offsets disagree in row count")
    norms = np.linalg.norm(A, axis=1)
    if np.any(norms < 1e-14):
        raise ArgumentError("zero facet normal")
    A = A / norms[:, None]
    c = c / norms
    A.setflags(write=False)
    c.setflags(write=False)
    return A, c


@dataclass(frozen=True)
class HPolytope:
    """Intersection of halfspaces <a_i, x> <= c_i, a_i unit vectors."""

    normals: np.ndarray
    offsets: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __init__(self, normals, offsets):
        A, c = _as_matrix(normals, offsets)
        object.__setattr__(self, "normals", A)
        object.__setattr__(self, "offsets", c)
        object.__setattr__(self, "_cache", {})

    @property
    def dim(self):
        return self.normals.shape[1]

    @property
    def num_rows(self):
        return self.normals.shape[0]

    @staticmethod
    def box(lo, hi):
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if np.any(hi <= lo):
            raise ArgumentError("box needs lo < hi per axis")
        n = lo.size
        eye = np.eye(n)
        return HPolytope(np.vstack([eye, -eye]), np.concatenate([hi, -lo]))

    @staticmethod
    def interval(lo, hi):
        return HPolytope.box([lo], [hi])

    @staticmethod
    def ball_approx(radius, dim, sides=128):
        """Circumscribed (tangent-plane) polytope of radius*B around 0.

        2D uses a regular ``sides``-gon; 3D uses tangent planes at icosphere
        directions; 1D is exact.  The tangent construction keeps the
        inscribed ball exactly radius*B, so downstream inscribed-ellipsoid
        answers for balls carry no polytopal error.
        """
        if radius <= 0:
            raise ArgumentError("radius must be positive")
        if dim == 1:
            return HPolytope.interval(-radius, radius)
        if dim == 2:
            ang = np.arange(sides) * (2 * np.pi / sides)
            A = np.column_stack([np.cos(ang), np.sin(ang)])
            return HPolytope(A, np.full(sides, float(radius)))
        if dim == 3:
            A = icosphere_directions()
            return HPolytope(A, np.full(A.shape[0], float(radius)))
        raise ArgumentError("ball approximation supports dim <= 3")

    # ----- membership ---------------------------------------------------

    def contains(self, x, tol=_TOL):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatchError(f"expected point of dim {self.dim}")
        return bool(np.all(self.normals @ x <= self.offsets + tol))

    def interior_contains(self, x, margin=_TOL):
        x = np.asarray(x, dtype=float)
        return bool(np.all(self.normals @ x < self.offsets - margin))

    def contains_points(self, X, tol=_TOL):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.all(X @ self.normals.T <= self.offsets + tol, axis=1)

    # ----- basic transforms ----------------------------------------------

    def translate(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise DimensionMismatchError("translation vector dimension mismatch")
        return HPolytope(self.normals, self.offsets + self.normals @ v)

    def scale(self, factor):
        """Homothety about the origin by factor > 0."""
        if factor <= 0:
            raise ArgumentError("scale factor must be positive")
        return HPolytope(self.normals, self.offsets * factor)

    def intersect_halfspace(self, a, c):
        return HPolytope(
            np.vstack([self.normals, np.asarray(a, dtype=float)[None, :]]),
            np.concatenate([self.offsets, [float(c)]]),
        )

    # ----- derived geometry ----------------------------------------------

    def chebyshev_center(self):
        """(center, radius) of a largest inscribed ball; radius < 0 if empty."""
        n = self.dim
        cobj = np.zeros(n + 1)
        cobj[-1] = -1.0
        A_ub = np.hstack([self.normals, np.ones((self.num_rows, 1))])
        res = linprog(
            cobj,
            A_ub=A_ub,
            b_ub=self.offsets,
            bounds=[(None, None)] * n + [(None, None)],
            method="highs",
        )
        if res.status == 3:
            raise DegeneracyError("polytope is unbounded")
        if not res.success:
            raise DegeneracyError(f"chebyshev LP failed: {res.message}")
        return res.x[:n], res.x[n]

    def is_bounded(self):
        # Bounded iff the recession cone {d : A d <= 0} is {0}.
        for j in range(self.dim):
            for sign in (1.0, -1.0):
                cobj = np.zeros(self.dim)
                cobj[j] = -sign
                res = linprog(
                    cobj,
                    A_ub=self.normals,
                    b_ub=np.zeros(self.num_rows),
                    bounds=[(-1, 1)] * self.dim,
                    method="highs",
                )
                if res.success and -res.fun > 1e-7:
                    return False
        return True

    def vertices(self):
        """Vertex array (k, n); cached.  n <= 3 by construction of callers."""
        if "vertices" in self._cache:
            return self._cache["vertices"]
        if self.dim == 1:
            lo, hi = self._interval_bounds()
            V = np.array([[lo], [hi]])
        else:
            center, radius = self.chebyshev_center()
            if radius <= 1e-13:
                raise DegeneracyError("polytope has empty interior")
            halfspaces = np.hstack([self.normals, -self.offsets[:, None]])
            with np.errstate(divide="ignore", invalid="ignore"):
                try:
                    hs = HalfspaceIntersection(halfspaces, center)
                    pts = hs.intersections
                    if not np.all(np.isfinite(pts)):
                        raise DegeneracyError("polytope is unbounded")
                    hull = ConvexHull(pts)
                except DegeneracyError:
                    raise
                except Exception as exc:
                    if not self.is_bounded():
                        raise DegeneracyError("polytope is unbounded") from exc
                    raise
            V = pts[hull.vertices]
        V.setflags(write=False)
        self._cache["vertices"] = V
        return V

    def _interval_bounds(self):
        pos = self.normals[:, 0] > 0
        neg = ~pos
        if not pos.any() or not neg.any():
            raise DegeneracyError("1D polytope is unbounded")
        hi = float(np.min(self.offsets[pos] / self.normals[pos, 0]))
        lo = float(np.max(-self.offsets[neg] / (-self.normals[neg, 0])))
        if hi < lo:
            raise DegeneracyError("1D polytope is empty")
        return lo, hi

    def bounding_box(self):
        V = self.vertices()
        return V.min(axis=0), V.max(axis=0)

    def centroid(self):
        """Volume centroid (1D interval midpoint, 2D shoelace, 3D tetra fan)."""
        V = self.vertices()
        if self.dim == 1:
            return V.mean(axis=0)
        if self.dim == 2:
            hull = ConvexHull(V)
            P = V[hull.vertices]
            x, y = P[:, 0], P[:, 1]
            xn, yn = np.roll(x, -1), np.roll(y, -1)
            cross = x * yn - xn * y
            area = cross.sum() / 2.0
            cx = ((x + xn) * cross).sum() / (6 * area)
            cy = ((y + yn) * cross).sum() / (6 * area)
            return np.array([cx, cy])
        hull = ConvexHull(V)
        total = 0.0
        acc = np.zeros(3)
        anchor = V[hull.vertices].mean(axis=0)
        for simplex in hull.simplices:
            tet = np.vstack([V[simplex], anchor])
            vol = abs(np.linalg.det(tet[:3] - tet[3])) / 6.0
            total += vol
            acc += vol * tet.mean(axis=0)
        if total <= 0:
            raise DegeneracyError("degenerate 3D polytope")
        return acc / total

    def polar(self):
        """Polar body {y : <y, x> <= 1 on P}; requires 0 in the interior."""
        if np.any(self.offsets <= _TOL):
            raise CenterOutsideError("polar needs 0 strictly inside the body")
        pts = self.normals / self.offsets[:, None]
        if self.dim == 1:
            hi = float(np.max(pts))
            lo = float(np.min(pts))
            return HPolytope.interval(lo, hi) if lo < hi else HPolytope.interval(lo - 1e-15, hi + 1e-15)
        hull = ConvexHull(pts)
        # hull.equations rows are [a, b] with a.x + b <= 0
        return HPolytope(hull.equations[:, :-1], -hull.equations[:, -1])

    def is_symmetric(self, tol=1e-9):
        A, c = self.normals, self.offsets
        for i in range(self.num_rows):
            d = np.linalg.norm(A + A[i], axis=1) + np.abs(c - c[i])
            if not np.any(d < tol * max(1.0, abs(c[i]))):
                return False
        return True


@dataclass(frozen=True)
class SymmetricPolytope:
    """Origin-symmetric body {x : |<a_i, x>| <= b_i}, a_i unit, b_i > 0."""

    normals: np.ndarray
    offsets: np.ndarray

    def __init__(self, normals, offsets, validate=True):
        A, b = _as_matrix(normals, offsets)
        if validate:
            if np.any(b <= 0):
                raise CenterOutsideError("symmetric polytope needs all offsets > 0")
            # conv{+-a_i} contains a ball around 0 iff the normals span R^n;
            # the smallest singular value certifies the spanning radius.
            if min(A.shape) < A.shape[1] or np.linalg.svd(A, compute_uv=False)[-1] < 1e-9:
                raise DegeneracyError("facet normals do not positively span R^n")
        object.__setattr__(self, "normals", A)
        object.__setattr__(self, "offsets", b)

    @property
    def dim(self):
        return self.normals.shape[1]

    @property
    def num_rows(self):
        return self.normals.shape[0]

    def inradius(self):
        return float(np.min(self.offsets))

    def contains(self, x, tol=_TOL):
        x = np.asarray(x, dtype=float)
        return bool(np.all(np.abs(self.normals @ x) <= self.offsets + tol))

    def contains_points(self, X, tol=_TOL):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.all(np.abs(X @ self.normals.T) <= self.offsets + tol, axis=1)

    def to_hpolytope(self):
        return HPolytope(
            np.vstack([self.normals, -self.normals]),
            np.concatenate([self.offsets, self.offsets]),
        )

    def radial_extent(self, direction):
        """Largest t with t*direction inside the body."""
        d = np.asarray(direction, dtype=float)
        proj = np.abs(self.normals @ d)
        active = proj > 1e-14
        if not active.any():
            return math.inf
        return float(np.min(self.offsets[active] / proj[active]))


# ---------------------------------------------------------------------------
# module-level operations


def symmetrize(P: HPolytope) -> SymmetricPolytope:
    """P cap (-P) as a symmetric polytope; requires 0 in the interior of P."""
    if np.any(P.offsets <= 0):
        raise CenterOutsideError("symmetrize needs 0 in the interior of P")
    return SymmetricPolytope(P.normals, P.offsets)


def translate(P: HPolytope, v) -> HPolytope:
    """P + v; P+v contains x iff P contains x - v."""
    return P.translate(v)


def level_set(f, s) -> HPolytope:
    """Super-level set {x : f(x) >= s} of a log-concave function.

    Raises EmptyLevelSetError for s above sup f and ArgumentError for s <= 0.
    Exactness depends on the function variant; radial variants return a
    tangent regular polytope of the level ball (the approximation side and
    facet count are recorded on the function object).
    """
    if not (s > 0):
        raise ArgumentError("level parameter must be positive")
    sup, _ = f.sup_norm()
    if s > sup * (1 + 1e-12):
        raise EmptyLevelSetError(f"s={s} exceeds sup f = {sup}")
    return f.level_set(s)


def _dist_point_to_hull(point, vertices):
    """Euclidean distance from point to conv(vertices) via a penalized NNLS.

    min ||V^T w - p|| s.t. w >= 0, sum w = 1, solved by appending a heavily
    weighted normalization row.
    """
    V = np.asarray(vertices, dtype=float)
    p = np.asarray(point, dtype=float)
    scale = max(1.0, np.abs(V).max())
    # modest penalty weight: the simplex weights are renormalized below, and
    # a large weight wrecks the conditioning of the NNLS normal equations
    rho = 1e3 * scale
    A = np.vstack([V.T, rho * np.ones(V.shape[0])])
    b = np.concatenate([p, [rho]])
    w, _ = nnls(A, b)
    total = w.sum()
    if total <= 0:
        return float(np.linalg.norm(p))
    proj = V.T @ (w / total)
    return float(np.linalg.norm(proj - p))


def hausdorff_distance(P: HPolytope, Q: HPolytope) -> float:
    """Hausdorff distance between two bounded polytopes (n <= 3)."""
    if P.dim != Q.dim:
        raise DimensionMismatchError("polytopes live in different dimensions")
    VP, VQ = P.vertices(), Q.vertices()
    d_pq = max(_dist_point_to_hull(v, VQ) for v in VP)
    d_qp = max(_dist_point_to_hull(w, VP) for w in VQ)
    return max(d_pq, d_qp)


@lru_cache(maxsize=None)
def _icosphere_cached(level):
    phi = (1 + math.sqrt(5)) / 2
    verts = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            verts += [(0.0, a, b), (a, b, 0.0), (b, 0.0, a)]
    verts = [np.array(v) / np.linalg.norm(v) for v in verts]
    hull = ConvexHull(np.array(verts))
    faces = [tuple(s) for s in hull.simplices]
    pts = {tuple(np.round(v, 12)): v for v in verts}

    def midpoint(u, v):
        m = u + v
        return m / np.linalg.norm(m)

    tri = [(verts[i], verts[j], verts[k]) for i, j, k in faces]
    for _ in range(level):
        new_tri = []
        for a, b, c in tri:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_tri += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
            for m in (ab, bc, ca):
                pts[tuple(np.round(m, 12))] = m
        tri = new_tri
    A = np.array(list(pts.values()))
    A.setflags(write=False)
    return A


def icosphere_directions(level=3):
    """Unit directions from a subdivided icosahedron (level 3: 642 points)."""
    return _icosphere_cached(level)
