import math

import numpy as np
import pytest

import lownerjohn as lj


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def gaussian(n, sides=None):
    return lj.RadialFunction(lj.GAUSSIAN_PROFILE, n, sides=sides)


def square_indicator(half=1.0):
    return lj.IndicatorFunction(lj.HPolytope.box([-half, -half], [half, half]))


def interval_indicator(lo=-1.0, hi=1.0):
    return lj.IndicatorFunction(lj.HPolytope.interval(lo, hi))


def khachiyan_mvee(points, tol=1e-7, max_iter=100000):
    """Minimum-volume enclosing ellipsoid {x : (x-c)' A (x-c) <= 1} of points.

    Khachiyan's barycentric-coordinate ascent; independent of the main
    solvers on purpose.
    """
    P = np.asarray(points, dtype=float)
    N, d = P.shape
    Q = np.column_stack([P, np.ones(N)]).T
    u = np.full(N, 1.0 / N)
    for _ in range(max_iter):
        V = Q @ np.diag(u) @ Q.T
        M = np.einsum("ij,jk,ki->i", Q.T, np.linalg.inv(V), Q)
        j = int(np.argmax(M))
        step = (M[j] - d - 1.0) / ((d + 1.0) * (M[j] - 1.0))
        new_u = (1.0 - step) * u
        new_u[j] += step
        if np.linalg.norm(new_u - u) < tol:
            u = new_u
            break
        u = new_u
    c = P.T @ u
    A = np.linalg.inv(P.T @ np.diag(u) @ P - np.outer(c, c)) / d
    return A, c


def ellipsoid_hausdorff(M1, c1, M2, c2, ndirs=4096):
    """Hausdorff distance between M1 B + c1 and M2 B + c2 via support functions."""
    ang = np.linspace(0, 2 * math.pi, ndirs, endpoint=False)
    D = np.column_stack([np.cos(ang), np.sin(ang)])
    h1 = np.linalg.norm(D @ M1.T, axis=1) + D @ c1
    h2 = np.linalg.norm(D @ M2.T, axis=1) + D @ c2
    return float(np.max(np.abs(h1 - h2)))


def random_symmetric_polytope(rng, rows=8, dim=2):
    while True:
        A = rng.standard_normal((rows, dim))
        norms = np.linalg.norm(A, axis=1)
        if np.min(norms) < 1e-6:
            continue
        A = A / norms[:, None]
        if np.linalg.svd(A, compute_uv=False)[-1] < 0.2:
            continue
        b = rng.uniform(0.5, 2.0, rows)
        return lj.SymmetricPolytope(A, b)


def random_symmetric_hexagon(rng):
    ang = np.sort(rng.uniform(0, math.pi, 3))
    if np.min(np.diff(ang, append=ang[0] + math.pi)) < 0.3:
        ang = np.array([0.2, 1.3, 2.4]) + rng.uniform(0, 0.3)
    A = np.column_stack([np.cos(ang), np.sin(ang)])
    b = rng.uniform(0.6, 1.6, 3)
    sym = lj.SymmetricPolytope(A, b)
    return lj.IndicatorFunction(sym.to_hpolytope())
