"""Desk-scale brute-force solvers that certify the main pipeline.

Everything here is deliberately dumb: dense feasibility sampling and grid
scans with lexicographic argmin tie-breaks, so a disagreement with the main
solvers points at the main solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import LogConcaveFunction
from .errors import ArgumentError, BracketError
from .geometry import SymmetricPolytope

FEASIBILITY_SAMPLES = 4096


@dataclass(frozen=True)
class OracleResult:
    params: dict
    objective: float
    grids: dict = field(default_factory=dict)
    gap_vs: float = math.nan  # relative gap against a supplied reference

    def with_reference(self, reference):
        gap = (self.objective - reference) / max(abs(reference), 1e-300)
        return OracleResult(self.params, self.objective, self.grids, gap)


def _sample_axis(f: LogConcaveFunction):
    scale = f.support_scale()
    _, arg = f.sup_norm()
    c = float(arg[0])
    return np.linspace(c - 4 * scale, c + 4 * scale, FEASIBILITY_SAMPLES)


def brute_lowner_1d(f: LogConcaveFunction, a_grid, b_grid, t_grid) -> OracleResult:
    """Exhaustive scan of 2 e^t / a over majorants a|x+b| - t <= psi(x).

    Feasibility is checked on a dense sample of the support region; ties
    break lexicographically in (a, b, t).
    """
    if f.dim != 1:
        raise ArgumentError("1-D oracle")
    a_grid = np.asarray(a_grid, dtype=float)
    b_grid = np.asarray(b_grid, dtype=float)
    t_grid = np.sort(np.asarray(t_grid, dtype=float))
    xs = _sample_axis(f)
    psis = f.psi_batch(xs[:, None])
    fin = np.isfinite(psis)
    xs, psis = xs[fin], psis[fin]

    best = None
    for a in a_grid:
        if a <= 0:
            continue
        for b in b_grid:
            t_req = np.max(a * np.abs(xs + b) - psis)
            k = np.searchsorted(t_grid, t_req - 1e-12)
            if k >= t_grid.size:
                continue
            t = float(t_grid[k])
            obj = 2.0 * math.exp(t) / a
            key = (obj, a, b, t)
            if best is None or key < best:
                best = key
    if best is None:
        raise BracketError("no feasible point on the supplied grids")
    obj, a, b, t = best
    return OracleResult(
        params={"a": float(a), "b": float(b), "t": float(t)},
        objective=float(obj),
        grids={"a": a_grid.size, "b": b_grid.size, "t": t_grid.size},
    )


def brute_john_1d(f: LogConcaveFunction, a_grid, b_grid) -> OracleResult:
    """Scan of s*a over minorants s 1_{[m-a, m+a]} <= f, s = e^{-max psi on window}."""
    if f.dim != 1:
        raise ArgumentError("1-D oracle")
    a_grid = np.asarray(a_grid, dtype=float)
    b_grid = np.asarray(b_grid, dtype=float)
    xs = _sample_axis(f)
    psis = f.psi_batch(xs[:, None])

    best = None
    for a in a_grid:
        if a <= 0:
            continue
        for m in b_grid:
            mask = (xs >= m - a) & (xs <= m + a)
            if not mask.any():
                continue
            t = float(np.max(psis[mask]))
            if not math.isfinite(t):
                continue
            s = math.exp(-t)
            key = (-s * a, a, m, s)
            if best is None or key < best:
                best = key
    if best is None:
        raise BracketError("no feasible window on the supplied grids")
    negobj, a, m, s = best
    return OracleResult(
        params={"s": float(s), "a": float(a), "b": float(m)},
        objective=float(-negobj),
        grids={"a": a_grid.size, "b": b_grid.size},
    )


def default_grids_1d(f: LogConcaveFunction, resolution=96):
    """Bracketing grids for the 1-D oracles, centered on the peak of f.

    Doubling the resolution produces supersets of the coarser grids, so the
    best objective found improves monotonically under refinement.
    """
    scale = f.support_scale()
    _, arg = f.sup_norm()
    c = float(arg[0])
    a_grid = np.geomspace(0.05 / max(scale, 0.05), 40.0 / max(scale, 0.05), resolution + 1)
    b_grid = np.linspace(c - 2 * scale, c + 2 * scale, resolution + 1)
    t_grid = np.linspace(0.0, 12.0, 16 * resolution + 1)
    return a_grid, b_grid, t_grid


def brute_centered_mvie_2d(P: SymmetricPolytope, angle_steps=180, axis_steps=256) -> OracleResult:
    """Grid scan of T = R(theta) diag(alpha, beta) R(theta)' for the max det.

    Axis lengths are floored to the grid so every reported T is feasible;
    accuracy is about 1/axis_steps relative on the determinant.
    """
    if P.dim != 2:
        raise ArgumentError("2-D oracle")
    A, b = P.normals, P.offsets
    thetas = np.arange(angle_steps) * (math.pi / angle_steps)
    dirs = np.column_stack(
        [np.cos(np.linspace(0, math.pi, 512)), np.sin(np.linspace(0, math.pi, 512))]
    )
    proj = np.abs(dirs @ A.T)
    with np.errstate(divide="ignore"):
        radial = np.where(proj > 1e-14, b[None, :] / proj, np.inf).min(axis=1)
    r_max = float(np.max(radial))
    alphas = np.linspace(r_max / axis_steps, r_max, axis_steps)

    best = None
    for th in thetas:
        R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
        Ar = A @ R  # rows a_i' R; constraint: alpha^2 u^2 + beta^2 v^2 <= b^2
        u2 = Ar[:, 0] ** 2
        v2 = Ar[:, 1] ** 2
        slack = b * b - np.outer(alphas**2, u2)  # (n_alpha, m)
        with np.errstate(divide="ignore", invalid="ignore"):
            beta2 = np.where(v2 > 1e-18, slack / v2, np.inf)
        beta2 = np.where(slack < 0, -np.inf, beta2)
        beta_cap = np.sqrt(np.maximum(beta2.min(axis=1), 0.0))
        feasible = beta2.min(axis=1) >= 0
        # floor beta to the alpha grid so the scan stays a grid scan
        idx = np.clip(np.searchsorted(alphas, beta_cap, side="right") - 1, -1, axis_steps - 1)
        for i, alpha in enumerate(alphas):
            if not feasible[i] or idx[i] < 0:
                continue
            beta = alphas[idx[i]]
            det = alpha * beta
            key = (-det, th, alpha, beta)
            if best is None or key < best:
                best = key
    if best is None:
        raise BracketError("no feasible ellipsoid on the grid")
    negdet, th, alpha, beta = best
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    T = R @ np.diag([alpha, beta]) @ R.T
    return OracleResult(
        params={"theta": float(th), "alpha": float(alpha), "beta": float(beta), "T": T},
        objective=float(-negdet),
        grids={"angle": angle_steps, "axis": axis_steps},
    )
