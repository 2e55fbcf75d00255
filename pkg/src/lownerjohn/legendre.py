"""Legendre-Fenchel transforms and polar log-concave functions.

The discrete transform ``llt_1d`` runs in linear time via the monotone
convex-hull scan; ``legendre_nd`` factorizes the n-dimensional transform
into per-axis 1-D passes (with a sign flip between passes, since each pass
produces the negative of a convex function of the remaining variables).

``polar`` routes closed-form variants to closed-form polars:

* radial          -> radial with the conjugate profile
* indicator of K  -> exp(-h_K)
* exp(-h_K)       -> indicator of K
* piecewise quadratic -> piecewise quadratic (exact conjugation)
* grid            -> grid on an automatically chosen dual window (grid-LLT)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    GridFunction,
    LogConcaveFunction,
    recenter_function,
    tilt_function,
)
from .errors import ArgumentError, CenterOutsideError, ConvexityError

_CONVEXITY_RTOL = 1e-9


@dataclass(frozen=True)
class PolarFunction:
    """A polar f^z: the function itself plus the center and how it was built."""

    fn: LogConcaveFunction
    center: np.ndarray
    provenance: str  # "closed-form" or "grid-llt"

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float)).copy()
        c.setflags(write=False)
        object.__setattr__(self, "center", c)


def _validate_convex_1d(xs, psi, where="input"):
    idx = np.where(np.isfinite(psi))[0]
    if idx.size < 2:
        raise ArgumentError(f"{where}: need at least two finite samples")
    if np.any(np.diff(idx) != 1):
        raise ConvexityError(f"{where}: finite samples must be contiguous")
    x = xs[idx]
    v = psi[idx]
    slopes = np.diff(v) / np.diff(x)
    if slopes.size >= 2:
        scale = max(1.0, float(np.max(np.abs(slopes))))
        if np.min(np.diff(slopes)) < -_CONVEXITY_RTOL * scale:
            raise ConvexityError(f"{where}: slopes decrease beyond tolerance")
    return idx


def _lower_hull(x, v):
    """Indices of the lower convex hull of the graph points (x, v)."""
    hull = []
    for i in range(x.size):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            # keep the turn convex: slope(i0,i1) <= slope(i1,i)
            lhs = (v[i1] - v[i0]) * (x[i] - x[i1])
            rhs = (v[i] - v[i1]) * (x[i1] - x[i0])
            if lhs > rhs:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.array(hull, dtype=int)


def llt_1d(xs, psi, ys=None, validate=True):
    """Discrete Legendre transform max_i (y*x_i - psi_i) on a dual grid.

    When ``ys`` is omitted the dual grid spans the subdifferential range of
    the sampled function (the slopes of its lower hull), which is exactly
    where the transform has finite slope; degenerate ranges are widened to
    unit half-width.  Returns ``(ys, lpsi)``.
    """
    xs = np.asarray(xs, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if xs.ndim != 1 or xs.shape != psi.shape:
        raise ArgumentError("xs and psi must be equal-length 1-D arrays")
    if np.any(np.diff(xs) <= 0):
        raise ArgumentError("xs must be strictly increasing")
    if validate:
        idx = _validate_convex_1d(xs, psi)
    else:
        idx = np.where(np.isfinite(psi))[0]
        if idx.size == 0:
            ys_out = np.asarray(ys, dtype=float) if ys is not None else np.array([0.0])
            return ys_out, np.full(ys_out.shape, -np.inf)
    x = xs[idx]
    v = psi[idx]
    hull = _lower_hull(x, v)
    hx, hv = x[hull], v[hull]

    if ys is None:
        if hx.size >= 2:
            s_lo = (hv[1] - hv[0]) / (hx[1] - hx[0])
            s_hi = (hv[-1] - hv[-2]) / (hx[-1] - hx[-2])
        else:
            s_lo = s_hi = 0.0
        if s_hi - s_lo < 1e-12 * max(1.0, abs(s_lo)):
            mid = 0.5 * (s_lo + s_hi)
            s_lo, s_hi = mid - 1.0, mid + 1.0
        ys = np.linspace(s_lo, s_hi, xs.size)
    else:
        ys = np.asarray(ys, dtype=float)

    # monotone-argmax scan: the best hull vertex for slope y is the last one
    # whose outgoing edge slope is <= y, so a sorted lookup replaces the walk
    if hx.size > 1:
        slopes = np.diff(hv) / np.diff(hx)
        k = np.searchsorted(slopes, ys, side="right")
    else:
        k = np.zeros(ys.shape, dtype=int)
    lpsi = hx[k] * ys - hv[k]
    return ys, lpsi


def _llt_along_axis(axes_in, values, axis, ys=None, validate=False):
    """Apply llt_1d along one axis with a shared dual grid for all slices."""
    xs = axes_in[axis]
    moved = np.moveaxis(values, axis, -1)
    flat = moved.reshape(-1, xs.size)
    if ys is None:
        s_lo, s_hi = math.inf, -math.inf
        for row in flat:
            idx = np.where(np.isfinite(row))[0]
            if idx.size < 2:
                continue
            x = xs[idx]
            v = row[idx]
            hull = _lower_hull(x, v)
            hx, hv = x[hull], v[hull]
            if hx.size >= 2:
                s_lo = min(s_lo, (hv[1] - hv[0]) / (hx[1] - hx[0]))
                s_hi = max(s_hi, (hv[-1] - hv[-2]) / (hx[-1] - hx[-2]))
        if not math.isfinite(s_lo):
            s_lo, s_hi = -1.0, 1.0
        if s_hi - s_lo < 1e-12 * max(1.0, abs(s_lo)):
            mid = 0.5 * (s_lo + s_hi)
            s_lo, s_hi = mid - 1.0, mid + 1.0
        ys = np.linspace(s_lo, s_hi, xs.size)
    else:
        ys = np.asarray(ys, dtype=float)
    out = np.empty((flat.shape[0], ys.size))
    for i, row in enumerate(flat):
        if np.isfinite(row).sum() == 0:
            out[i] = -np.inf
            continue
        _, out[i] = llt_1d(xs, row, ys=ys, validate=validate)
    shape = list(moved.shape[:-1]) + [ys.size]
    return ys, np.moveaxis(out.reshape(shape), -1, axis)


def legendre_nd(axes, psi, out_axes=None):
    """Full transform sup_x (<x, y> - psi(x)) on grids of dimension 1..3.

    Factorizes into per-axis passes; agrees with the direct double-loop
    supremum to floating rounding.  ``out_axes`` may pin the dual grids.
    """
    axes = tuple(np.asarray(a, dtype=float) for a in axes)
    psi = np.asarray(psi, dtype=float)
    n = psi.ndim
    if n != len(axes) or n not in (1, 2, 3):
        raise ArgumentError("legendre_nd supports 1 to 3 axes matching psi.ndim")
    # contract check on the input only: convexity along every axis line
    for ax in range(n):
        moved = np.moveaxis(psi, ax, -1)
        for row in moved.reshape(-1, axes[ax].size):
            if np.isfinite(row).sum() >= 2:
                _validate_convex_1d(axes[ax], row, where=f"axis {ax}")

    work = psi
    dual_axes = []
    for ax in range(n):
        if ax > 0:
            work = np.where(np.isfinite(work), -work, np.inf)
        ys = None if out_axes is None else np.asarray(out_axes[ax], dtype=float)
        ys, work = _llt_along_axis(axes, work, ax, ys=ys, validate=False)
        axes = tuple(ys if k == ax else a for k, a in enumerate(axes))
        dual_axes.append(ys)
    return tuple(dual_axes), work


def brute_legendre_nd(axes, psi, out_axes):
    """Direct O(N*M) supremum, the oracle the fast transform is tested against."""
    axes = tuple(np.asarray(a, dtype=float) for a in axes)
    psi = np.asarray(psi, dtype=float)
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    vals = psi.ravel()
    fin = np.isfinite(vals)
    pts, vals = pts[fin], vals[fin]
    out_mesh = np.meshgrid(*[np.asarray(a, dtype=float) for a in out_axes], indexing="ij")
    Y = np.column_stack([m.ravel() for m in out_mesh])
    res = np.max(Y @ pts.T - vals[None, :], axis=1)
    return res.reshape(tuple(len(a) for a in out_axes))


def polar(f: LogConcaveFunction, z) -> PolarFunction:
    """The polar f^z = exp(-L_z psi); requires z in the interior of supp f."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape != (f.dim,):
        raise ArgumentError("center dimension mismatch")
    if not f.support_contains(z, interior=True):
        raise CenterOutsideError(
            "polar center must lie in the interior of the support; "
            "symmetrize the function first if it does not"
        )
    base = f.polar_base()
    provenance = "grid-llt" if isinstance(f, GridFunction) else "closed-form"
    return PolarFunction(fn=recenter_function(base, z), center=z, provenance=provenance)


def tilt_polar(fpolar: PolarFunction, b) -> PolarFunction:
    """Polar of x -> f(x - b), built from f's origin polar without a re-transform.

    Uses the translation identity for the transform: shifting the primal by b
    multiplies the polar by exp(-<b, y>).
    """
    if np.linalg.norm(fpolar.center) > 0:
        raise ArgumentError("tilt_polar expects a polar built at center 0")
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if np.linalg.norm(b) == 0:
        return fpolar
    return PolarFunction(
        fn=tilt_function(fpolar.fn, b),
        center=fpolar.center,
        provenance=fpolar.provenance,
    )
