"""Centered maximum-determinant inscribed ellipsoid of a symmetric polytope.

For an origin-symmetric P = {x : |<a_i, x>| <= b_i} the largest-determinant
T in S_+ with T B_2^n inside P solves

    max log det X   s.t.  a_i' X a_i <= b_i^2,   X = T^2 positive definite,

a classic max-det program with linear inequalities (||T a_i|| <= b_i since T
is symmetric).  It is solved on a log-barrier path with damped Newton steps;
the returned T = X^{1/2} is the symmetric square root, which fixes the O(n)
gauge freedom of the optimizer deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DegeneracyError, InvariantError
from .geometry import SymmetricPolytope

_FEAS_TOL = 1e-9


@dataclass(frozen=True)
class InscribedEllipsoid:
    """Solution container: T with T B_2^n inside P, plus certificates."""

    T: np.ndarray
    logdet: float
    active_rows: tuple
    kkt_residual: float
    newton_steps: int = 0

    def __post_init__(self):
        self.T.setflags(write=False)
        if abs(self.logdet - float(np.linalg.slogdet(self.T)[1])) > 1e-12 * max(
            1.0, abs(self.logdet)
        ):
            raise InvariantError("logdet field disagrees with det T")

    @property
    def det(self):
        return math.exp(self.logdet)


def _sym_basis(n):
    """Basis E_k of symmetric matrices: diagonals first, then symmetrized pairs."""
    basis = []
    for i in range(n):
        E = np.zeros((n, n))
        E[i, i] = 1.0
        basis.append(E)
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n))
            E[i, j] = E[j, i] = 1.0
            basis.append(E)
    return np.array(basis)


def _pack(X, n):
    out = list(np.diag(X))
    for i in range(n):
        for j in range(i + 1, n):
            out.append(X[i, j])
    return np.array(out)


def _unpack(x, n):
    X = np.zeros((n, n))
    k = n
    X[np.arange(n), np.arange(n)] = x[:n]
    for i in range(n):
        for j in range(i + 1, n):
            X[i, j] = X[j, i] = x[k]
            k += 1
    return X


def centered_mvie(P: SymmetricPolytope, gap_tol=1e-8, max_newton=400) -> InscribedEllipsoid:
    """Barrier-Newton solve of the centered max-det inscribed ellipsoid.

    The barrier weight is halved from 1 down past 1e-10 (further when the
    row count is large) so that the final duality gap m*mu stays below
    ``gap_tol``.  Raises DegeneracyError when P has inradius below 1e-12 and
    ConvergenceError (with the last iterate attached) on a stalled Newton
    loop.
    """
    n = P.dim
    A = P.normals
    b = P.offsets
    m = A.shape[0]
    r0 = P.inradius()
    if r0 < 1e-12:
        raise DegeneracyError("polytope inradius below 1e-12")

    if n == 1:
        r = float(np.min(b / np.abs(A[:, 0])))
        T = np.array([[r]])
        act = tuple(np.where(b - r * np.abs(A[:, 0]) <= 1e-12 * r)[0])
        return InscribedEllipsoid(T, math.log(r), act, 0.0, 0)

    basis = _sym_basis(n)
    M = basis.shape[0]
    # row i of Q maps packed X to a_i' X a_i
    Q = np.empty((m, M))
    for k, E in enumerate(basis):
        Q[:, k] = np.einsum("ij,jk,ik->i", A, E, A)
    b2 = b * b

    x = _pack((0.98 * r0) ** 2 * np.eye(n), n)
    mu = 1.0
    mu_final = max(min(1e-10, 0.1 * gap_tol / m), 1e-13)
    total_newton = 0

    def barrier_value(xv, mu_):
        X = _unpack(xv, n)
        try:
            L = np.linalg.cholesky(X)
        except np.linalg.LinAlgError:
            return math.inf, None, None
        sig = b2 - Q @ xv
        if np.min(sig) <= 0:
            return math.inf, None, None
        val = -2.0 * float(np.sum(np.log(np.diag(L)))) - mu_ * float(np.sum(np.log(sig)))
        return val, X, sig

    while True:
        for _ in range(60):
            val, X, sig = barrier_value(x, mu)
            if X is None:
                raise ConvergenceError("iterate left the feasible region", _unpack(x, n))
            S = np.linalg.inv(X)
            SE = np.einsum("ij,mjk->mik", S, basis)
            grad = -np.einsum("mii->m", SE) + mu * (Q.T @ (1.0 / sig))
            H0 = np.einsum("mik,lki->ml", SE, SE)
            Hb = (Q.T * (mu / sig**2)) @ Q
            H = H0 + Hb
            try:
                dx = -np.linalg.solve(H, grad)
            except np.linalg.LinAlgError:
                dx = -np.linalg.lstsq(H, grad, rcond=None)[0]
            decrement = -float(grad @ dx)
            if decrement < 1e-12:
                break
            step = 1.0
            for _bt in range(60):
                cand, Xc, _ = barrier_value(x + step * dx, mu)
                if Xc is not None and cand <= val - 1e-4 * step * decrement:
                    break
                step *= 0.5
            else:
                break
            x = x + step * dx
            total_newton += 1
            if total_newton > max_newton:
                raise ConvergenceError(
                    "barrier Newton exceeded its iteration budget", _unpack(x, n)
                )
        if mu <= mu_final:
            break
        mu = max(mu * 0.5, mu_final)

    X = _unpack(x, n)
    sig = b2 - Q @ x
    evals, evecs = np.linalg.eigh(X)
    if np.min(evals) <= 0:
        raise DegeneracyError("optimizer lost positive definiteness")
    T = (evecs * np.sqrt(evals)) @ evecs.T
    T = 0.5 * (T + T.T)
    logdet = 0.5 * float(np.sum(np.log(evals)))
    kkt = _kkt_certificate(A, X, sig)
    margins = np.linalg.norm(A @ T, axis=1) - b
    active = tuple(int(i) for i in np.where(margins >= -1e-6 * np.maximum(b, 1e-30))[0])
    if np.max(margins) > _FEAS_TOL * max(1.0, float(np.max(b))):
        raise InvariantError("solution violates feasibility beyond tolerance")
    return InscribedEllipsoid(T, logdet, active, kkt, total_newton)


def _kkt_certificate(A, X, sig):
    """Stationarity + complementarity residual with fitted multipliers.

    Fits lambda >= 0 to X^{-1} = sum lambda_i a_i a_i' in Frobenius norm and
    reports the fit residual (relative) plus the complementarity slack
    sum lambda_i sigma_i, which bounds the log det suboptimality.
    """
    from scipy.optimize import nnls

    n = A.shape[1]
    S = np.linalg.inv(X)
    # Frobenius-isometric encoding of symmetric matrices
    iu = np.triu_indices(n, 1)
    cols = np.concatenate(
        [A**2, math.sqrt(2.0) * A[:, iu[0]] * A[:, iu[1]]], axis=1
    ).T
    target = np.concatenate([np.diag(S), math.sqrt(2.0) * S[iu]])
    lam, _ = nnls(cols, target)
    resid = float(np.linalg.norm(cols @ lam - target) / max(np.linalg.norm(target), 1e-300))
    return float(lam @ sig) + resid


def mvie_certificate(P: SymmetricPolytope, T, perturbation=1e-4, trials=64, seed=0):
    """(feasible, margin, locally_optimal) for a candidate symmetric T.

    margin is max_i(||T a_i|| - b_i); local optimality means no random
    symmetric perturbation of the given magnitude both stays feasible and
    improves log det.
    """
    T = np.asarray(T, dtype=float)
    n = P.dim
    margins = np.linalg.norm(P.normals @ T, axis=1) - P.offsets
    margin = float(np.max(margins))
    feasible = margin <= _FEAS_TOL
    if not feasible:
        return False, margin, False
    sign, logdet = np.linalg.slogdet(T)
    if sign <= 0:
        return feasible, margin, False
    rng = np.random.default_rng(seed)
    scale = perturbation * max(1.0, float(np.linalg.norm(T)))
    locally_optimal = True
    for _ in range(trials):
        D = rng.standard_normal((n, n))
        D = 0.5 * (D + D.T)
        D *= scale / max(np.linalg.norm(D), 1e-300)
        Tp = T + D
        s2, ld2 = np.linalg.slogdet(Tp)
        if s2 <= 0:
            continue
        if float(np.max(np.linalg.norm(P.normals @ Tp, axis=1) - P.offsets)) <= 0.0 and ld2 > logdet + 1e-9:
            locally_optimal = False
            break
    return feasible, margin, locally_optimal
