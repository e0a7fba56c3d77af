"""Projected conjugate gradients for the singular pure-Neumann system ``-L u = rhs``.

``D_V L`` is symmetric positive semidefinite with the constants as null space.
The right-hand side is made compatible by removing its V-weighted mean and the
iterate is kept V-mean-zero, which picks the solution with ``sum u_i V_i = 0``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .operator import DiscreteOperator, apply

log = logging.getLogger(__name__)


@dataclass
class SolveReport:
    iterations: int
    final_relative_residual: float
    constraint_residual: float
    converged: bool
    discarded_mean: float = 0.0


def project_mean_zero(u, V) -> np.ndarray:
    """Remove the V-weighted mean."""
    u = np.asarray(u, dtype=float)
    return u - np.dot(u, V) / np.sum(V)


def solve(op: DiscreteOperator, rhs, V, tol: float = 1e-10, max_iter: int | None = None,
          jacobi: bool = False):
    """Solve ``-L u = rhs`` subject to ``sum u_i V_i = 0``.

    Returns ``(u, SolveReport)``.  On hitting ``max_iter`` the best iterate is
    returned with ``converged=False``.  Non-finite values raise
    ``FloatingPointError``.
    """
    rhs = np.asarray(rhs, dtype=float)
    V = np.asarray(V, dtype=float)
    n = op.n
    if rhs.shape != (n,) or V.shape != (n,):
        raise ValueError(f"rhs {rhs.shape} and weights {V.shape} must both have length {n}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not np.all(np.isfinite(rhs)):
        raise FloatingPointError("non-finite entries in rhs")
    max_iter = 10 * n if max_iter is None else max_iter

    mean = np.dot(rhs, V) / np.sum(V)
    rhs_p = rhs - mean
    b = -V * rhs_p
    bnorm = np.linalg.norm(b)
    u = np.zeros(n)

    def A(x):
        return V * apply(op, x)

    def report(it, res, conv):
        cres = abs(np.dot(u, V)) / np.sum(V)
        return SolveReport(it, res, cres, conv, abs(mean))

    # a pure constant rhs leaves only round-off after projection
    if bnorm <= 64 * np.finfo(float).eps * np.linalg.norm(V * rhs):
        return u, report(0, 0.0, True)

    if jacobi:
        diag = V * (op.row_sums - op.weights.diagonal())
        minv = np.where(diag > 0, 1.0 / np.where(diag > 0, diag, 1.0), 1.0)
    else:
        minv = None

    r = b.copy()
    z = r * minv if jacobi else r
    p = z.copy()
    rz = np.dot(r, z)
    best_u, best_res = u.copy(), 1.0
    it = 0
    while it < max_iter:
        Ap = A(p)
        pAp = np.dot(p, Ap)
        if not np.isfinite(pAp):
            raise FloatingPointError(f"non-finite value in CG at iteration {it}")
        if pAp <= 0:
            break
        alpha = rz / pAp
        u = project_mean_zero(u + alpha * p, V)
        r = r - alpha * Ap
        it += 1
        res = np.linalg.norm(r) / bnorm
        if res <= tol:
            # confirm against the true residual; restart from it otherwise
            r = b - A(u)
            res = np.linalg.norm(r) / bnorm
            if res <= tol:
                return u, report(it, res, True)
            z = r * minv if jacobi else r
            p = z.copy()
            rz = np.dot(r, z)
            continue
        if res < best_res:
            best_u, best_res = u.copy(), res
        z = r * minv if jacobi else r
        rz_new = np.dot(r, z)
        p = z + (rz_new / rz) * p
        rz = rz_new

    u = best_u
    res = np.linalg.norm(b - A(u)) / bnorm
    log.warning("CG stopped after %d iterations at relative residual %.3e", it, res)
    return u, report(it, res, res <= tol)
