"""Off-sample reconstruction of a point-integral solution and its ambient gradient.

    I(x) = [sum_j R_t(x,p_j) u_j V_j + t sum_j Rbar_t(x,p_j) f_j V_j
            + 2t sum_{s_j} Rbar_t(x,s_j) b_j A_j] / sum_j R_t(x,p_j) V_j

Evaluated at a sample point this returns the nodal value whenever ``u``
solves the discrete system, which is what ties the formula to that system.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernel import KernelSpec, eval_bar, eval_profile, eval_profile_derivative
from .pointcloud import NeighborGrid, PointCloud, build_grid


class OutOfReachError(ValueError):
    """No sample lies within the kernel support of the evaluation point."""


@dataclass(eq=False)
class PimSolution:
    cloud: PointCloud
    spec: KernelSpec
    u: np.ndarray
    f_vals: np.ndarray
    b_vals: np.ndarray
    _grid: NeighborGrid | None = field(default=None, repr=False)

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.f_vals = np.asarray(self.f_vals, dtype=float)
        self.b_vals = np.asarray(self.b_vals, dtype=float)
        n, m = self.cloud.n, self.cloud.m
        if self.u.shape != (n,) or self.f_vals.shape != (n,) or self.b_vals.shape != (m,):
            raise ValueError("u, f_vals must have length n and b_vals length m")

    @property
    def grid(self) -> NeighborGrid:
        if self._grid is None:
            self._grid = build_grid(self.cloud, self.spec.radius)
        return self._grid

    def _point_sources(self):
        """Per-sample coefficients of R_t and Rbar_t in the numerator."""
        V = self.cloud.volume_weights
        bsrc = np.zeros(self.cloud.n)
        bsrc[self.cloud.boundary_indices] = self.b_vals * self.cloud.area_weights
        t = self.spec.t
        return self.u * V, t * (self.f_vals * V + 2.0 * bsrc)


def evaluate(sol: PimSolution, X, gradient: bool = False):
    """Vectorized evaluation at the rows of ``X``.

    Returns ``(values, reachable)`` or ``(values, grads, reachable)``; entries for
    unreachable points are NaN.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    spec, cloud = sol.spec, sol.cloud
    q, j = sol.grid.query_pairs(X, spec.radius)
    diff = X[q] - cloud.points[j]
    r = np.sum(diff * diff, axis=1) / (4.0 * spec.t)
    R = spec.c_t * eval_profile(spec, r)
    Rbar = spec.c_t * eval_bar(spec, r)
    cu, cbar = sol._point_sources()
    V = cloud.volume_weights
    nq = X.shape[0]
    num = np.bincount(q, R * cu[j] + Rbar * cbar[j], minlength=nq)
    den = np.bincount(q, R * V[j], minlength=nq)
    reach = den > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        val = np.where(reach, num / np.where(reach, den, 1.0), np.nan)
    if not gradient:
        return val, reach
    # d/dx R(|x-p|^2/4t) = R'(r) (x-p)/2t ; d/dx Rbar(...) = -R(r) (x-p)/2t
    dR = (spec.c_t * eval_profile_derivative(spec, r) / (2.0 * spec.t))[:, None] * diff
    dRbar = -(R / (2.0 * spec.t))[:, None] * diff
    d = X.shape[1]
    gnum = np.zeros((nq, d))
    gden = np.zeros((nq, d))
    for a in range(d):
        gnum[:, a] = np.bincount(q, dR[:, a] * cu[j] + dRbar[:, a] * cbar[j], minlength=nq)
        gden[:, a] = np.bincount(q, dR[:, a] * V[j], minlength=nq)
    with np.errstate(invalid="ignore", divide="ignore"):
        safe = np.where(reach, den, 1.0)[:, None]
        grad = (gnum - val[:, None] * gden) / safe
    grad[~reach] = np.nan
    return val, grad, reach


def interpolate(sol: PimSolution, x):
    """Reconstruction at one point (scalar) or several (array); raises if out of reach."""
    x = np.asarray(x, dtype=float)
    val, reach = evaluate(sol, x)
    if not np.all(reach):
        raise OutOfReachError(f"{int(np.sum(~reach))} point(s) have no sample within 2*sqrt(t)")
    return float(val[0]) if x.ndim == 1 else val


def interpolate_gradient(sol: PimSolution, x):
    """Ambient gradient of the reconstruction; shape ``(d,)`` or ``(q, d)``."""
    x = np.asarray(x, dtype=float)
    _, grad, reach = evaluate(sol, x, gradient=True)
    if not np.all(reach):
        raise OutOfReachError(f"{int(np.sum(~reach))} point(s) have no sample within 2*sqrt(t)")
    return grad[0] if x.ndim == 1 else grad
