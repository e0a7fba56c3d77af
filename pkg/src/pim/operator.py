"""Sparse assembly of the discrete integral Laplacian and the point-integral load vector.

Sign conventions follow the Poisson problem ``-Lap u = f`` with ``du/dn = b``:
the discrete system is ``-L u = rhs`` with

    (L u)_i = 1/t sum_j R_t(p_i, p_j) (u_i - u_j) V_j
    rhs_i   = -sum_j Rbar_t(p_i, p_j) f_j V_j - 2 sum_{s_j} Rbar_t(p_i, s_j) b_j A_j
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .kernel import KernelSpec, eval_bar, eval_profile
from .pointcloud import PointCloud, build_grid


@dataclass(frozen=True)
class KernelPairs:
    """All pairs within the kernel support, sorted by (row, col), self pairs included."""

    rows: np.ndarray
    cols: np.ndarray
    r_t: np.ndarray
    rbar_t: np.ndarray


def kernel_pairs(cloud: PointCloud, spec: KernelSpec) -> KernelPairs:
    grid = build_grid(cloud, spec.radius)
    rows, cols = grid.query_pairs(cloud.points, spec.radius)
    diff = cloud.points[rows] - cloud.points[cols]
    r = np.sum(diff * diff, axis=1) / (4.0 * spec.t)
    return KernelPairs(rows, cols, spec.c_t * eval_profile(spec, r), spec.c_t * eval_bar(spec, r))


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Row-wise storage of ``L``: off-diagonal weights ``w_ij = R_t V_j / t`` and row sums."""

    n: int
    t: float
    weights: sp.csr_matrix  # w_ij, self pair included
    row_sums: np.ndarray

    def to_dense(self) -> np.ndarray:
        return np.diag(self.row_sums) - self.weights.toarray()

    def dump(self, path) -> None:
        """Write ``i j w_ij`` lines (0-based, ascending) for inspection."""
        coo = self.weights.tocoo()
        lines = [f"%% n={self.n} t={self.t!r}"]
        lines += [f"{i} {j} {w:.17g}" for i, j, w in zip(coo.row, coo.col, coo.data)]
        Path(path).write_text("\n".join(lines) + "\n")


def assemble_laplacian(cloud: PointCloud, spec: KernelSpec, pairs: KernelPairs | None = None):
    pairs = pairs or kernel_pairs(cloud, spec)
    w = pairs.r_t * cloud.volume_weights[pairs.cols] / spec.t
    # rows/cols already sorted, so CSR data keeps ascending-j order
    W = sp.csr_matrix((w, (pairs.rows, pairs.cols)), shape=(cloud.n, cloud.n))
    W.sort_indices()
    return DiscreteOperator(cloud.n, spec.t, W, np.asarray(W.sum(axis=1)).ravel())


def apply(op: DiscreteOperator, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (op.n,):
        raise ValueError(f"vector of length {u.shape} does not match operator size {op.n}")
    return op.row_sums * u - op.weights @ u


def assemble_rhs(cloud: PointCloud, spec: KernelSpec, f_vals, b_vals,
                 pairs: KernelPairs | None = None) -> np.ndarray:
    f_vals = np.asarray(f_vals, dtype=float)
    b_vals = np.asarray(b_vals, dtype=float)
    if f_vals.shape != (cloud.n,):
        raise ValueError(f"f has length {f_vals.shape}, cloud has {cloud.n} points")
    if b_vals.shape != (cloud.m,):
        raise ValueError(f"b has length {b_vals.shape}, cloud has {cloud.m} boundary points")
    pairs = pairs or kernel_pairs(cloud, spec)
    # boundary samples are points of the cloud, so one pair list serves both sums
    load = f_vals * cloud.volume_weights
    bload = np.zeros(cloud.n)
    bload[cloud.boundary_indices] = b_vals * cloud.area_weights
    src = load + 2.0 * bload
    Rbar = sp.csr_matrix((pairs.rbar_t, (pairs.rows, pairs.cols)), shape=(cloud.n, cloud.n))
    return -(Rbar @ src)


def quadratic_form(op: DiscreteOperator, cloud: PointCloud, u) -> float:
    """``<u, L u>_V = sum_i u_i (L u)_i V_i``."""
    u = np.asarray(u, dtype=float)
    return float(np.sum(u * apply(op, u) * cloud.volume_weights))


def dirichlet_energy(cloud: PointCloud, spec: KernelSpec, u, pairs: KernelPairs | None = None):
    """Pairwise form ``1/(2t) sum_ij R_t(p_i, p_j) (u_i - u_j)^2 V_i V_j``."""
    u = np.asarray(u, dtype=float)
    pairs = pairs or kernel_pairs(cloud, spec)
    V = cloud.volume_weights
    du = u[pairs.rows] - u[pairs.cols]
    return float(np.sum(pairs.r_t * du * du * V[pairs.rows] * V[pairs.cols]) / (2.0 * spec.t))


def smooth(cloud: PointCloud, spec: KernelSpec, u, pairs: KernelPairs | None = None):
    """Kernel-weighted average ``v_i = sum_j R_t u_j V_j / sum_j R_t V_j``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (cloud.n,):
        raise ValueError(f"vector of length {u.shape} does not match cloud size {cloud.n}")
    pairs = pairs or kernel_pairs(cloud, spec)
    K = sp.csr_matrix((pairs.r_t * cloud.volume_weights[pairs.cols], (pairs.rows, pairs.cols)),
                      shape=(cloud.n, cloud.n))
    return (K @ u) / np.asarray(K.sum(axis=1)).ravel()
