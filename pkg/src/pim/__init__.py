"""Point integral method for the Neumann Poisson problem on point clouds."""

from .interpolant import PimSolution, interpolate, interpolate_gradient
from .kernel import KernelSpec, eval_bar, eval_profile, eval_profile_derivative, pair_kernel
from .manifolds import get_case, error_norms, eval_exact
from .operator import (apply, assemble_laplacian, assemble_rhs, dirichlet_energy,
                       quadratic_form, smooth)
from .pointcloud import PointCloud, build_grid, load_cloud, neighbors, save_cloud
from .solver import SolveReport, solve

__all__ = [
    "KernelSpec", "PimSolution", "PointCloud", "SolveReport", "apply", "assemble_laplacian",
    "assemble_rhs", "build_grid", "dirichlet_energy", "error_norms", "eval_bar", "eval_exact",
    "eval_profile", "eval_profile_derivative", "get_case", "interpolate", "interpolate_gradient",
    "load_cloud", "neighbors", "pair_kernel", "quadratic_form", "save_cloud", "smooth", "solve",
]
