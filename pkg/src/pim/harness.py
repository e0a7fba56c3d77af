"""Single solves, (n, t) convergence sweeps and log-log rate fitting."""

from __future__ import annotations

import csv
import io
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import Sequence

import numpy as np

from .interpolant import PimSolution
from .kernel import PROFILES, KernelSpec
from .manifolds import ManifoldCase, SampledCloud, error_norms, eval_exact, get_case
from .operator import assemble_laplacian, assemble_rhs, kernel_pairs
from .pointcloud import estimate_weights_tangent_voronoi, estimate_weights_uniform
from .solver import solve

log = logging.getLogger(__name__)

WEIGHT_SOURCES = ("exact", "uniform", "voronoi")
CSV_HEADER = ["case", "n", "h", "t", "linf", "l2", "h1", "iters", "residual", "converged",
              "skipped", "wall_ms"]

# named couplings t = c * h^alpha; "theory" balances t^(1/2) against h / t^(3/2)
PRESETS = {"empirical": (2.0, 1.0), "theory": (0.1, 0.5)}


@dataclass(frozen=True)
class TRule:
    """Either a fixed bandwidth or the coupling ``t = c * h^alpha``."""

    fixed: float | None = None
    c: float = 2.0
    alpha: float = 1.0
    name: str = "empirical"

    def __post_init__(self):
        if self.fixed is not None and not self.fixed > 0:
            raise ValueError("fixed bandwidth must be positive")
        if not self.c > 0 or not 0 < self.alpha <= 2:
            raise ValueError("coupling needs c > 0 and alpha in (0, 2]")

    @classmethod
    def parse(cls, text: str) -> "TRule":
        if text in PRESETS:
            c, alpha = PRESETS[text]
            return cls(None, c, alpha, text)
        if "," in text:
            c, alpha = (float(x) for x in text.split(","))
            return cls(None, c, alpha, f"{c:g},{alpha:g}")
        return cls(float(text), name=f"fixed={text}")

    def __call__(self, h: float) -> float:
        if self.fixed is not None:
            return self.fixed
        return self.c * h ** self.alpha


@dataclass(frozen=True)
class RunConfig:
    case: str = "interval"
    n: Sequence[int] = (100,)
    t_rule: TRule = field(default_factory=TRule)
    kernel: str = "wendland_c2"
    mode: str = "grid"
    seed: int = 0
    tol: float = 1e-10
    max_iter: int | None = None
    weights: str = "exact"
    n_eval: int | None = None  # default 4 n
    k_nn: int = 8
    jacobi: bool = False
    out: str | None = None

    def __post_init__(self):
        get_case(self.case)
        if self.kernel not in PROFILES:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.weights not in WEIGHT_SOURCES:
            raise ValueError(f"weights must be one of {WEIGHT_SOURCES}")
        if any(int(v) <= 0 for v in self.n) or not self.tol > 0:
            raise ValueError("n values and tol must be positive")
        if self.n_eval is not None and self.n_eval <= 0:
            raise ValueError("n_eval must be positive")


@dataclass
class ResultRow:
    case: str
    n: int
    h: float
    t: float
    linf: float
    l2: float
    h1: float
    iters: int
    residual: float
    converged: bool
    skipped: int
    wall_ms: float


def _weights(case: ManifoldCase, cloud: SampledCloud, source: str, k_nn: int):
    if source == "exact":
        return cloud.volume_weights, cloud.area_weights
    if source == "uniform":
        V = estimate_weights_uniform(cloud.n, case.volume)
        A = estimate_weights_uniform(cloud.m, case.boundary_measure) if cloud.m else cloud.area_weights
        return V, A
    est = estimate_weights_tangent_voronoi(cloud.points, cloud.k, k_nn)
    if est.failed.any():
        raise RuntimeError(f"Voronoi weights failed at {int(est.failed.sum())} points")
    if cloud.m == 0:
        A = cloud.area_weights
    elif cloud.k == 1:
        A = np.ones(cloud.m)  # zero-dimensional boundary: counting measure
    else:
        best = estimate_weights_tangent_voronoi(cloud.boundary_points, cloud.k - 1, k_nn)
        if best.failed.any():
            raise RuntimeError(f"boundary Voronoi weights failed at {int(best.failed.sum())} points")
        A = best.weights
    return est.weights, A


def run_case(config: RunConfig, n: int | None = None, return_solution: bool = False):
    """sample -> weights -> assemble -> solve -> reconstruct -> error norms."""
    start = time.perf_counter()
    n = int(config.n[0] if n is None else n)
    case = get_case(config.case)
    cloud = case.sample(n, config.mode, config.seed)
    V, A = _weights(case, cloud, config.weights, config.k_nn)
    if config.weights != "exact":
        cloud = replace(cloud, volume_weights=V, area_weights=A)
    t = config.t_rule(cloud.h)
    spec = KernelSpec(config.kernel, t, case.k)
    pairs = kernel_pairs(cloud, spec)
    op = assemble_laplacian(cloud, spec, pairs)
    _, f, b = eval_exact(case, cloud)
    rhs = assemble_rhs(cloud, spec, f, b, pairs)
    u, report = solve(op, rhs, cloud.volume_weights, config.tol, config.max_iter, config.jacobi)
    if not report.converged:
        log.warning("%s n=%d: solver did not converge", config.case, cloud.n)
    sol = PimSolution(cloud, spec, u, f, b)
    norms = error_norms(case, sol, config.n_eval or 4 * cloud.n)
    row = ResultRow(config.case, cloud.n, cloud.h, t, norms.linf, norms.l2, norms.h1,
                    report.iterations, report.final_relative_residual, report.converged,
                    norms.skipped, 1e3 * (time.perf_counter() - start))
    return (row, sol) if return_solution else row


def fit_slope(pairs) -> float:
    """Least-squares slope of log(error) against log(h)."""
    arr = np.asarray(list(pairs), dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise ValueError("need at least two (h, error) pairs")
    if not np.all(arr > 0):
        raise ValueError("h and error values must be positive")
    return float(np.polyfit(np.log(arr[:, 0]), np.log(arr[:, 1]), 1)[0])


def sweep(config: RunConfig, jobs: int = 1):
    """Run every ``n`` in the config; returns ``(rows, slopes)`` with slopes per norm."""
    if len(config.n) < 3:
        raise ValueError("a sweep needs at least three n values")
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            rows = list(pool.map(lambda n: run_case(config, n), config.n))
    else:
        rows = [run_case(config, n) for n in config.n]
    ok = [r for r in rows if r.converged]
    slopes = {}
    for norm in ("linf", "l2", "h1"):
        pts = [(r.h, getattr(r, norm)) for r in ok if getattr(r, norm) > 0]
        slopes[norm] = fit_slope(pts) if len(pts) >= 2 else float("nan")
    return rows, slopes


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    names = [f.name for f in fields(ResultRow)]
    assert names == CSV_HEADER
    for r in rows:
        writer.writerow([_fmt(getattr(r, name)) for name in names])
    return buf.getvalue()


def write_csv(rows: Sequence[ResultRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))
