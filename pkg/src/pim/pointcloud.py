"""Point-cloud data model, fixed-radius neighbor search and quadrature weights."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Samples ``points`` of a k-manifold with volume weights and a boundary subset.

    ``boundary_indices`` index into ``points``; ``area_weights`` are aligned
    with ``boundary_indices``.
    """

    points: np.ndarray
    k: int
    volume_weights: np.ndarray
    boundary_indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    area_weights: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        V = np.asarray(self.volume_weights, dtype=float).reshape(-1)
        bidx = np.asarray(self.boundary_indices, dtype=np.int64).reshape(-1)
        A = np.asarray(self.area_weights, dtype=float).reshape(-1)
        n, d = pts.shape
        if n < 1:
            raise ValueError("point cloud must contain at least one point")
        if not 1 <= self.k <= d:
            raise ValueError(f"intrinsic dimension k={self.k} must lie in [1, d={d}]")
        if V.shape != (n,):
            raise ValueError(f"expected {n} volume weights, got {V.shape[0]}")
        if A.shape != bidx.shape:
            raise ValueError(f"{bidx.size} boundary indices but {A.size} area weights")
        if bidx.size and (bidx.min() < 0 or bidx.max() >= n):
            raise ValueError("boundary index out of range")
        if np.unique(bidx).size != bidx.size:
            raise ValueError("boundary indices must be distinct")
        if not np.all(V > 0):
            raise ValueError(f"volume weights must be positive (row {int(np.argmin(V > 0))})")
        if A.size and not np.all(A > 0):
            raise ValueError(f"area weights must be positive (row {int(np.argmin(A > 0))})")
        for name, arr in (("points", pts), ("volume_weights", V), ("boundary_indices", bidx),
                          ("area_weights", A)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def m(self) -> int:
        return self.boundary_indices.size

    @property
    def boundary_points(self) -> np.ndarray:
        return self.points[self.boundary_indices]


class NeighborGrid:
    """Uniform spatial hash over a cloud; cells have edge length ``cell_size``.

    Queries with radius up to ``cell_size`` only touch the 3^d cells around
    the query point and return exact answers.
    """

    def __init__(self, cloud: PointCloud, cell_size: float):
        self.cloud = cloud
        self.cell_size = float(cell_size)
        keys = np.floor(cloud.points / self.cell_size).astype(np.int64)
        order = np.lexsort(keys.T[::-1])
        sorted_keys = keys[order]
        breaks = np.flatnonzero(np.any(np.diff(sorted_keys, axis=0) != 0, axis=1)) + 1
        starts = np.concatenate([[0], breaks])
        stops = np.concatenate([breaks, [len(order)]])
        self.buckets: dict[tuple, np.ndarray] = {
            tuple(sorted_keys[a]): np.sort(order[a:b]) for a, b in zip(starts, stops)
        }
        self._offsets = list(itertools.product((-1, 0, 1), repeat=cloud.d))

    def _candidates(self, key) -> np.ndarray:
        found = [self.buckets.get(tuple(k + o for k, o in zip(key, off))) for off in self._offsets]
        found = [f for f in found if f is not None]
        if not found:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate(found)

    def query_pairs(self, queries, radius: float):
        """All pairs ``(q, j)`` with ``|queries[q] - p_j| <= radius``.

        Returned as two index arrays sorted by ``q`` then ``j``.
        """
        if radius > self.cell_size:
            raise ValueError(
                f"query radius {radius} exceeds grid cell size {self.cell_size}; rebuild the grid"
            )
        X = np.asarray(queries, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.cloud.d:
            raise ValueError(f"query dimension {X.shape[1]} != cloud dimension {self.cloud.d}")
        pts = self.cloud.points
        r2 = radius * radius
        qkeys = np.floor(X / self.cell_size).astype(np.int64)
        order = np.lexsort(qkeys.T[::-1])
        skeys = qkeys[order]
        breaks = np.flatnonzero(np.any(np.diff(skeys, axis=0) != 0, axis=1)) + 1
        rows, cols = [], []
        for a, b in zip(np.concatenate([[0], breaks]), np.concatenate([breaks, [len(order)]])):
            cand = self._candidates(tuple(skeys[a]))
            if cand.size == 0:
                continue
            qi = order[a:b]
            d2 = np.sum((X[qi, None, :] - pts[None, cand, :]) ** 2, axis=-1)
            ii, jj = np.nonzero(d2 <= r2)
            rows.append(qi[ii])
            cols.append(cand[jj])
        if not rows:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy()
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        srt = np.lexsort((cols, rows))
        return rows[srt], cols[srt]


def build_grid(cloud: PointCloud, radius: float) -> NeighborGrid:
    if not radius > 0:
        raise ValueError(f"grid radius must be positive, got {radius}")
    return NeighborGrid(cloud, radius)


def neighbors(grid: NeighborGrid, x, radius: float) -> np.ndarray:
    """Indices ``j`` with ``|x - p_j| <= radius`` in ascending order."""
    _, cols = grid.query_pairs(np.asarray(x, dtype=float)[None, :], radius)
    return cols


def estimate_weights_uniform(n: int, total_volume: float) -> np.ndarray:
    if n < 1 or not total_volume > 0:
        raise ValueError("need n >= 1 and a positive total volume")
    return np.full(n, total_volume / n)


class VoronoiWeights(NamedTuple):
    weights: np.ndarray  # NaN where failed
    failed: np.ndarray  # bool mask of degenerate neighborhoods


def _knn(points: np.ndarray, k_nn: int, chunk: int = 512):
    # brute force; k_nn neighbors excluding the point itself
    n = points.shape[0]
    idx = np.empty((n, k_nn), dtype=np.int64)
    for a in range(0, n, chunk):
        block = points[a:a + chunk]
        d2 = np.sum((block[:, None, :] - points[None, :, :]) ** 2, axis=-1)
        d2[np.arange(block.shape[0]), np.arange(a, a + block.shape[0])] = np.inf
        part = np.argpartition(d2, k_nn - 1, axis=1)[:, :k_nn]
        pd = np.take_along_axis(d2, part, axis=1)
        idx[a:a + chunk] = np.take_along_axis(part, np.argsort(pd, axis=1, kind="stable"), axis=1)
    return idx


def _clip_halfplane(poly: np.ndarray, normal: np.ndarray, offset: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon to ``normal . x <= offset``."""
    if len(poly) == 0:
        return poly
    out = []
    vals = poly @ normal - offset
    for i in range(len(poly)):
        a, b = poly[i], poly[(i + 1) % len(poly)]
        va, vb = vals[i], vals[(i + 1) % len(poly)]
        if va <= 0:
            out.append(a)
        if (va < 0 < vb) or (vb < 0 < va):
            out.append(a + (b - a) * (va / (va - vb)))
    return np.array(out)


def _disk_triangle_area(a: np.ndarray, b: np.ndarray, rho: float) -> float:
    """Signed area of (disk of radius rho at the origin) intersected with triangle (0, a, b)."""
    cross = a[0] * b[1] - a[1] * b[0]
    if abs(cross) < 1e-300:
        return 0.0
    sign = 1.0 if cross > 0 else -1.0
    # points where segment a->b meets the circle, as parameters in (0, 1)
    d = b - a
    qa, qb, qc = d @ d, 2 * (a @ d), a @ a - rho * rho
    disc = qb * qb - 4 * qa * qc
    pts = [a]
    if disc > 0:
        sq = np.sqrt(disc)
        for s in sorted(((-qb - sq) / (2 * qa), (-qb + sq) / (2 * qa))):
            if 0 < s < 1:
                pts.append(a + s * d)
    pts.append(b)
    area = 0.0
    for p, q in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (p + q)
        if mid @ mid <= rho * rho:
            area += 0.5 * abs(p[0] * q[1] - p[1] * q[0])
        else:
            ang = np.arctan2(abs(p[0] * q[1] - p[1] * q[0]), p @ q)
            area += 0.5 * rho * rho * ang
    return sign * area


def _voronoi_measure(local: np.ndarray, rho: float) -> float:
    """Measure of the origin's Voronoi cell among ``local`` (k = 1 or 2), clipped to radius rho."""
    k = local.shape[1]
    if k == 1:
        x = local[:, 0]
        right = x[x > 0]
        left = x[x < 0]
        hi = min(rho, right.min() / 2) if right.size else rho
        lo = max(-rho, left.max() / 2) if left.size else -rho
        return hi - lo
    box = rho * np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
    poly = box
    for q in local:
        qq = q @ q
        if qq == 0:
            continue
        poly = _clip_halfplane(poly, q, qq / 2)
    if len(poly) < 3:
        return 0.0
    return abs(sum(_disk_triangle_area(poly[i], poly[(i + 1) % len(poly)], rho)
                   for i in range(len(poly))))


def estimate_weights_tangent_voronoi(points, k: int, k_nn: int = 8) -> VoronoiWeights:
    """Per-point weights from Voronoi cells in a PCA tangent plane.

    For each point the ``k_nn`` nearest neighbors are centered at the point,
    a tangent k-plane is fitted by principal components, and the measure of the
    point's Voronoi cell in that plane, clipped to a ball of radius half the
    ``k_nn``-th neighbor distance, is the weight.  Supports k = 1 and k = 2.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    if k not in (1, 2):
        raise NotImplementedError("tangent Voronoi weights are implemented for k = 1 and k = 2")
    if k_nn < k + 2:
        raise ValueError(f"k_nn must be at least k + 2 = {k + 2}")
    if n < k_nn + 1:
        raise ValueError(f"need at least k_nn + 1 = {k_nn + 1} points, got {n}")
    nbr = _knn(pts, k_nn)
    weights = np.full(n, np.nan)
    failed = np.zeros(n, dtype=bool)
    for i in range(n):
        local = pts[nbr[i]] - pts[i]
        sv, basis = np.linalg.svd(local, full_matrices=False)[1:]
        if np.sum(sv > 1e-12 * max(sv[0], 1e-300)) < k:
            failed[i] = True
            continue
        coords = local @ basis[:k].T
        rho = 0.5 * np.linalg.norm(local[-1])
        w = _voronoi_measure(coords, rho)
        if w > 0:
            weights[i] = w
        else:
            failed[i] = True
    return VoronoiWeights(weights, failed)


# ---- CSV file format ------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_cloud(cloud: PointCloud, path) -> None:
    lines = [f"# d={cloud.d} k={cloud.k} n={cloud.n} m={cloud.m}"]
    for p, v in zip(cloud.points, cloud.volume_weights):
        lines.append(",".join([_fmt(c) for c in p] + [_fmt(v)]))
    for i, a in zip(cloud.boundary_indices, cloud.area_weights):
        lines.append(f"{int(i)},{_fmt(a)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


class CloudFormatError(ValueError):
    pass


def load_cloud(path) -> PointCloud:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or not text[0].startswith("#"):
        raise CloudFormatError("line 1: missing '# d=.. k=.. n=.. m=..' header")
    try:
        header = dict(tok.split("=") for tok in text[0][1:].split())
        d, k, n, m = (int(header[key]) for key in ("d", "k", "n", "m"))
    except (KeyError, ValueError) as exc:
        raise CloudFormatError(f"line 1: malformed header {text[0]!r}") from exc
    body = [ln for ln in text[1:]]
    if len(body) < n + m:
        raise CloudFormatError(f"expected {n + m} data rows, found {len(body)}")
    points = np.empty((n, d))
    V = np.empty(n)
    for r in range(n):
        lineno = r + 2
        fields = body[r].split(",")
        if len(fields) != d + 1:
            raise CloudFormatError(f"line {lineno}: expected {d} coordinates and a weight, "
                                   f"got {len(fields)} fields")
        try:
            vals = [float(f) for f in fields]
        except ValueError as exc:
            raise CloudFormatError(f"line {lineno}: {exc}") from exc
        if not vals[-1] > 0:
            raise CloudFormatError(f"line {lineno}: volume weight must be positive")
        points[r] = vals[:d]
        V[r] = vals[-1]
    bidx = np.empty(m, dtype=np.int64)
    A = np.empty(m)
    for r in range(m):
        lineno = n + r + 2
        fields = body[n + r].split(",")
        if len(fields) != 2:
            raise CloudFormatError(f"line {lineno}: expected 'index,A'")
        try:
            bidx[r] = int(fields[0])
            A[r] = float(fields[1])
        except ValueError as exc:
            raise CloudFormatError(f"line {lineno}: {exc}") from exc
        if not A[r] > 0:
            raise CloudFormatError(f"line {lineno}: area weight must be positive")
        if not 0 <= bidx[r] < n:
            raise CloudFormatError(f"line {lineno}: boundary index {bidx[r]} out of range")
    if any(ln.strip() for ln in body[n + m:]):
        raise CloudFormatError(f"line {n + m + 2}: unexpected trailing data")
    return PointCloud(points, k, V, bidx, A)
