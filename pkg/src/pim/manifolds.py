"""Analytic test manifolds with exact Neumann solutions and quadrature.

Each case provides ``u`` with zero mean, ``f = -Lap u`` and ``b = du/dn``.

    interval  [0, 1]         u = cos(pi x)       f = pi^2 cos(pi x)  b = 0
    circle    |p| = 1 in R^2 u = cos(theta)      f = cos(theta)      closed
    sphere    |p| = 1 in R^3 u = z               f = 2 z             closed
    disk      |p| <= 1       u = x^2 - y^2       f = 0               b = 2 (x^2 - y^2)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .interpolant import PimSolution, evaluate
from .pointcloud import PointCloud

MODES = ("grid", "random")


@dataclass(frozen=True, eq=False)
class SampledCloud(PointCloud):
    """A cloud drawn from a test case, carrying its spacing surrogate ``h``."""

    h: float = float("nan")
    h_mc: float = float("nan")
    mode: str = "grid"


class ManifoldCase:
    name: str
    k: int
    d: int
    volume: float
    boundary_measure: float

    def sample(self, n: int, mode: str = "grid", seed: int = 0) -> SampledCloud:
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if n < 4:
            raise ValueError(f"{self.name}: need at least 4 points, got {n}")
        if mode == "grid":
            pts, V, bidx, A, h = self._grid(n)
            h_mc = float("nan")
        else:
            rng = np.random.default_rng(seed)
            pts, bidx = self._random(n, rng)
            V = np.full(len(pts), self.volume / len(pts))
            A = np.full(len(bidx), self.boundary_measure / max(len(bidx), 1))
            h = self.volume ** (1.0 / self.k) * len(pts) ** (-1.0 / self.k)
            h_mc = len(pts) ** -0.5
        return SampledCloud(pts, self.k, V, np.asarray(bidx, dtype=np.int64), A,
                            h=float(h), h_mc=h_mc, mode=mode)

    # closed-form fields, vectorized over rows of X
    def u(self, X): raise NotImplementedError
    def f(self, X): raise NotImplementedError
    def b(self, X): return np.zeros(len(X))
    def grad_u(self, X): raise NotImplementedError
    def tangent_basis(self, X): raise NotImplementedError

    def _grid(self, n): raise NotImplementedError
    def _random(self, n, rng): raise NotImplementedError


class Interval(ManifoldCase):
    name, k, d = "interval", 1, 1
    volume = 1.0
    boundary_measure = 2.0  # counting measure of {0, 1}

    def u(self, X): return np.cos(np.pi * X[:, 0])
    def f(self, X): return np.pi ** 2 * np.cos(np.pi * X[:, 0])
    def grad_u(self, X): return (-np.pi * np.sin(np.pi * X[:, 0]))[:, None]
    def tangent_basis(self, X): return np.ones((len(X), 1, 1))

    def _grid(self, n):
        x = np.linspace(0.0, 1.0, n)
        V = np.full(n, 1.0 / (n - 1))
        V[[0, -1]] *= 0.5
        return x[:, None], V, [0, n - 1], np.ones(2), 1.0 / (n - 1)

    def _random(self, n, rng):
        x = np.concatenate([[0.0, 1.0], rng.uniform(0.0, 1.0, n - 2)])
        return x[:, None], [0, 1]


class Circle(ManifoldCase):
    name, k, d = "circle", 1, 2
    volume = 2 * np.pi
    boundary_measure = 0.0

    def u(self, X): return X[:, 0] / np.linalg.norm(X, axis=1)
    def f(self, X): return self.u(X)
    # gradient of the extension u = x; only the tangential part is used
    def grad_u(self, X): return np.tile([1.0, 0.0], (len(X), 1))

    def tangent_basis(self, X):
        r = np.linalg.norm(X, axis=1)
        return np.stack([-X[:, 1] / r, X[:, 0] / r], axis=1)[:, None, :]

    def _grid(self, n):
        th = 2 * np.pi * np.arange(n) / n
        pts = np.stack([np.cos(th), np.sin(th)], axis=1)
        return pts, np.full(n, 2 * np.pi / n), [], [], 2 * np.pi / n

    def _random(self, n, rng):
        th = rng.uniform(0.0, 2 * np.pi, n)
        return np.stack([np.cos(th), np.sin(th)], axis=1), []


class Sphere(ManifoldCase):
    name, k, d = "sphere", 2, 3
    volume = 4 * np.pi
    boundary_measure = 0.0

    def u(self, X): return X[:, 2] / np.linalg.norm(X, axis=1)
    def f(self, X): return 2.0 * self.u(X)
    def grad_u(self, X): return np.tile([0.0, 0.0, 1.0], (len(X), 1))

    def tangent_basis(self, X):
        p = X / np.linalg.norm(X, axis=1, keepdims=True)
        e1 = np.stack([-p[:, 1], p[:, 0], np.zeros(len(p))], axis=1)
        s = np.linalg.norm(e1, axis=1)
        polar = s < 1e-8
        e1[polar] = [1.0, 0.0, 0.0]
        e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
        e2 = np.cross(p, e1)
        return np.stack([e1, e2], axis=1)

    @staticmethod
    def _bands(nb):
        dth = np.pi / nb
        centers = (np.arange(nb) + 0.5) * dth
        counts = np.maximum(3, np.rint(2 * np.pi * np.sin(centers) / dth)).astype(int)
        return dth, centers, counts

    def _grid(self, n):
        # latitude bands of equal angular height, cells of near-equal area
        nb = max(2, int(round(np.sqrt(np.pi * n / 4.0))))
        best = min(range(max(2, nb - 3), nb + 4), key=lambda b: abs(self._bands(b)[2].sum() - n))
        dth, centers, counts = self._bands(best)
        pts, V, h = [], [], dth
        for j, (th, m) in enumerate(zip(centers, counts)):
            area = 2 * np.pi * (np.cos(th - dth / 2) - np.cos(th + dth / 2))
            ph = 2 * np.pi * (np.arange(m) + 0.5 * (j % 2)) / m
            pts.append(np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph),
                                 np.full(m, np.cos(th))], axis=1))
            V.append(np.full(m, area / m))
            h = max(h, 2 * np.pi * np.sin(th) / m)
        return np.concatenate(pts), np.concatenate(V), [], [], h

    def _random(self, n, rng):
        # area-preserving (z, phi) map
        z = rng.uniform(-1.0, 1.0, n)
        ph = rng.uniform(0.0, 2 * np.pi, n)
        s = np.sqrt(1.0 - z * z)
        return np.stack([s * np.cos(ph), s * np.sin(ph), z], axis=1), []


class Disk(ManifoldCase):
    name, k, d = "disk", 2, 2
    volume = np.pi
    boundary_measure = 2 * np.pi

    def u(self, X): return X[:, 0] ** 2 - X[:, 1] ** 2
    def f(self, X): return np.zeros(len(X))
    def b(self, X): return 2.0 * (X[:, 0] ** 2 - X[:, 1] ** 2)
    def grad_u(self, X): return np.stack([2 * X[:, 0], -2 * X[:, 1]], axis=1)
    def tangent_basis(self, X): return np.tile(np.eye(2), (len(X), 1, 1))

    @staticmethod
    def _count(nr):
        return 1 + 3 * nr * (nr + 1)

    def _grid(self, n):
        # center point plus rings r_k = k/nr with 6k points; ring cells are exact annuli
        nr = max(1, int(round((-3 + np.sqrt(9 + 12 * (n - 1))) / 6)))
        nr = min((q for q in (nr - 1, nr, nr + 1) if q >= 1), key=lambda q: abs(self._count(q) - n))
        dr = 1.0 / nr
        pts = [np.zeros((1, 2))]
        V = [np.array([np.pi * (dr / 2) ** 2])]
        h = dr
        for k in range(1, nr + 1):
            m = 6 * k
            lo, hi = (k - 0.5) * dr, min((k + 0.5) * dr, 1.0)
            th = 2 * np.pi * (np.arange(m) + 0.5 * (k % 2)) / m
            r = k * dr
            pts.append(np.stack([r * np.cos(th), r * np.sin(th)], axis=1))
            V.append(np.full(m, np.pi * (hi * hi - lo * lo) / m))
            h = max(h, 2 * np.pi * r / m)
        pts = np.concatenate(pts)
        nb = 6 * nr
        bidx = np.arange(len(pts) - nb, len(pts))
        return pts, np.concatenate(V), bidx, np.full(nb, 2 * np.pi / nb), h

    def _random(self, n, rng):
        # boundary ring of ~2 sqrt(n) uniform angles plus uniform interior points
        m = max(3, int(round(2 * np.sqrt(n))))
        th = rng.uniform(0.0, 2 * np.pi, m)
        rr = np.sqrt(rng.uniform(0.0, 1.0, n - m))
        ph = rng.uniform(0.0, 2 * np.pi, n - m)
        pts = np.concatenate([np.stack([np.cos(th), np.sin(th)], axis=1),
                              np.stack([rr * np.cos(ph), rr * np.sin(ph)], axis=1)])
        return pts, np.arange(m)


CASES = {c.name: c for c in (Interval(), Circle(), Sphere(), Disk())}


def get_case(name: str) -> ManifoldCase:
    try:
        return CASES[name]
    except KeyError:
        raise ValueError(f"unknown case {name!r}; choose from {sorted(CASES)}") from None


def sample(case: ManifoldCase, n: int, mode: str = "grid", seed: int = 0) -> SampledCloud:
    return case.sample(n, mode, seed)


def eval_exact(case: ManifoldCase, cloud: PointCloud):
    """Exact ``(u, f, b)`` at the cloud's points (``b`` at its boundary points)."""
    X = cloud.points
    return case.u(X), case.f(X), case.b(cloud.boundary_points)


class ErrorNorms(NamedTuple):
    linf: float
    l2: float
    h1: float
    skipped: int


def error_norms(case: ManifoldCase, sol: PimSolution, n_eval: int, chunk: int = 4096) -> ErrorNorms:
    """Errors of the reconstruction against ``case.u`` on an independent grid of ``n_eval`` points.

    The H1 seminorm uses gradients projected onto the analytic tangent space.
    Points outside kernel reach are skipped and counted.
    """
    ev = case.sample(n_eval, "grid")
    X, w = ev.points, ev.volume_weights
    linf = l2 = h1 = 0.0
    skipped = 0
    for a in range(0, len(X), chunk):
        Xa, wa = X[a:a + chunk], w[a:a + chunk]
        val, grad, reach = evaluate(sol, Xa, gradient=True)
        skipped += int(np.sum(~reach))
        Xa, wa, val, grad = Xa[reach], wa[reach], val[reach], grad[reach]
        e = case.u(Xa) - val
        T = case.tangent_basis(Xa)
        ge = np.einsum("nkd,nd->nk", T, case.grad_u(Xa) - grad)
        if e.size:
            linf = max(linf, float(np.max(np.abs(e))))
        l2 += float(np.sum(e * e * wa))
        h1 += float(np.sum(np.sum(ge * ge, axis=1) * wa))
    return ErrorNorms(linf, np.sqrt(l2), np.sqrt(h1), skipped)
