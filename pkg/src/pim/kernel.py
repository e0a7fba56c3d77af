"""Compactly supported kernel profiles and their bandwidth-scaled pair evaluations.

A profile ``R`` lives on ``[0, inf)`` and vanishes for ``r > 1``.  Its tail
integral ``Rbar(r) = int_r^inf R(s) ds`` is evaluated in closed form.  The pair
kernels are ``R_t(x, y) = C_t R(|x - y|^2 / 4t)`` with ``C_t = (4 pi t)^(-k/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

PROFILES = ("wendland_c2", "truncated_gaussian")

# (1 - r)^4 (4 r + 1), ascending coefficients
_WENDLAND = P.polymul(P.polypow([1.0, -1.0], 4), [1.0, 4.0])
_WENDLAND_D1 = P.polyder(_WENDLAND)
_WENDLAND_D2 = P.polyder(_WENDLAND_D1)
_WENDLAND_INT = P.polyint(_WENDLAND)
_WENDLAND_INT_AT_1 = P.polyval(1.0, _WENDLAND_INT)

# truncated Gaussian: exp(-r) * sigma(r), sigma = 1 on [0, 0.8], 0 beyond 1.
# The cutoff is evaluated in s = (r - 0.8) / 0.2 to avoid cancellation.
_CUT_LO = 0.8
_CUT_HI = 1.0
_CUT_W = _CUT_HI - _CUT_LO
# 1 - (10 s^3 - 15 s^4 + 6 s^5)
_SIGMA = np.array([1.0, 0.0, 0.0, -10.0, 15.0, -6.0])
_SIGMA_D1 = P.polyder(_SIGMA)
_SIGMA_D2 = P.polyder(_SIGMA_D1)


def _cutoff(r, order=0):
    """d^order sigma / dr^order."""
    s = np.clip((r - _CUT_LO) / _CUT_W, 0.0, 1.0)
    coef = (_SIGMA, _SIGMA_D1, _SIGMA_D2)[order]
    return P.polyval(s, coef) / _CUT_W**order


def _exp_series_product(coef, lam, terms=24):
    """Polynomial p(s) * exp(-lam s), exp truncated at ``terms`` (remainder < 1e-30 for lam <= 1/5)."""
    series = np.array([(-lam) ** j / math.factorial(j) for j in range(terms)])
    return P.polymul(coef, series)


# int_s^1 exp(-w s') sigma(s') ds' as a polynomial antiderivative in s
_CUT_INTEGRAND = P.polyint(_exp_series_product(_SIGMA, _CUT_W))
_CUT_INTEGRAND_AT_1 = P.polyval(1.0, _CUT_INTEGRAND)


def _cut_tail(r):
    """int_r^1 exp(-rho) sigma(rho) d rho for r in [0.8, 1]."""
    s = np.clip((r - _CUT_LO) / _CUT_W, 0.0, 1.0)
    piece = _CUT_INTEGRAND_AT_1 - P.polyval(s, _CUT_INTEGRAND)
    return _CUT_W * np.exp(-_CUT_LO) * piece


_GAUSS_TAIL_CUT = float(_cut_tail(_CUT_LO))


@dataclass(frozen=True)
class KernelSpec:
    """Kernel profile with bandwidth ``t`` for a ``k``-dimensional manifold."""

    profile_id: str = "wendland_c2"
    t: float = 0.01
    k: int = 1

    def __post_init__(self):
        if self.profile_id not in PROFILES:
            raise ValueError(f"unknown kernel profile {self.profile_id!r}; choose from {PROFILES}")
        if not self.t > 0:
            raise ValueError(f"bandwidth t must be positive, got {self.t}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"intrinsic dimension k must be a positive integer, got {self.k}")

    @property
    def delta0(self) -> float:
        """Lower bound of the profile on [0, 1/2]."""
        return DELTA0[self.profile_id]

    @property
    def c_t(self) -> float:
        return (4.0 * np.pi * self.t) ** (-self.k / 2.0)

    @property
    def radius(self) -> float:
        """Support radius ``2 sqrt(t)`` in ambient length units."""
        return 2.0 * np.sqrt(self.t)

    def with_t(self, t: float) -> "KernelSpec":
        return KernelSpec(self.profile_id, t, self.k)


def eval_profile(spec: KernelSpec, r):
    r = np.asarray(r, dtype=float)
    if spec.profile_id == "wendland_c2":
        return np.where(r < 1.0, P.polyval(r, _WENDLAND), 0.0)
    return np.where(r < _CUT_HI, np.exp(-r) * _cutoff(r), 0.0)


def eval_profile_derivative(spec: KernelSpec, r):
    r = np.asarray(r, dtype=float)
    if spec.profile_id == "wendland_c2":
        return np.where(r < 1.0, P.polyval(r, _WENDLAND_D1), 0.0)
    return np.where(r < _CUT_HI, np.exp(-r) * (_cutoff(r, 1) - _cutoff(r)), 0.0)


def eval_profile_second_derivative(spec: KernelSpec, r):
    r = np.asarray(r, dtype=float)
    if spec.profile_id == "wendland_c2":
        return np.where(r < 1.0, P.polyval(r, _WENDLAND_D2), 0.0)
    sig = _cutoff(r) - 2 * _cutoff(r, 1) + _cutoff(r, 2)
    return np.where(r < _CUT_HI, np.exp(-r) * sig, 0.0)


def eval_bar(spec: KernelSpec, r):
    """Tail integral of the profile, ``int_r^inf R(s) ds``, in closed form."""
    r = np.asarray(r, dtype=float)
    if spec.profile_id == "wendland_c2":
        out = _WENDLAND_INT_AT_1 - P.polyval(r, _WENDLAND_INT)
        return np.where(r < 1.0, out, 0.0)
    head = np.exp(-np.minimum(r, _CUT_LO)) - np.exp(-_CUT_LO) + _GAUSS_TAIL_CUT
    out = np.where(r < _CUT_LO, head, _cut_tail(r))
    return np.where(r < _CUT_HI, out, 0.0)


DELTA0 = {
    "wendland_c2": float(P.polyval(0.5, _WENDLAND)),
    "truncated_gaussian": float(np.exp(-0.5)),
}


def pair_kernel(spec: KernelSpec, x, y):
    """Return ``(R_t(x, y), Rbar_t(x, y))``.

    ``x`` and ``y`` may be single points or broadcastable stacks of points
    (last axis is the ambient dimension).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1:] != y.shape[-1:]:
        raise ValueError(f"dimension mismatch: {x.shape[-1:]} vs {y.shape[-1:]}")
    r = np.sum((x - y) ** 2, axis=-1) / (4.0 * spec.t)
    return spec.c_t * eval_profile(spec, r), spec.c_t * eval_bar(spec, r)
