"""Cubic B-spline smoothing kernel on the symmetric knot vector {-b, -a, 0, a, b}.

The kernel is the normalized cubic B-spline basis built over a symmetric but
non-uniform knot vector in the parametric coordinate q = |x - x'|/h.  The
intermediate knot ``a`` controls where the kernel gradient peaks, which is the
handle the tensile-instability control turns per particle and per step; the
outer knot ``b`` is fixed (support radius b*h).  With a = 1, b = 2 the
classical uniform cubic spline kernel is recovered.

Closed form (w = W/alpha_c):

    w(q) = ((a+b) q^3 - 3ab q^2 + a^2 b^2) / (a^2 b (a+b))   0 <= q < a
    w(q) = (b - q)^3 / (b (b^2 - a^2))                        a <= q < b
    w(q) = 0                                                  q >= b

alpha_c enforces the unit-integral normalization in the chosen dimension.
All functions accept scalars or numpy arrays for q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "KernelParams",
    "normalization_constant",
    "eval_w",
    "eval_dw",
    "eval_grad_w",
    "eval_w2",
    "peak_gradient_location",
    "knot_for_peak",
]


@dataclass(frozen=True)
class KernelParams:
    """Shape of one kernel: intermediate knot a, cutoff b, smoothing length h.

    a = b is a valid degenerate shape (the cap state of the adaptive scheme);
    the second polynomial branch then has zero width and is never evaluated.
    """

    a: float
    b: float = 2.0
    h: float = 1.0
    dim: int = 2

    def __post_init__(self):
        if not (0.0 < self.a <= self.b):
            raise ValueError(f"knot a must satisfy 0 < a <= b, got a={self.a}, b={self.b}")
        if self.h <= 0.0:
            raise ValueError(f"smoothing length must be positive, got h={self.h}")
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")

    @property
    def support_radius(self) -> float:
        return self.b * self.h


def normalization_constant(params: KernelParams) -> float:
    """Normalization factor alpha_c such that the kernel integrates to one."""
    a, b, h = params.a, params.b, params.h
    if params.dim == 1:
        return 2.0 / (b * h)
    return 10.0 * (a + b) / (math.pi * b * (a * a + a * b + b * b) * h * h)


def _raw_w(a, b, q):
    """Un-normalized piecewise cubic; q may be scalar or array."""
    q = np.asarray(q, dtype=float)
    first = ((a + b) * q**3 - 3.0 * a * b * q**2 + a * a * b * b) / (a * a * b * (a + b))
    out = np.where(q < a, first, 0.0)
    if a < b:
        second = (b - q) ** 3 / (b * (b * b - a * a))
        out = np.where((q >= a) & (q < b), second, out)
    return out


def _raw_dw(a, b, q):
    q = np.asarray(q, dtype=float)
    first = (3.0 * (a + b) * q**2 - 6.0 * a * b * q) / (a * a * b * (a + b))
    out = np.where(q < a, first, 0.0)
    if a < b:
        second = -3.0 * (b - q) ** 2 / (b * (b * b - a * a))
        out = np.where((q >= a) & (q < b), second, out)
    return out


def _raw_w2(a, b, q):
    q = np.asarray(q, dtype=float)
    first = (6.0 * (a + b) * q - 6.0 * a * b) / (a * a * b * (a + b))
    out = np.where(q < a, first, 0.0)
    if a < b:
        second = 6.0 * (b - q) / (b * (b * b - a * a))
        out = np.where((q >= a) & (q < b), second, out)
    return out


def _check_q(q):
    if np.any(np.asarray(q) < 0.0):
        raise ValueError("normalized distance q must be non-negative")


def eval_w(params: KernelParams, q):
    """Kernel value W(q) (units 1/h^dim)."""
    _check_q(q)
    val = normalization_constant(params) * _raw_w(params.a, params.b, q)
    return float(val) if np.isscalar(q) else val


def eval_dw(params: KernelParams, q):
    """Parametric derivative dW/dq."""
    _check_q(q)
    val = normalization_constant(params) * _raw_dw(params.a, params.b, q)
    return float(val) if np.isscalar(q) else val


def eval_grad_w(params: KernelParams, r_vec) -> np.ndarray:
    """Spatial gradient of W(x_i - x_j) with respect to x_i.

    Returns dW/dq * (1/h) * r_vec/|r_vec|; the zero vector at r_vec = 0
    (dW/dq vanishes at the center by symmetry) and beyond the support.
    """
    r_vec = np.asarray(r_vec, dtype=float)
    r = float(np.linalg.norm(r_vec))
    if r == 0.0:
        return np.zeros_like(r_vec)
    q = r / params.h
    if q >= params.b:
        return np.zeros_like(r_vec)
    return eval_dw(params, q) / (params.h * r) * r_vec


def eval_w2(params: KernelParams, q):
    """Parametric second derivative d2W/dq2 (stability diagnostic).

    Piecewise linear; negative on [0, ab/(a+b)), positive beyond up to the
    cutoff.  Only the sign is used by the stability checks, so the parametric
    (rather than spatial, 1/h^2-scaled) derivative is returned.
    """
    _check_q(q)
    val = normalization_constant(params) * _raw_w2(params.a, params.b, q)
    return float(val) if np.isscalar(q) else val


def peak_gradient_location(params: KernelParams) -> float:
    """Distance from the center at which |dW/dq| is largest, in meters."""
    a, b = params.a, params.b
    return a * b / (a + b) * params.h


def knot_for_peak(r: float, b: float, h: float) -> float:
    """Intermediate knot a that places the gradient peak at distance r.

    Inverse of peak_gradient_location: a = b*r/(b*h - r).  The largest
    reachable peak distance is b*h/2 (at a = b), so larger requests are
    capped at a = b.
    """
    if r <= 0.0:
        raise ValueError(f"peak distance must be positive, got {r}")
    if r >= 0.5 * b * h:
        return b
    return b * r / (b * h - r)
