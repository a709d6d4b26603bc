"""Tensile-instability control: pressure-zone adaptive kernel knots.

Interactions are stable in tension where the kernel's second derivative is
negative (inside the gradient peak) and stable in compression where it is
positive (outside the peak).  Each step, every particle's neighborhood is
classified by the sign of its immediate neighbors' pressures:

* any immediate neighbor in tension (p < 0, compression positive): the knot
  is set to a = b*r/(b*h - r) so the gradient peak lands exactly on the
  farthest immediate neighbor, putting the whole nearest ring inside the
  tension-stable zone; a is capped at b once r reaches b*h/2;
* all immediate neighbors in compression: a drops to a small value (0.2)
  that pulls the peak well inside the nearest ring, so every immediate
  neighbor sits in the compression-stable zone.

The farthest-immediate-neighbor distance r is not measured geometrically but
estimated by integrating each particle's strain rates into the edge lengths
and shear offsets of its initial grid cell: r = max of the two diagonals of
the sheared cell.

Two comparison modes are also provided: ``conventional`` (fixed a = 1, the
classical cubic spline) and ``artificial_stress`` (fixed a = 1 plus the
short-range pairwise repulsion between tensile particles, strength eps_as,
kernel-ratio exponent n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernel import knot_for_peak

__all__ = [
    "MODE_CONVENTIONAL",
    "MODE_ADAPTIVE",
    "MODE_ARTIFICIAL_STRESS",
    "StabilizerMode",
    "update_cells",
    "farthest_immediate_distance",
    "classify_pressure_zone",
    "adapt_knot",
    "artificial_stress_tensors",
    "artificial_stress_term",
]

MODE_CONVENTIONAL = "conventional"
MODE_ADAPTIVE = "adaptive"
MODE_ARTIFICIAL_STRESS = "artificial_stress"

_MODE_ALIASES = {
    "conventional": MODE_CONVENTIONAL,
    "standard": MODE_CONVENTIONAL,
    "adaptive": MODE_ADAPTIVE,
    "adaptive_kernel": MODE_ADAPTIVE,
    "artificial_stress": MODE_ARTIFICIAL_STRESS,
    "artificial-stress": MODE_ARTIFICIAL_STRESS,
}


@dataclass(frozen=True)
class StabilizerMode:
    """Selected stabilization scheme and its parameters."""

    kind: str = MODE_ADAPTIVE
    eps_as: float = 0.5
    exponent_n: float = 4.0
    knot_compression: float = 0.2
    eta_immediate: float = 0.05

    def __post_init__(self):
        kind = _MODE_ALIASES.get(self.kind)
        if kind is None:
            raise ValueError(f"unknown stabilizer mode {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if not 0.0 <= self.eps_as <= 1.0:
            raise ValueError(f"eps_as must lie in [0, 1], got {self.eps_as}")
        if self.exponent_n <= 0.0:
            raise ValueError(f"exponent_n must be positive, got {self.exponent_n}")


def update_cells(cell_dx, cell_dy, cell_shx, cell_shy, strain_rate, dt):
    """Advance the deformed-cell state one step from the particle strain rates.

    strain_rate is (..., 3) = (exx, eyy, exy).  Edge lengths stretch with the
    normal rates; the shear offsets accumulate the transverse displacement of
    the previous step's edge vectors: the x-offset of the y-edge tip grows by
    exy * dy_prev * dt and the y-offset of the x-edge tip by exy * dx_prev * dt.
    Returns the four updated arrays.
    """
    strain_rate = np.asarray(strain_rate, dtype=float)
    exx = strain_rate[..., 0]
    eyy = strain_rate[..., 1]
    exy = strain_rate[..., 2]
    new_dx = cell_dx * (1.0 + exx * dt)
    new_dy = cell_dy * (1.0 + eyy * dt)
    new_shx = cell_shx + exy * cell_dy * dt
    new_shy = cell_shy + exy * cell_dx * dt
    return new_dx, new_dy, new_shx, new_shy


def farthest_immediate_distance(cell_dx, cell_dy, cell_shx, cell_shy):
    """Longest diagonal of the sheared cell: the farthest-immediate-neighbor
    distance estimate r."""
    s1 = np.hypot(cell_dx + cell_shx, cell_dy + cell_shy)
    s2 = np.hypot(cell_dx - cell_shx, cell_dy - cell_shy)
    return np.maximum(s1, s2)


def classify_pressure_zone(dists, pressures, r_i, eta=0.05) -> bool:
    """True when any immediate neighbor is in tension (p < 0).

    ``dists``/``pressures`` are the neighbor separations and pressures of one
    particle; immediate neighbors are those within r_i*(1 + eta).  An empty
    immediate set classifies as all-compression (free-flying particle).
    """
    dists = np.asarray(dists, dtype=float)
    pressures = np.asarray(pressures, dtype=float)
    immediate = dists <= r_i * (1.0 + eta)
    return bool(np.any(pressures[immediate] < 0.0))


def adapt_knot(tension_present: bool, r_i: float, b: float, h: float,
               a_compression: float = 0.2) -> float:
    """New intermediate knot for one particle given its pressure zone."""
    if tension_present:
        return knot_for_peak(r_i, b, h)
    return a_compression


def artificial_stress_tensors(sigma, rho, eps_as):
    """Per-particle artificial stress R (N, 3) = (Rxx, Ryy, Rxy).

    The in-plane stress is rotated to principal axes; each tensile principal
    component contributes -eps_as * sigma_principal / rho^2, compressive ones
    nothing; the result is rotated back.  Zero everywhere when the state is
    fully compressive.
    """
    sigma = np.asarray(sigma, dtype=float)
    rho = np.asarray(rho, dtype=float)
    sxx, syy, sxy = sigma[..., 0], sigma[..., 1], sigma[..., 3]
    theta = 0.5 * np.arctan2(2.0 * sxy, sxx - syy)
    ct, st = np.cos(theta), np.sin(theta)
    p1 = ct * ct * sxx + 2.0 * ct * st * sxy + st * st * syy
    p2 = st * st * sxx - 2.0 * ct * st * sxy + ct * ct * syy
    inv_rho2 = 1.0 / (rho * rho)
    r1 = np.where(p1 > 0.0, -eps_as * p1 * inv_rho2, 0.0)
    r2 = np.where(p2 > 0.0, -eps_as * p2 * inv_rho2, 0.0)
    out = np.empty(sigma.shape[:-1] + (3,))
    out[..., 0] = ct * ct * r1 + st * st * r2
    out[..., 1] = st * st * r1 + ct * ct * r2
    out[..., 2] = ct * st * (r1 - r2)
    return out


def artificial_stress_term(r_i, r_j, w_ij, w_ref, exponent_n):
    """Pairwise artificial stress S_ij = (R_i + R_j) * (W_ij / W_ref)^n.

    ``w_ref`` is the kernel value at the initial particle spacing, so the
    repulsion is short-ranged: f < 1 beyond one spacing, f > 1 inside it.
    """
    f = (w_ij / w_ref) ** exponent_n
    return (np.asarray(r_i, dtype=float) + np.asarray(r_j, dtype=float)) * f
