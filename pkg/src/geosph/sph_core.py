"""Discrete conservation laws and predictor-corrector time stepping.

All neighbor sums are gather-form: sums over j use particle i's kernel shape
(a_knot[i]).  With a uniform knot (conventional mode) the pairwise momentum
exchange is antisymmetric and total momentum is conserved to round-off; with
per-particle knots the residual is surfaced as a per-step diagnostic.

One step (midpoint predictor-corrector):

1. rebuild neighbors at the current positions;
2. rates at t, predict every field half a step;
3. rates at the half step (same index lists, fresh separations);
4. full-step update with the midpoint rates, then the constitutive
   scale-back;
5. advance the deformed cells and, in adaptive mode, re-classify pressure
   zones and reassign kernel knots for the next step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import constitutive as cst
from . import kernel
from .boundary import distance_to_segment
from .neighbors import build_neighbors
from .particles import NeighborTable, ParticleSystem, StepControls
from .stabilizer import (
    MODE_ADAPTIVE,
    MODE_ARTIFICIAL_STRESS,
    StabilizerMode,
    artificial_stress_tensors,
    farthest_immediate_distance,
    update_cells,
)

__all__ = [
    "NumericalAbort",
    "Rates",
    "StepDiagnostics",
    "artificial_viscosity",
    "cfl_dt",
    "norm_constants",
    "compute_rates",
    "step_predictor_corrector",
]


class NumericalAbort(RuntimeError):
    """Raised when a non-finite field or a collapsed state is detected."""

    def __init__(self, message, system=None):
        super().__init__(message)
        self.system = system


@dataclass
class Rates:
    drho: np.ndarray
    dv: np.ndarray
    de: np.ndarray
    deps: np.ndarray
    domega: np.ndarray
    dv_bnd: np.ndarray


@dataclass
class StepDiagnostics:
    """Per-step bookkeeping used by the runner's momentum/energy log."""

    bnd_impulse: np.ndarray       # impulse imparted through wall pairs this step
    residual_impulse: np.ndarray  # momentum change beyond gravity + wall impulse
    n_tension: int
    max_lambda: float


def cfl_dt(h: float, c_sound: float, cfl_number: float) -> float:
    """Stable time step dt = cfl * h / c for the elastic P-wave speed."""
    if h <= 0.0 or c_sound <= 0.0 or cfl_number <= 0.0:
        raise ValueError("cfl_dt needs positive h, sound speed, and CFL number")
    return cfl_number * h / c_sound


def artificial_viscosity(v_ij, x_ij, rho_i, rho_j, h, c_sound, gamma1, gamma2, eps_visc=0.01):
    """Monaghan pair viscosity: repulsive for approaching pairs, zero otherwise."""
    v_ij = np.asarray(v_ij, dtype=float)
    x_ij = np.asarray(x_ij, dtype=float)
    vdotx = float(v_ij @ x_ij)
    if vdotx >= 0.0:
        return 0.0
    mu = h * vdotx / (float(x_ij @ x_ij) + eps_visc * h * h)
    return (-gamma1 * c_sound * mu + gamma2 * mu * mu) / (0.5 * (rho_i + rho_j))


def norm_constants(a_knot, b, h):
    """Per-particle 2D normalization constants for the current knots."""
    a = np.asarray(a_knot, dtype=float)
    return 10.0 * (a + b) / (math.pi * b * (a * a + a * b + b * b) * h * h)


def _wall_distances(pos, segs):
    """(n_seg, N) perpendicular distances to each wall segment."""
    out = np.empty((len(segs), pos.shape[0]))
    for k, seg in enumerate(segs):
        out[k] = distance_to_segment(pos, seg)
    return out


def compute_rates(
    backend,
    ps: ParticleSystem,
    table: NeighborTable,
    mat: cst.MaterialParams,
    controls: StepControls,
    mode: StabilizerMode,
    segs: np.ndarray,
    h: float,
    b: float,
    pos=None,
    vel=None,
    rho=None,
    sigma=None,
) -> Rates:
    """Evaluate all rates for the given (possibly predicted) field arrays."""
    pos = ps.x if pos is None else pos
    vel = ps.v if vel is None else vel
    rho = ps.rho if rho is None else rho
    sigma = ps.sigma if sigma is None else sigma

    if mode.kind == MODE_ARTIFICIAL_STRESS and mode.eps_as > 0.0:
        as_R = artificial_stress_tensors(sigma, rho, mode.eps_as)
        # reference value W(spacing) with the uniform a = 1 kernel of this mode
        as_wref = kernel.eval_w(kernel.KernelParams(a=1.0, b=b, h=h, dim=2), ps.spacing / h)
    else:
        as_R = np.zeros((ps.n, 3))
        as_wref = 0.0

    dist_seg = _wall_distances(pos, segs) if len(segs) else np.zeros((0, ps.n))
    alpha_c = norm_constants(ps.a_knot, b, h)
    out = backend.compute_rates(
        pos, vel, rho, ps.m, sigma, ps.kind, ps.a_knot, alpha_c,
        table.indptr, table.indices,
        h, b,
        controls.gamma1, controls.gamma2, controls.eps_visc, mat.sound_speed,
        controls.gravity[0], controls.gravity[1],
        dist_seg, ps.wall_seg, ps.wall_dist, controls.chi_max,
        as_R, as_wref, mode.exponent_n,
    )
    return Rates(*out)


def _check_finite(ps: ParticleSystem):
    real = ps.real
    if not (
        np.all(np.isfinite(ps.x[real]))
        and np.all(np.isfinite(ps.v[real]))
        and np.all(np.isfinite(ps.rho[real]))
        and np.all(np.isfinite(ps.sigma[real]))
    ):
        raise NumericalAbort("non-finite particle field detected", system=ps)
    if np.any(ps.rho[real] <= 0.0):
        raise NumericalAbort("non-positive density detected", system=ps)
    if np.any(ps.cell_dx[real] <= 0.0) or np.any(ps.cell_dy[real] <= 0.0):
        raise NumericalAbort("deformed-cell edge collapsed", system=ps)


def step_predictor_corrector(
    ps: ParticleSystem,
    mat: cst.MaterialParams,
    controls: StepControls,
    mode: StabilizerMode,
    segs: np.ndarray,
    h: float,
    b: float,
    backend,
    table: NeighborTable = None,
) -> StepDiagnostics:
    """Advance the system one full step in place, returning diagnostics."""
    dt = controls.dt
    if table is None:
        table = build_neighbors(ps.x, b * h)

    r0 = compute_rates(backend, ps, table, mat, controls, mode, segs, h, b)

    half = 0.5 * dt
    x_h = ps.x + half * ps.v
    v_h = ps.v + half * r0.dv
    rho_h = ps.rho + half * r0.drho
    sigma_h, _, _ = cst.update_stress(ps.sigma, ps.sigma, r0.deps, r0.domega, mat, half)

    r1 = compute_rates(
        backend, ps, table, mat, controls, mode, segs, h, b,
        pos=x_h, vel=v_h, rho=rho_h, sigma=sigma_h,
    )

    ps.x += dt * v_h
    ps.v += dt * r1.dv
    ps.rho += dt * r1.drho
    ps.e += dt * r1.de
    ps.sigma, lam, d_eps = cst.update_stress(ps.sigma, sigma_h, r1.deps, r1.domega, mat, dt)
    ps.eps_bar_p += d_eps

    ps.cell_dx, ps.cell_dy, ps.cell_shx, ps.cell_shy = update_cells(
        ps.cell_dx, ps.cell_dy, ps.cell_shx, ps.cell_shy, r1.deps, dt
    )
    _check_finite(ps)

    n_tension = 0
    if mode.kind == MODE_ADAPTIVE:
        r_imm = farthest_immediate_distance(ps.cell_dx, ps.cell_dy, ps.cell_shx, ps.cell_shy)
        p = cst.pressure(ps.sigma)
        a_new, zone = backend.adapt_knots(
            ps.x, p, r_imm, table.indptr, table.indices, ps.kind,
            b, h, mode.eta_immediate, mode.knot_compression,
        )
        real = ps.real
        ps.a_knot[real] = a_new[real]
        ps.zone_tension = zone
        n_tension = int(zone[real].sum())

    m_real = ps.m * ps.real
    bnd_impulse = dt * np.array([
        float(m_real @ r1.dv_bnd[:, 0]),
        float(m_real @ r1.dv_bnd[:, 1]),
    ])
    g = np.asarray(controls.gravity, dtype=float)
    resid = dt * np.array([
        float(m_real @ (r1.dv[:, 0] - r1.dv_bnd[:, 0])),
        float(m_real @ (r1.dv[:, 1] - r1.dv_bnd[:, 1])),
    ]) - float(m_real.sum()) * g * dt
    return StepDiagnostics(
        bnd_impulse=bnd_impulse,
        residual_impulse=resid,
        n_tension=n_tension,
        max_lambda=float(np.max(lam)) if np.size(lam) else 0.0,
    )
