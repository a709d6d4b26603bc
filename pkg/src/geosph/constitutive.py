"""Drucker-Prager elastoplasticity in plane strain with Jaumann objectivity.

Stress is carried as a length-4 component vector (xx, yy, zz, xy), tension
positive.  Pressure p = -tr(sigma)/3 is compression positive; the deviator
keeps all four components because the zz deviator enters J2 and the flow
rule even though plane-strain kinematics freeze eps_zz.

The update path per substep is: elastic (Hooke + spin transport) trial,
non-associative plastic relaxation gated on the trial touching the yield
surface, then the two-stage scale-back (apex pressure shift followed by
deviatoric scaling) that projects any remaining overshoot onto the surface.
All functions are vectorized over a leading particle axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MaterialParams",
    "StressState",
    "dp_coefficients",
    "pressure",
    "deviator",
    "j2_invariant",
    "yield_function",
    "plastic_multiplier_rate",
    "elastic_stress_rate",
    "stress_rate",
    "apex_pressure_correction",
    "deviatoric_scaleback",
    "scale_back",
    "effective_plastic_strain_increment",
    "update_stress",
]

_SQRT_J2_FLOOR = 1e-12


def dp_coefficients(c: float, phi: float, psi: float):
    """Drucker-Prager coefficients (alpha_phi, k_c, alpha_psi) from cohesion
    c, friction angle phi and dilatancy angle psi (radians, plane-strain
    matching)."""
    if not 0.0 <= phi < 0.5 * math.pi:
        raise ValueError(f"friction angle must lie in [0, pi/2), got {phi}")
    tphi = math.tan(phi)
    tpsi = math.tan(psi)
    den_phi = math.sqrt(9.0 + 12.0 * tphi * tphi)
    den_psi = math.sqrt(9.0 + 12.0 * tpsi * tpsi)
    return 3.0 * tphi / den_phi, 3.0 * c / den_phi, 3.0 * tpsi / den_psi


@dataclass(frozen=True)
class MaterialParams:
    """Elastic constants plus Drucker-Prager coefficients.

    Angles are in radians.  Derived quantities (G, K, alpha_phi, k_c,
    alpha_psi, p-wave speed) are computed once in __post_init__.
    """

    rho0: float
    E: float
    nu: float
    c: float
    phi: float
    psi: float = 0.0
    G: float = 0.0
    K: float = 0.0
    alpha_phi: float = 0.0
    k_c: float = 0.0
    alpha_psi: float = 0.0

    def __post_init__(self):
        if self.rho0 <= 0.0:
            raise ValueError(f"reference density must be positive, got {self.rho0}")
        if self.E <= 0.0:
            raise ValueError(f"Young's modulus must be positive, got {self.E}")
        if not 0.0 <= self.nu < 0.5:
            raise ValueError(f"Poisson's ratio must lie in [0, 0.5), got {self.nu}")
        if self.c < 0.0:
            raise ValueError(f"cohesion must be non-negative, got {self.c}")
        a_phi, k_c, a_psi = dp_coefficients(self.c, self.phi, self.psi)
        object.__setattr__(self, "G", self.E / (2.0 * (1.0 + self.nu)))
        object.__setattr__(self, "K", self.E / (3.0 * (1.0 - 2.0 * self.nu)))
        object.__setattr__(self, "alpha_phi", a_phi)
        object.__setattr__(self, "k_c", k_c)
        object.__setattr__(self, "alpha_psi", a_psi)

    @property
    def sound_speed(self) -> float:
        """Plane-wave (P-wave) speed used for the CFL bound and viscosity."""
        return math.sqrt((self.K + 4.0 * self.G / 3.0) / self.rho0)

    @property
    def apex_pressure(self) -> float:
        """Most tensile admissible pressure -k_c/alpha_phi; -inf if phi = 0
        (tension cutoff disabled)."""
        if self.alpha_phi == 0.0:
            return -math.inf
        return -self.k_c / self.alpha_phi


def pressure(sigma):
    """Compression-positive pressure p = -tr(sigma)/3 for (..., 4) stresses."""
    sigma = np.asarray(sigma)
    return -(sigma[..., 0] + sigma[..., 1] + sigma[..., 2]) / 3.0


def deviator(sigma):
    """Deviatoric part (..., 4); trace of the first three components is zero."""
    sigma = np.asarray(sigma)
    tau = sigma.copy()
    mean = (sigma[..., 0] + sigma[..., 1] + sigma[..., 2]) / 3.0
    tau[..., 0] -= mean
    tau[..., 1] -= mean
    tau[..., 2] -= mean
    return tau


def j2_invariant(tau):
    """Second deviatoric invariant J2 = tau:tau / 2 from a deviator."""
    tau = np.asarray(tau)
    return 0.5 * (tau[..., 0] ** 2 + tau[..., 1] ** 2 + tau[..., 2] ** 2) + tau[..., 3] ** 2


def yield_function(p, j2, mat: MaterialParams):
    """F = sqrt(J2) - alpha_phi * p - k_c; admissible states have F <= 0."""
    return np.sqrt(j2) - mat.alpha_phi * np.asarray(p) - mat.k_c


class StressState:
    """Convenience view of one or many stress vectors with derived invariants."""

    def __init__(self, sigma):
        self.sigma = np.asarray(sigma, dtype=float)

    @property
    def p(self):
        return pressure(self.sigma)

    @property
    def tau(self):
        return deviator(self.sigma)

    @property
    def j2(self):
        return j2_invariant(self.tau)


def plastic_multiplier_rate(sigma, strain_rate, mat: MaterialParams, active=None):
    """Rate of the plastic multiplier from the consistency condition.

    strain_rate is (..., 3) = (exx, eyy, exy) with plane-strain ezz = 0.
    ``active`` is the loading gate (trial state at or beyond the surface);
    when omitted the gate is evaluated on ``sigma`` itself.  The result is
    clamped at zero (no flow on unloading) and forced to zero where J2 is
    numerically zero, which is the apex case handled by the pressure
    correction instead.
    """
    sigma = np.asarray(sigma, dtype=float)
    strain_rate = np.asarray(strain_rate, dtype=float)
    tau = deviator(sigma)
    j2 = j2_invariant(tau)
    sqrt_j2 = np.sqrt(j2)
    if active is None:
        active = yield_function(pressure(sigma), j2, mat) >= 0.0
    trace = strain_rate[..., 0] + strain_rate[..., 1]
    tau_eps = (
        tau[..., 0] * strain_rate[..., 0]
        + tau[..., 1] * strain_rate[..., 1]
        + 2.0 * tau[..., 3] * strain_rate[..., 2]
    )
    denom = mat.G + mat.K * mat.alpha_phi * mat.alpha_psi
    safe = sqrt_j2 > _SQRT_J2_FLOOR * max(mat.k_c, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = (mat.G * tau_eps / sqrt_j2 + mat.alpha_phi * mat.K * trace) / denom
    lam = np.where(active & safe, raw, 0.0)
    return np.maximum(lam, 0.0)


def _spin_transport(sigma, spin_xy):
    """Jaumann transport terms sigma.w^T + w.sigma for a 2D spin tensor with
    the single independent component w = omega_xy."""
    sigma = np.asarray(sigma, dtype=float)
    w = np.asarray(spin_xy, dtype=float)
    out = np.zeros_like(sigma)
    out[..., 0] = 2.0 * sigma[..., 3] * w
    out[..., 1] = -2.0 * sigma[..., 3] * w
    out[..., 3] = (sigma[..., 1] - sigma[..., 0]) * w
    return out


def elastic_stress_rate(sigma, strain_rate, spin_xy, mat: MaterialParams):
    """Hooke rate plus spin transport (no plastic relaxation)."""
    strain_rate = np.asarray(strain_rate, dtype=float)
    trace = strain_rate[..., 0] + strain_rate[..., 1]
    dev_xx = strain_rate[..., 0] - trace / 3.0
    dev_yy = strain_rate[..., 1] - trace / 3.0
    dev_zz = -trace / 3.0
    rate = _spin_transport(sigma, spin_xy)
    rate[..., 0] += 2.0 * mat.G * dev_xx + mat.K * trace
    rate[..., 1] += 2.0 * mat.G * dev_yy + mat.K * trace
    rate[..., 2] += 2.0 * mat.G * dev_zz + mat.K * trace
    rate[..., 3] += 2.0 * mat.G * strain_rate[..., 2]
    return rate


def stress_rate(sigma, strain_rate, spin_xy, mat: MaterialParams, lam_rate=None, active=None):
    """Full Jaumann stress rate with non-associative plastic relaxation.

    When ``lam_rate`` is omitted it is computed from the consistency
    condition (gated by ``active``).  The plastic deviatoric direction uses
    the current tau/sqrt(J2).
    """
    sigma = np.asarray(sigma, dtype=float)
    rate = elastic_stress_rate(sigma, strain_rate, spin_xy, mat)
    if lam_rate is None:
        lam_rate = plastic_multiplier_rate(sigma, strain_rate, mat, active=active)
    lam = np.asarray(lam_rate, dtype=float)
    if np.all(lam == 0.0):
        return rate
    tau = deviator(sigma)
    sqrt_j2 = np.sqrt(j2_invariant(tau))
    safe = sqrt_j2 > _SQRT_J2_FLOOR * max(mat.k_c, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(safe, mat.G / sqrt_j2, 0.0)
    for comp in range(3):
        rate[..., comp] -= lam * (mat.K * mat.alpha_psi + scale * tau[..., comp])
    rate[..., 3] -= lam * scale * tau[..., 3]
    return rate


def apex_pressure_correction(sigma, mat: MaterialParams):
    """Shift overly tensile states to the yield-surface apex.

    Where p < -k_c/alpha_phi, add (p + k_c/alpha_phi) * delta so the
    corrected pressure equals -k_c/alpha_phi exactly; the deviator is
    untouched.  Identity when phi = 0 (no tension cutoff).
    """
    sigma = np.asarray(sigma, dtype=float)
    if mat.alpha_phi == 0.0:
        return sigma.copy()
    p = pressure(sigma)
    shift = np.where(p < mat.apex_pressure, p - mat.apex_pressure, 0.0)
    out = sigma.copy()
    for comp in range(3):
        out[..., comp] += shift
    return out


def deviatoric_scaleback(sigma, mat: MaterialParams):
    """Scale the deviator onto the yield surface, pressure unchanged.

    Expects the apex correction to have run first so alpha_phi*p + k_c >= 0.
    """
    sigma = np.asarray(sigma, dtype=float)
    p = pressure(sigma)
    tau = deviator(sigma)
    sqrt_j2 = np.sqrt(j2_invariant(tau))
    limit = mat.alpha_phi * p + mat.k_c
    needs = sqrt_j2 > limit
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = np.where(needs & (sqrt_j2 > 0.0), limit / sqrt_j2, 1.0)
    out = np.empty_like(sigma)
    for comp in range(3):
        out[..., comp] = -p + xi * tau[..., comp]
    out[..., 3] = xi * tau[..., 3]
    return out


def scale_back(sigma, mat: MaterialParams):
    """Two-stage return: apex pressure correction, then deviatoric scaling."""
    return deviatoric_scaleback(apex_pressure_correction(sigma, mat), mat)


def effective_plastic_strain_increment(lam_rate, sigma, mat: MaterialParams, dt):
    """Von Mises-equivalent plastic strain increment dt*sqrt(2/3 ep:ep).

    The plastic strain rate tensor is lam * dQ/dsigma with
    dQ/dsigma = tau/(2 sqrt(J2)) + alpha_psi/3 * delta, which contracts to
    lam * sqrt(1/2 + alpha_psi^2/3); the accumulation is therefore
    monotonic by the lambda clamp.
    """
    lam = np.asarray(lam_rate, dtype=float)
    factor = math.sqrt(2.0 / 3.0 * (0.5 + mat.alpha_psi**2 / 3.0))
    return dt * lam * factor


def update_stress(sigma_base, sigma_eval, strain_rate, spin_xy, mat: MaterialParams, dt):
    """One integration substep sigma_base + dt * rate(sigma_eval), scaled back.

    ``sigma_eval`` is the state the rate is evaluated at (equal to
    sigma_base for the predictor, the predicted midpoint for the corrector).
    The plastic gate tests the elastic trial built from sigma_base.  Returns
    (sigma_new, lam_rate, d_eps_bar_p).
    """
    sigma_base = np.asarray(sigma_base, dtype=float)
    rate_e = elastic_stress_rate(sigma_eval, strain_rate, spin_xy, mat)
    trial = sigma_base + dt * rate_e
    active = yield_function(pressure(trial), j2_invariant(deviator(trial)), mat) >= 0.0
    lam = plastic_multiplier_rate(sigma_eval, strain_rate, mat, active=active)
    sigma_new = trial.copy()
    if np.any(lam > 0.0):
        tau = deviator(sigma_eval)
        sqrt_j2 = np.sqrt(j2_invariant(tau))
        safe = sqrt_j2 > _SQRT_J2_FLOOR * max(mat.k_c, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(safe, mat.G / sqrt_j2, 0.0)
        for comp in range(3):
            sigma_new[..., comp] -= dt * lam * (mat.K * mat.alpha_psi + scale * tau[..., comp])
        sigma_new[..., 3] -= dt * lam * scale * tau[..., 3]
    sigma_new = scale_back(sigma_new, mat)
    d_eps = effective_plastic_strain_increment(lam, sigma_eval, mat, dt)
    return sigma_new, lam, d_eps
