"""Vectorized numpy implementation of the hot per-pair kernels.

Semantics match the compiled backend bit-for-bit up to summation order: all
reductions here use np.bincount over pair arrays, which is deterministic for
a fixed neighbor table.  Sums are gather-form: every pair term is weighted by
particle i's own kernel shape (a_knot[i]).
"""

from __future__ import annotations

import numpy as np

IS_COMPILED = False


def _kernel_w_dw(a, b, q):
    """Piecewise cubic value and parametric derivative for per-pair knots a.

    Valid for 0 < a <= b; when a == b the second branch has an empty domain
    and its (invalid) values are masked out.
    """
    a2b = a * a * b * (a + b)
    w1 = ((a + b) * q**3 - 3.0 * a * b * q**2 + a * a * b * b) / a2b
    d1 = (3.0 * (a + b) * q**2 - 6.0 * a * b * q) / a2b
    den2 = b * (b * b - a * a)
    with np.errstate(divide="ignore", invalid="ignore"):
        bq = b - q
        w2 = bq**3 / den2
        d2 = -3.0 * bq**2 / den2
    in1 = q < a
    in2 = ~in1 & (q < b)
    w = np.where(in1, w1, np.where(in2, w2, 0.0))
    dw = np.where(in1, d1, np.where(in2, d2, 0.0))
    return w, dw


def compute_rates(
    pos, vel, rho, m, sigma, kind, a_knot, alpha_c,
    indptr, indices,
    h, b,
    gamma1, gamma2, eps_visc, c_sound,
    gx, gy,
    dist_seg, wall_seg, wall_dist, chi_max,
    as_R, as_wref, as_n,
):
    """All neighbor-sum rates in one sweep.

    Returns (drho, dv, de, deps, domega, dv_bnd): density, velocity, energy,
    strain (xx, yy, xy) and spin (xy) rates, plus the boundary-only part of
    dv for the momentum bookkeeping.  Rows for boundary particles stay zero.
    ``dist_seg`` is (n_seg, N): current perpendicular distance of every
    particle to each wall segment.  ``as_wref <= 0`` disables the artificial
    stress term.
    """
    n = pos.shape[0]
    counts = np.diff(indptr)
    ii = np.repeat(np.arange(n, dtype=np.int64), counts)
    jj = indices
    live = kind[ii] == 0
    ii, jj = ii[live], jj[live]

    rx = pos[ii, 0] - pos[jj, 0]
    ry = pos[ii, 1] - pos[jj, 1]
    dist = np.hypot(rx, ry)
    q = dist / h
    inside = q < b
    ii, jj, rx, ry, dist, q = ii[inside], jj[inside], rx[inside], ry[inside], dist[inside], q[inside]

    a_pair = a_knot[ii]
    w_raw, dw_raw = _kernel_w_dw(a_pair, b, q)
    alpha = alpha_c[ii]
    with np.errstate(divide="ignore", invalid="ignore"):
        grad_c = np.where(dist > 1e-14 * h, alpha * dw_raw / (h * dist), 0.0)
    gradx = grad_c * rx
    grady = grad_c * ry

    is_bnd = kind[jj] == 1
    # fictitious relative velocity against wall ghosts: v_ij = chi * v_i
    chi = np.ones_like(dist)
    if np.any(is_bnd):
        seg = wall_seg[jj[is_bnd]]
        d_real = dist_seg[seg, ii[is_bnd]]
        d_ghost = wall_dist[jj[is_bnd]]
        with np.errstate(divide="ignore", invalid="ignore"):
            zeta = np.where(d_real > 0.0, d_ghost / d_real, np.inf)
        chi[is_bnd] = np.minimum(chi_max, 1.0 + zeta)
    vijx = np.where(is_bnd, chi * vel[ii, 0], vel[ii, 0] - vel[jj, 0])
    vijy = np.where(is_bnd, chi * vel[ii, 1], vel[ii, 1] - vel[jj, 1])

    # wall reaction uses the real particle's stress mirrored onto the ghost
    sxx_j = np.where(is_bnd, sigma[ii, 0], sigma[jj, 0])
    syy_j = np.where(is_bnd, sigma[ii, 1], sigma[jj, 1])
    sxy_j = np.where(is_bnd, sigma[ii, 3], sigma[jj, 3])

    inv_rho2_i = 1.0 / rho[ii] ** 2
    inv_rho2_j = 1.0 / rho[jj] ** 2
    txx = sigma[ii, 0] * inv_rho2_i + sxx_j * inv_rho2_j
    tyy = sigma[ii, 1] * inv_rho2_i + syy_j * inv_rho2_j
    txy = sigma[ii, 3] * inv_rho2_i + sxy_j * inv_rho2_j

    vdotx = vijx * rx + vijy * ry
    approaching = vdotx < 0.0
    mu = h * vdotx / (dist * dist + eps_visc * h * h)
    pi_ij = np.where(approaching, (-gamma1 * c_sound * mu + gamma2 * mu * mu)
                     / (0.5 * (rho[ii] + rho[jj])), 0.0)
    txx = txx - pi_ij
    tyy = tyy - pi_ij

    if as_wref > 0.0:
        f = (alpha * w_raw / as_wref) ** as_n
        rxx_j = np.where(is_bnd, as_R[ii, 0], as_R[jj, 0])
        ryy_j = np.where(is_bnd, as_R[ii, 1], as_R[jj, 1])
        rxy_j = np.where(is_bnd, as_R[ii, 2], as_R[jj, 2])
        sxx_as = (as_R[ii, 0] + rxx_j) * f
        syy_as = (as_R[ii, 1] + ryy_j) * f
        sxy_as = (as_R[ii, 2] + rxy_j) * f
    else:
        sxx_as = syy_as = sxy_as = 0.0

    mj = m[jj]
    accx = mj * ((txx + sxx_as) * gradx + (txy + sxy_as) * grady)
    accy = mj * ((txy + sxy_as) * gradx + (tyy + syy_as) * grady)

    drho_pair = mj * (vijx * gradx + vijy * grady)
    # energy rate is work-conjugate to the momentum sum (no artificial stress)
    de_pair = -0.5 * mj * (vijx * (txx * gradx + txy * grady)
                           + vijy * (txy * gradx + tyy * grady))

    vol = mj / rho[jj]
    dexx_pair = vol * (-vijx) * gradx
    deyy_pair = vol * (-vijy) * grady
    dexy_pair = 0.5 * vol * ((-vijx) * grady + (-vijy) * gradx)
    domg_pair = 0.5 * vol * ((-vijx) * grady - (-vijy) * gradx)

    def acc(values):
        return np.bincount(ii, weights=values, minlength=n)

    drho = acc(drho_pair)
    de = acc(de_pair)
    dv = np.column_stack([acc(accx), acc(accy)])
    deps = np.column_stack([acc(dexx_pair), acc(deyy_pair), acc(dexy_pair)])
    domega = acc(domg_pair)
    dv_bnd = np.column_stack([
        np.bincount(ii[is_bnd], weights=accx[is_bnd], minlength=n),
        np.bincount(ii[is_bnd], weights=accy[is_bnd], minlength=n),
    ])

    real = kind == 0
    dv[real, 0] += gx
    dv[real, 1] += gy
    return drho, dv, de, deps, domega, dv_bnd


def adapt_knots(pos, p, r_imm, indptr, indices, kind, b, h, eta, a_compression):
    """Pressure-zone classification and knot update for every real particle.

    Immediate neighbors are those within r_imm[i]*(1 + eta) of particle i
    (wall ghosts participate with their stored pressure, which stays zero).
    Returns (a_new, tension_zone); rows for boundary particles keep a = 1.
    """
    n = pos.shape[0]
    counts = np.diff(indptr)
    ii = np.repeat(np.arange(n, dtype=np.int64), counts)
    jj = indices
    live = kind[ii] == 0
    ii, jj = ii[live], jj[live]
    dist = np.hypot(pos[ii, 0] - pos[jj, 0], pos[ii, 1] - pos[jj, 1])
    immediate = dist <= r_imm[ii] * (1.0 + eta)
    tension_pair = immediate & (p[jj] < 0.0)
    zone = np.bincount(ii[tension_pair], minlength=n) > 0

    half = 0.5 * b * h
    with np.errstate(divide="ignore", invalid="ignore"):
        a_tension = np.where(r_imm < half, b * r_imm / (b * h - r_imm), b)
    a_new = np.where(zone, a_tension, a_compression)
    a_new[kind == 1] = 1.0
    return a_new, zone.astype(np.uint8)
