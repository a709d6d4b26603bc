# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled pair-loop core: rate sums and knot adaptation.

Same signatures and semantics as py_backend; per-particle reductions run in
neighbor-list order, so results are deterministic and agree with the numpy
fallback to round-off.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

IS_COMPILED = True


cdef inline double _w_raw(double a, double b, double q) nogil:
    if q < a:
        return ((a + b) * q * q * q - 3.0 * a * b * q * q + a * a * b * b) \
            / (a * a * b * (a + b))
    if q < b:
        return (b - q) * (b - q) * (b - q) / (b * (b * b - a * a))
    return 0.0


cdef inline double _dw_raw(double a, double b, double q) nogil:
    if q < a:
        return (3.0 * (a + b) * q * q - 6.0 * a * b * q) / (a * a * b * (a + b))
    if q < b:
        return -3.0 * (b - q) * (b - q) / (b * (b * b - a * a))
    return 0.0


def compute_rates(
    double[:, ::1] pos, double[:, ::1] vel, double[::1] rho, double[::1] m,
    double[:, ::1] sigma, unsigned char[::1] kind, double[::1] a_knot,
    double[::1] alpha_c,
    long long[::1] indptr, long long[::1] indices,
    double h, double b,
    double gamma1, double gamma2, double eps_visc, double c_sound,
    double gx, double gy,
    double[:, ::1] dist_seg, int[::1] wall_seg, double[::1] wall_dist,
    double chi_max,
    double[:, ::1] as_R, double as_wref, double as_n,
):
    cdef Py_ssize_t n = pos.shape[0]
    drho_np = np.zeros(n)
    dv_np = np.zeros((n, 2))
    de_np = np.zeros(n)
    deps_np = np.zeros((n, 3))
    domega_np = np.zeros(n)
    dv_bnd_np = np.zeros((n, 2))
    cdef double[::1] drho = drho_np
    cdef double[:, ::1] dv = dv_np
    cdef double[::1] de = de_np
    cdef double[:, ::1] deps = deps_np
    cdef double[::1] domega = domega_np
    cdef double[:, ::1] dv_bnd = dv_bnd_np

    cdef Py_ssize_t i, j, k
    cdef double rx, ry, dist, q, a_i, alpha, grad_c, gradx, grady
    cdef double chi, zeta, d_real, d_ghost
    cdef double vijx, vijy, sxx_j, syy_j, sxy_j
    cdef double inv_i, inv_j, txx, tyy, txy, vdotx, mu, pi_ij, mj, vol
    cdef double f, sxx_as, syy_as, sxy_as, accx, accy
    cdef double use_as = 1.0 if as_wref > 0.0 else 0.0
    cdef bint bnd

    with nogil:
        for i in range(n):
            if kind[i] != 0:
                continue
            a_i = a_knot[i]
            alpha = alpha_c[i]
            inv_i = 1.0 / (rho[i] * rho[i])
            for k in range(indptr[i], indptr[i + 1]):
                j = indices[k]
                rx = pos[i, 0] - pos[j, 0]
                ry = pos[i, 1] - pos[j, 1]
                dist = (rx * rx + ry * ry) ** 0.5
                q = dist / h
                if q >= b:
                    continue
                if dist > 1e-14 * h:
                    grad_c = alpha * _dw_raw(a_i, b, q) / (h * dist)
                else:
                    grad_c = 0.0
                gradx = grad_c * rx
                grady = grad_c * ry

                bnd = kind[j] == 1
                if bnd:
                    d_ghost = wall_dist[j]
                    d_real = dist_seg[wall_seg[j], i]
                    if d_real > 0.0:
                        zeta = d_ghost / d_real
                        chi = 1.0 + zeta
                        if chi > chi_max:
                            chi = chi_max
                    else:
                        chi = chi_max
                    vijx = chi * vel[i, 0]
                    vijy = chi * vel[i, 1]
                    sxx_j = sigma[i, 0]
                    syy_j = sigma[i, 1]
                    sxy_j = sigma[i, 3]
                else:
                    vijx = vel[i, 0] - vel[j, 0]
                    vijy = vel[i, 1] - vel[j, 1]
                    sxx_j = sigma[j, 0]
                    syy_j = sigma[j, 1]
                    sxy_j = sigma[j, 3]

                inv_j = 1.0 / (rho[j] * rho[j])
                txx = sigma[i, 0] * inv_i + sxx_j * inv_j
                tyy = sigma[i, 1] * inv_i + syy_j * inv_j
                txy = sigma[i, 3] * inv_i + sxy_j * inv_j

                vdotx = vijx * rx + vijy * ry
                if vdotx < 0.0:
                    mu = h * vdotx / (dist * dist + eps_visc * h * h)
                    pi_ij = (-gamma1 * c_sound * mu + gamma2 * mu * mu) \
                        / (0.5 * (rho[i] + rho[j]))
                else:
                    pi_ij = 0.0
                txx = txx - pi_ij
                tyy = tyy - pi_ij

                if use_as > 0.0:
                    f = (alpha * _w_raw(a_i, b, q) / as_wref) ** as_n
                    if bnd:
                        sxx_as = 2.0 * as_R[i, 0] * f
                        syy_as = 2.0 * as_R[i, 1] * f
                        sxy_as = 2.0 * as_R[i, 2] * f
                    else:
                        sxx_as = (as_R[i, 0] + as_R[j, 0]) * f
                        syy_as = (as_R[i, 1] + as_R[j, 1]) * f
                        sxy_as = (as_R[i, 2] + as_R[j, 2]) * f
                else:
                    sxx_as = 0.0
                    syy_as = 0.0
                    sxy_as = 0.0

                mj = m[j]
                accx = mj * ((txx + sxx_as) * gradx + (txy + sxy_as) * grady)
                accy = mj * ((txy + sxy_as) * gradx + (tyy + syy_as) * grady)
                dv[i, 0] += accx
                dv[i, 1] += accy
                if bnd:
                    dv_bnd[i, 0] += accx
                    dv_bnd[i, 1] += accy

                drho[i] += mj * (vijx * gradx + vijy * grady)
                de[i] += -0.5 * mj * (vijx * (txx * gradx + txy * grady)
                                      + vijy * (txy * gradx + tyy * grady))

                vol = mj / rho[j]
                deps[i, 0] += vol * (-vijx) * gradx
                deps[i, 1] += vol * (-vijy) * grady
                deps[i, 2] += 0.5 * vol * ((-vijx) * grady + (-vijy) * gradx)
                domega[i] += 0.5 * vol * ((-vijx) * grady - (-vijy) * gradx)

            dv[i, 0] += gx
            dv[i, 1] += gy

    return drho_np, dv_np, de_np, deps_np, domega_np, dv_bnd_np


def adapt_knots(
    double[:, ::1] pos, double[::1] p, double[::1] r_imm,
    long long[::1] indptr, long long[::1] indices, unsigned char[::1] kind,
    double b, double h, double eta, double a_compression,
):
    cdef Py_ssize_t n = pos.shape[0]
    a_np = np.ones(n)
    zone_np = np.zeros(n, dtype=np.uint8)
    cdef double[::1] a_new = a_np
    cdef unsigned char[::1] zone = zone_np

    cdef Py_ssize_t i, j, k
    cdef double rx, ry, dist, reach, half
    cdef bint tension

    half = 0.5 * b * h
    with nogil:
        for i in range(n):
            if kind[i] != 0:
                continue
            reach = r_imm[i] * (1.0 + eta)
            tension = False
            for k in range(indptr[i], indptr[i + 1]):
                j = indices[k]
                if p[j] >= 0.0:
                    continue
                rx = pos[i, 0] - pos[j, 0]
                ry = pos[i, 1] - pos[j, 1]
                dist = (rx * rx + ry * ry) ** 0.5
                if dist <= reach:
                    tension = True
                    break
            if tension:
                zone[i] = 1
                if r_imm[i] < half:
                    a_new[i] = b * r_imm[i] / (b * h - r_imm[i])
                else:
                    a_new[i] = b
            else:
                zone[i] = 0
                a_new[i] = a_compression

    return a_np, zone_np
