# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernels (Dormand-Prince RK5(4), scalar complex ODEs).

Semantics identical to ``zetaflow._kernels.pure``; see that module for the
full docstrings.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, fmax, fmin, pow

cdef extern from "complex.h":
    double complex csqrt(double complex)
    double cabs(double complex)
    double complex conj(double complex)

FLOW_CAPTURED = 0
FLOW_ESCAPED = 1
FLOW_MAXLEN = 2
FLOW_STEPFAIL = 3

TRAJ_HIT = 0
TRAJ_ESCAPED = 1
TRAJ_MAXLEN = 2
TRAJ_STEPFAIL = 3

cdef double A21 = 1.0/5.0
cdef double A31 = 3.0/40.0, A32 = 9.0/40.0
cdef double A41 = 44.0/45.0, A42 = -56.0/15.0, A43 = 32.0/9.0
cdef double A51 = 19372.0/6561.0, A52 = -25360.0/2187.0
cdef double A53 = 64448.0/6561.0, A54 = -212.0/729.0
cdef double A61 = 9017.0/3168.0, A62 = -355.0/33.0, A63 = 46732.0/5247.0
cdef double A64 = 49.0/176.0, A65 = -5103.0/18656.0
cdef double B1 = 35.0/384.0, B3 = 500.0/1113.0, B4 = 125.0/192.0
cdef double B5 = -2187.0/6784.0, B6 = 11.0/84.0
cdef double E1 = 35.0/384.0 - 5179.0/57600.0
cdef double E3 = 500.0/1113.0 - 7571.0/16695.0
cdef double E4 = 125.0/192.0 - 393.0/640.0
cdef double E5 = -2187.0/6784.0 + 92097.0/339200.0
cdef double E6 = 11.0/84.0 - 187.0/2100.0
cdef double E7 = -1.0/40.0


cdef inline double complex _polyval(double complex[::1] c, double complex z):
    cdef Py_ssize_t i
    cdef double complex acc = 0
    for i in range(c.shape[0] - 1, -1, -1):
        acc = acc * z + c[i]
    return acc


def flow_polynomial_1d(dw_coeffs, zeta, z0, crit, double capture_radius,
                       double escape_radius, double max_arclength,
                       double rtol=1e-10, double atol=1e-12, double h0=1e-3,
                       long max_steps=200000):
    cdef double complex[::1] dw = np.ascontiguousarray(dw_coeffs, dtype=np.complex128)
    cdef double complex[::1] cps = np.ascontiguousarray(crit, dtype=np.complex128)
    cdef double complex inv_zeta = 1.0 / <double complex>zeta
    cdef double complex z = <double complex>z0
    cdef double h = h0, arclen = 0.0, err, tol
    cdef double complex k1, k2, k3, k4, k5, k6, k7, z5, z4, dz
    cdef long steps = 0
    cdef int status = FLOW_MAXLEN, captured = -1, done
    cdef Py_ssize_t idx, ncp = cps.shape[0]
    out = [complex(z)]

    k1 = -conj(inv_zeta * _polyval(dw, z))
    while steps < max_steps:
        steps += 1
        if h < 1e-14:
            status = FLOW_STEPFAIL
            break
        k2 = -conj(inv_zeta * _polyval(dw, z + h*(A21*k1)))
        k3 = -conj(inv_zeta * _polyval(dw, z + h*(A31*k1 + A32*k2)))
        k4 = -conj(inv_zeta * _polyval(dw, z + h*(A41*k1 + A42*k2 + A43*k3)))
        k5 = -conj(inv_zeta * _polyval(dw, z + h*(A51*k1 + A52*k2 + A53*k3 + A54*k4)))
        k6 = -conj(inv_zeta * _polyval(dw, z + h*(A61*k1 + A62*k2 + A63*k3 + A64*k4 + A65*k5)))
        z5 = z + h*(B1*k1 + B3*k3 + B4*k4 + B5*k5 + B6*k6)
        k7 = -conj(inv_zeta * _polyval(dw, z5))
        err = cabs(h*(E1*k1 + E3*k3 + E4*k4 + E5*k5 + E6*k6 + E7*k7))
        tol = atol + rtol * fmax(cabs(z), cabs(z5))
        if err > tol:
            h *= fmax(0.2, 0.9 * pow(tol / err, 0.2))
            continue
        dz = z5 - z
        arclen += cabs(dz)
        z = z5
        k1 = k7
        out.append(complex(z))
        done = 0
        for idx in range(ncp):
            if cabs(z - cps[idx]) < capture_radius:
                status = FLOW_CAPTURED
                captured = idx
                done = 1
                break
        if not done and cabs(z) > escape_radius:
            status = FLOW_ESCAPED
            done = 1
        if not done and arclen > max_arclength:
            status = FLOW_MAXLEN
            done = 1
        if done:
            break
        if err > 0.0:
            h *= fmin(5.0, 0.9 * pow(tol / err, 0.2))
        else:
            h *= 5.0
    return np.asarray(out, dtype=np.complex128), status, captured, arclen


def trace_quadratic(p_coeffs, zeta, z0, sqrt0, tps, double collision_radius,
                    double escape_radius, double t_max, double rtol=1e-10,
                    double atol=1e-12, double h0=1e-3, long max_steps=200000,
                    record=True):
    cdef double complex[::1] pc = np.ascontiguousarray(p_coeffs, dtype=np.complex128)
    cdef double complex[::1] tp = np.ascontiguousarray(tps, dtype=np.complex128)
    cdef double complex zt = <double complex>zeta
    cdef double complex z = <double complex>z0
    cdef double complex sref = <double complex>sqrt0
    cdef double t = 0.0, h = h0, err, tol, d, dmin, hcap, cr
    cdef double complex k1, k2, k3, k4, k5, k6, k7, z5, r, v, w
    cdef long steps = 0
    cdef int status = TRAJ_MAXLEN, hit = -1, done, do_rec = 1 if record else 0
    cdef Py_ssize_t j, ntp = tp.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] min_dist = np.empty(ntp)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] min_side = np.zeros(ntp, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] t_at_min = np.zeros(ntp)
    for j in range(ntp):
        min_dist[j] = cabs(z - tp[j])
    out = [complex(z)] if do_rec else []

    while steps < max_steps:
        steps += 1
        dmin = escape_radius
        for j in range(ntp):
            d = cabs(z - tp[j])
            if d < dmin:
                dmin = d
        if cabs(sref) > 0:
            hcap = fmax(0.5 * dmin * cabs(sref) / cabs(zt), 1e-13)
        else:
            hcap = 1e-13
        if h > hcap:
            h = hcap
        if h < 1e-13:
            status = TRAJ_STEPFAIL
            break
        r = csqrt(_polyval(pc, z))
        if cabs(r - sref) > cabs(r + sref):
            r = -r
        k1 = zt / r
        r = csqrt(_polyval(pc, z + h*(A21*k1)))
        if cabs(r - sref) > cabs(r + sref):
            r = -r
        k2 = zt / r
        r = csqrt(_polyval(pc, z + h*(A31*k1 + A32*k2)))
        if cabs(r - sref) > cabs(r + sref):
            r = -r
        k3 = zt / r
        r = csqrt(_polyval(pc, z + h*(A41*k1 + A42*k2 + A43*k3)))
        if cabs(r - sref) > cabs(r + sref):
            r = -r
        k4 = zt / r
        r = csqrt(_polyval(pc, z + h*(A51*k1 + A52*k2 + A53*k3 + A54*k4)))
        if cabs(r - sref) > cabs(r + sref):
            r = -r
        k5 = zt / r
        r = csqrt(_polyval(pc, z + h*(A61*k1 + A62*k2 + A63*k3 + A64*k4 + A65*k5)))
        if cabs(r - sref) > cabs(r + sref):
            r = -r
        k6 = zt / r
        z5 = z + h*(B1*k1 + B3*k3 + B4*k4 + B5*k5 + B6*k6)
        r = csqrt(_polyval(pc, z5))
        if cabs(r - sref) > cabs(r + sref):
            r = -r
        k7 = zt / r
        err = cabs(h*(E1*k1 + E3*k3 + E4*k4 + E5*k5 + E6*k6 + E7*k7))
        tol = atol + rtol * fmax(cabs(z), cabs(z5))
        if err > tol:
            h *= fmax(0.2, 0.9 * pow(tol / err, 0.2))
            continue
        z = z5
        sref = r
        t += h
        if do_rec:
            out.append(complex(z))
        v = zt / sref
        done = 0
        for j in range(ntp):
            d = cabs(z - tp[j])
            if d < min_dist[j]:
                min_dist[j] = d
                w = tp[j] - z
                cr = v.real * w.imag - v.imag * w.real
                min_side[j] = 1 if cr > 0 else (-1 if cr < 0 else 0)
                t_at_min[j] = t
            if d < collision_radius:
                status = TRAJ_HIT
                hit = j
                done = 1
                break
        if not done and cabs(z) > escape_radius:
            status = TRAJ_ESCAPED
            done = 1
        if not done and t >= t_max:
            status = TRAJ_MAXLEN
            done = 1
        if done:
            break
        if err > 0.0:
            h *= fmin(5.0, 0.9 * pow(tol / err, 0.2))
        else:
            h *= 5.0
    return (np.asarray(out, dtype=np.complex128), status, hit, t,
            min_dist, min_side, t_at_min)
