"""Pure-Python reference implementation of the hot integration kernels.

Mirrors the semantics of the compiled extension ``_speedups`` exactly; the
compiled module is preferred at import time when available.  Both kernels are
adaptive Dormand-Prince RK5(4) integrators specialised to scalar complex ODEs:

* ``flow_polynomial_1d`` -- downward gradient flow of Re(W/zeta) for a
  polynomial W on C, with capture/escape/arclength termination.
* ``trace_quadratic`` -- foliation line of a quadratic differential p(z)dz^2
  at a fixed phase, with continuous square-root sheet tracking and
  per-turning-point closest-approach records.
"""

import cmath

import numpy as np

# termination codes shared with the compiled kernel
FLOW_CAPTURED = 0
FLOW_ESCAPED = 1
FLOW_MAXLEN = 2
FLOW_STEPFAIL = 3

TRAJ_HIT = 0
TRAJ_ESCAPED = 1
TRAJ_MAXLEN = 2
TRAJ_STEPFAIL = 3

# Dormand-Prince 5(4) tableau
_DP_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_DP_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
)
_DP_B5 = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0,
          -2187.0 / 6784.0, 11.0 / 84.0, 0.0)
_DP_B4 = (5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0,
          -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0)


def _polyval(coeffs, z):
    # coeffs lowest degree first
    acc = 0.0 + 0.0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def flow_polynomial_1d(dw_coeffs, zeta, z0, crit, capture_radius,
                       escape_radius, max_arclength, rtol=1e-10, atol=1e-12,
                       h0=1e-3, max_steps=200000):
    """Integrate dz/dx = -conj(W'(z)/zeta) from z0.

    Parameters
    ----------
    dw_coeffs : array of complex
        Coefficients of W', lowest degree first.
    zeta : complex
        Unit phase.
    crit : array of complex
        Capture centers (critical points of W).
    Returns
    -------
    samples : ndarray of complex
    status : int
        One of FLOW_CAPTURED/FLOW_ESCAPED/FLOW_MAXLEN/FLOW_STEPFAIL.
    captured : int
        Index into ``crit`` if captured, else -1.
    arclength : float
    """
    dw = [complex(c) for c in dw_coeffs]
    cps = [complex(c) for c in crit]
    inv_zeta = 1.0 / complex(zeta)

    def rhs(z):
        return -(inv_zeta * _polyval(dw, z)).conjugate()

    z = complex(z0)
    h = float(h0)
    samples = [z]
    arclen = 0.0
    status = FLOW_MAXLEN
    captured = -1
    k = [0j] * 7
    k[0] = rhs(z)
    steps = 0
    while steps < max_steps:
        steps += 1
        if h < 1e-14:
            status = FLOW_STEPFAIL
            break
        for i in range(1, 7):
            acc = 0j
            ai = _DP_A[i]
            for j in range(i):
                acc += ai[j] * k[j]
            k[i] = rhs(z + h * acc)
        z5 = z + h * sum(b * ki for b, ki in zip(_DP_B5, k))
        z4 = z + h * sum(b * ki for b, ki in zip(_DP_B4, k))
        err = abs(z5 - z4)
        tol = atol + rtol * max(abs(z), abs(z5))
        if err > tol:
            h *= max(0.2, 0.9 * (tol / err) ** 0.2)
            k[0] = rhs(z)
            continue
        dz = z5 - z
        arclen += abs(dz)
        z = z5
        samples.append(z)
        k[0] = k[6] if _DP_C[6] == 1.0 else rhs(z)  # FSAL
        # termination checks
        done = False
        for idx, c in enumerate(cps):
            if abs(z - c) < capture_radius:
                status = FLOW_CAPTURED
                captured = idx
                done = True
                break
        if not done and abs(z) > escape_radius:
            status = FLOW_ESCAPED
            done = True
        if not done and arclen > max_arclength:
            status = FLOW_MAXLEN
            done = True
        if done:
            break
        if err > 0.0:
            h *= min(5.0, 0.9 * (tol / err) ** 0.2)
        else:
            h *= 5.0
    else:
        status = FLOW_MAXLEN
    return np.asarray(samples, dtype=np.complex128), status, captured, arclen


def trace_quadratic(p_coeffs, zeta, z0, sqrt0, tps, collision_radius,
                    escape_radius, t_max, rtol=1e-10, atol=1e-12, h0=1e-3,
                    max_steps=200000, record=True):
    """Integrate dz/dt = zeta / sqrt(p(z)) with continuous sheet tracking.

    ``sqrt0`` fixes the branch of sqrt(p) at z0.  At every evaluation the
    principal square root is flipped, if needed, to the value closest to the
    branch carried from the step start; steps are capped at half the distance
    to the nearest turning point so the sheet can never jump.

    Returns
    -------
    samples : ndarray of complex (empty if record=False)
    status, hit : int, int
    t_end : float
    min_dist, min_side, t_at_min : per-turning-point closest approach data
    """
    pc = [complex(c) for c in p_coeffs]
    zt = complex(zeta)
    tp = [complex(c) for c in tps]
    ntp = len(tp)

    def rhs(z, sref):
        r = cmath.sqrt(_polyval(pc, z))
        if abs(r - sref) > abs(r + sref):
            r = -r
        return zt / r, r

    z = complex(z0)
    sref = complex(sqrt0)
    t = 0.0
    h = float(h0)
    samples = [z] if record else []
    min_dist = [abs(z - c) for c in tp]
    min_side = [0] * ntp
    t_at_min = [0.0] * ntp
    status = TRAJ_MAXLEN
    hit = -1
    k = [0j] * 7
    steps = 0
    while steps < max_steps:
        steps += 1
        dmin = min(abs(z - c) for c in tp) if ntp else escape_radius
        hcap = max(0.5 * dmin / (abs(zt) / max(abs(sref), 1e-300)), 1e-13) \
            if abs(sref) > 0 else 1e-13
        if h > hcap:
            h = hcap
        if h < 1e-13:
            status = TRAJ_STEPFAIL
            break
        k[0], _ = rhs(z, sref)
        bad = False
        for i in range(1, 7):
            acc = 0j
            ai = _DP_A[i]
            for j in range(i):
                acc += ai[j] * k[j]
            k[i], _ = rhs(z + h * acc, sref)
        z5 = z + h * sum(b * ki for b, ki in zip(_DP_B5, k))
        z4 = z + h * sum(b * ki for b, ki in zip(_DP_B4, k))
        err = abs(z5 - z4)
        tol = atol + rtol * max(abs(z), abs(z5))
        if err > tol or bad:
            h *= max(0.2, 0.9 * (tol / max(err, 1e-300)) ** 0.2)
            continue
        _, snew = rhs(z5, sref)
        z = z5
        sref = snew
        t += h
        if record:
            samples.append(z)
        v = zt / sref
        done = False
        for j in range(ntp):
            d = abs(z - tp[j])
            if d < min_dist[j]:
                min_dist[j] = d
                w = tp[j] - z
                cr = v.real * w.imag - v.imag * w.real
                min_side[j] = 1 if cr > 0 else (-1 if cr < 0 else 0)
                t_at_min[j] = t
            if d < collision_radius:
                status = TRAJ_HIT
                hit = j
                done = True
                break
        if not done and abs(z) > escape_radius:
            status = TRAJ_ESCAPED
            done = True
        if not done and t >= t_max:
            status = TRAJ_MAXLEN
            done = True
        if done:
            break
        if err > 0.0:
            h *= min(5.0, 0.9 * (tol / err) ** 0.2)
        else:
            h *= 5.0
    else:
        status = TRAJ_MAXLEN
    return (np.asarray(samples, dtype=np.complex128), status, hit, t,
            np.asarray(min_dist), np.asarray(min_side, dtype=np.int64),
            np.asarray(t_at_min))
