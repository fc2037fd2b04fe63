import cmath
import math

import numpy as np
import pytest

from zetaflow.errors import NonDecaying
from zetaflow.periods import (PeriodConfig, exponential_period, stokes_factor,
                              stokes_matrix)
from zetaflow.potential import HoloPotential, Phase, find_critical_points
from zetaflow.solitons import count_solitons


AIRY = HoloPotential(1, {(3,): 1 / 3, (1,): -1.0})
A3 = HoloPotential(1, {(4,): 0.25, (1,): -1.0})
A4PERT = HoloPotential(1, {(5,): 0.2, (2,): 0.11 - 0.07j, (1,): -1.0 + 0.13j})


def _ray_quadrature(W, base, angles, R=8.0, panels=400, order=12):
    """Independent oracle: integrate e^{W(z)} along straight rays from base.

    Contour runs in from base + R e^{i angles[0]} and out to
    base + R e^{i angles[1]}; plain composite Gauss-Legendre, no reuse of the
    package's contour machinery.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    total = 0j
    for ang, sgn in ((angles[0], -1), (angles[1], 1)):
        d = cmath.exp(1j * ang)
        acc = 0j
        for k in range(panels):
            a, b = R * k / panels, R * (k + 1) / panels
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            acc += half * sum(
                wk * cmath.exp(W(base + (mid + half * xk) * d)) * d
                for xk, wk in zip(x, w))
        total += sgn * acc
    return total


def test_gaussian_period():
    W = HoloPotential(1, {(2,): -0.5})
    p = find_critical_points(W)[0]
    pv = exponential_period(W, p, Phase(1), 1.0)
    target = math.sqrt(2 * math.pi)
    assert min(abs(pv.value - target), abs(pv.value + target)) < 1e-8
    assert pv.est_error < 1e-8


def test_airy_period_against_straight_contour():
    cps = find_critical_points(AIRY)
    p = next(c for c in cps if c.z.real > 0)
    zeta = Phase(cmath.exp(0.3j))
    pv = exponential_period(AIRY, p, zeta, 1.0)
    # thimble through z=1 leaves vertically and bends into the decay sectors
    # around angles -pi/3 and +pi/3 of e^{z^3/3}; integrand is entire so the
    # straightened contour gives the same value
    oracle = _ray_quadrature(AIRY, p.z, (-math.pi / 3, math.pi / 3))
    assert min(abs(pv.value - oracle), abs(pv.value + oracle)) < 1e-8 * abs(oracle)


def test_stationary_phase_small_u():
    cps = find_critical_points(AIRY)
    p = next(c for c in cps if c.z.real > 0)
    zeta = Phase(cmath.exp(0.3j))
    u = 0.05 * complex(zeta)
    pv = exponential_period(AIRY, p, zeta, u)
    hess = AIRY.hessian(p.position)[0, 0]
    lead = abs(cmath.exp(p.value / u)) * math.sqrt(2 * math.pi * abs(u) / abs(hess))
    assert abs(pv.value) == pytest.approx(lead, rel=0.05)


def test_quadrature_order_consistency():
    W = HoloPotential(1, {(2,): -0.5})
    p = find_critical_points(W)[0]
    a = exponential_period(W, p, Phase(1), 1.0, PeriodConfig(gl_order=12))
    b = exponential_period(W, p, Phase(1), 1.0, PeriodConfig(gl_order=20))
    assert abs(a.value - b.value) < 1e-10 * abs(b.value)


def test_nondecaying_rejected():
    W = HoloPotential(1, {(2,): -0.5})
    p = find_critical_points(W)[0]
    with pytest.raises(NonDecaying):
        exponential_period(W, p, Phase(1), -1.0)     # Re(zeta/u) < 0
    with pytest.raises(NonDecaying):
        exponential_period(W, p, Phase(1), 1j)       # Re(zeta/u) = 0
    with pytest.raises(NonDecaying):
        exponential_period(W, p, Phase(1), 0.0)


def test_stokes_entries_match_soliton_counts():
    for W in (AIRY, A3, A4PERT):
        cps = find_critical_points(W)
        mat = stokes_matrix(W, cps)
        for f in mat["factors"]:
            p = cps[f["source"]]
            q = cps[f["target"]]
            cnt, _ = count_solitons(W, p, q, critical_points=cps)
            assert abs(f["entry"]) == abs(cnt), (W.coefficients, f)


def test_stokes_factor_both_orders():
    # each ordering of the pair probes the opposite soliton ray (+-1 for the
    # cubic); both jumps are unit entries
    cps = find_critical_points(AIRY)
    p = next(c for c in cps if c.z.real > 0)
    q = next(c for c in cps if c.z.real < 0)
    f1 = stokes_factor(W=AIRY, p=p, q=q, critical_points=cps)
    f2 = stokes_factor(W=AIRY, p=q, q=p, critical_points=cps)
    assert abs(f1.entry) == 1 and abs(f2.entry) == 1
    assert complex(f1.ray_phase) == pytest.approx(-complex(f2.ray_phase))
