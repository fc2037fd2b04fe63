import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetaflow.errors import CoincidentValues, DegenerateCritical
from zetaflow.potential import (BpsMatrix, HoloPotential, Phase,
                                find_critical_points, soliton_phase)


def test_phase_unimodular():
    Phase(1j)
    Phase(cmath.exp(0.7j))
    with pytest.raises(ValueError):
        Phase(2.0)
    assert complex(Phase(1)) == 1 + 0j
    assert isinstance(complex(Phase(1)), complex)


def test_quadratic_single_critical_point():
    W = HoloPotential(1, {(2,): 1.0})
    cps = find_critical_points(W)
    assert len(cps) == 1
    assert abs(cps[0].z) < 1e-12
    assert abs(cps[0].value) < 1e-12
    assert abs(cps[0].hessian_det - 2.0) < 1e-12


def test_airy_critical_points():
    W = HoloPotential(1, {(3,): 1 / 3, (1,): -1.0})
    cps = find_critical_points(W)
    zs = sorted(c.z.real for c in cps)
    assert zs == pytest.approx([-1.0, 1.0], abs=1e-12)
    vals = {round(c.z.real): c.value for c in cps}
    assert vals[-1] == pytest.approx(2 / 3, abs=1e-12)
    assert vals[1] == pytest.approx(-2 / 3, abs=1e-12)


def test_cubic_degenerate():
    with pytest.raises(DegenerateCritical):
        find_critical_points(HoloPotential(1, {(3,): 1.0}))


def test_coincident_values_rejected():
    # W = z^4/4 - z^2/2 has critical values -1/4 at both z = +-1
    with pytest.raises(CoincidentValues):
        find_critical_points(HoloPotential(1, {(4,): 0.25, (2,): -0.5}))


def test_soliton_phase_formula():
    mk = lambda v, i: type("P", (), {"value": v, "id": i})()
    assert complex(soliton_phase(mk(1, 0), mk(0, 1))) == pytest.approx(1)
    assert complex(soliton_phase(mk(-2 / 3, 0), mk(2 / 3, 1))) == pytest.approx(-1)
    assert complex(soliton_phase(mk(1j, 0), mk(0, 1))) == pytest.approx(1j)
    # antisymmetry
    a, b = mk(0.3 + 0.4j, 0), mk(-0.1, 1)
    assert complex(soliton_phase(a, b)) == pytest.approx(-complex(soliton_phase(b, a)))
    with pytest.raises(CoincidentValues):
        soliton_phase(mk(1.0, 0), mk(1.0, 1))


def test_potential_canonical_and_json_roundtrip():
    W = HoloPotential(1, {(3,): 1 / 3, (1,): -1.0, (2,): 0.0})
    assert (2,) not in W.coefficients
    W2 = HoloPotential.from_json(W.to_json())
    assert W2.coefficients == W.coefficients
    assert W2.num_vars == W.num_vars


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(7)
    for _ in range(3):
        coeffs = {(k,): complex(*rng.normal(size=2)) for k in range(1, 6)}
        W = HoloPotential(1, coeffs)
        zeta = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        inv = 1.0 / zeta
        for _ in range(100):
            z = complex(*rng.normal(size=2))
            g = (inv * W.gradient((z,))[0]).conjugate()
            h = 1e-6
            fx = ((inv * W((z + h,))).real - (inv * W((z - h,))).real) / (2 * h)
            fy = ((inv * W((z + 1j * h,))).real - (inv * W((z - 1j * h,))).real) / (2 * h)
            num = complex(fx, fy)
            assert abs(num - g) <= 1e-6 * (1 + abs(g))


def test_bps_matrix_invariants():
    m = BpsMatrix(3)
    m.set_pair(0, 1, 2, 1j)
    m.set_pair(1, 2, -1, -1.0)
    m.check_invariants()
    assert m.mu[1, 0] == -2
    d = m.to_json()
    assert d["mu"][0][1] == 2


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)),
                min_size=2, max_size=5))
def test_critical_point_residuals(pairs):
    coeffs = {(k + 1,): complex(a, b) for k, (a, b) in enumerate(pairs)}
    coeffs[(len(pairs) + 1,)] = 1.0       # pin the leading term
    W = HoloPotential(1, coeffs)
    try:
        cps = find_critical_points(W)
    except (DegenerateCritical, CoincidentValues):
        return
    for p in cps:
        assert abs(W.gradient(p.position)[0]) < 1e-8 * (1 + abs(p.z) ** W.degree)
        assert abs(W(p.position) - p.value) < 1e-10 * (1 + abs(p.value))


def test_find_critical_points_n2_coverage():
    from zetaflow.potential import find_critical_points_n2, RootSearchConfig
    # W = x^2/2 + y^2/2 + x y^2 has critical points at the origin and
    # (-1/2, +-1/sqrt(2)... ) -- just check reporting structure and residuals
    W = HoloPotential(2, {(2, 0): 0.5, (0, 2): 0.5, (1, 2): 1.0})
    pts, coverage = find_critical_points_n2(W, RootSearchConfig())
    assert coverage["complete"] is False
    assert any(max(abs(c) for c in p) < 1e-8 for p in pts)
    for p in pts:
        assert max(abs(g) for g in W.gradient(tuple(p))) < 1e-8
