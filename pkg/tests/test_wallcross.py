import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from zetaflow.errors import BoundaryRay, TieBreak, ZeroCharge
from zetaflow.wallcross import (KSTransform, TorusAlgebra, action_table,
                                add, apply_ks, choose_positive_basis,
                                first_divergence, gen, mul,
                                phase_ordered_product, unit, wcf_check)


def std_alg(order, sigma=-1):
    return TorusAlgebra(2, ((0, 1), (-1, 0)), order, sigma)


def test_algebra_validation():
    with pytest.raises(ValueError):
        TorusAlgebra(2, ((0, 1), (1, 0)), 4)
    with pytest.raises(ValueError):
        std_alg(0)
    with pytest.raises(ZeroCharge):
        KSTransform((0, 0), 1)


def test_apply_ks_basic():
    alg = std_alg(3)
    T = KSTransform((0, 1), 1)
    # <(0,1),(1,0)> = -1, so x1 -> x1 (1 + x2)^{-1} = x1 (1 - x2 + x2^2 - ...)
    s = apply_ks(T, gen(alg, 0), alg)
    assert s == {(1, 0): Fraction(1), (1, 1): Fraction(-1), (1, 2): Fraction(1)}
    # x2 commutes with itself
    assert apply_ks(T, gen(alg, 1), alg) == gen(alg, 1)


def test_apply_ks_automorphism_on_products():
    alg = std_alg(6)
    T = KSTransform((1, 1), 2)
    a = add(gen(alg, 0), monomial_xy(alg))
    b = gen(alg, 1)
    lhs = apply_ks(T, mul(alg, a, b), alg)
    rhs = mul(alg, apply_ks(T, a, alg), apply_ks(T, b, alg))
    assert lhs == rhs


def monomial_xy(alg):
    return mul(alg, gen(alg, 0), gen(alg, 1))


@settings(max_examples=30, deadline=None)
@given(g=st.tuples(st.integers(0, 2), st.integers(0, 2)).filter(lambda t: sum(t) > 0),
       om=st.integers(-2, 2).filter(bool),
       ea=st.tuples(st.integers(0, 2), st.integers(0, 2)),
       eb=st.tuples(st.integers(0, 2), st.integers(0, 2)))
def test_ks_is_algebra_map(g, om, ea, eb):
    alg = std_alg(8)
    T = KSTransform(g, om)
    from zetaflow.wallcross import monomial
    a, b = monomial(alg, ea), monomial(alg, eb)
    assert apply_ks(T, mul(alg, a, b), alg) == \
        mul(alg, apply_ks(T, a, alg), apply_ks(T, b, alg))


def test_inverse_composition():
    alg = std_alg(10)
    T = KSTransform((1, 1), 1)
    for k in range(2):
        s = apply_ks(T, gen(alg, k), alg)
        # invert with the opposite index
        back = apply_ks(KSTransform((1, 1), -1), s, alg)
        assert back == gen(alg, k)


def test_pentagon_identity():
    # K_{g1} K_{g2} = K_{g2} K_{g1+g2} K_{g1} for <g1,g2> = 1, Omega = 1,
    # sigma = -1; each side is its chamber's decreasing-arg-Z listing
    alg = std_alg(12)
    lhs = action_table([KSTransform((1, 0), 1), KSTransform((0, 1), 1)], alg)
    rhs = action_table([KSTransform((0, 1), 1), KSTransform((1, 1), 1),
                        KSTransform((1, 0), 1)], alg)
    assert first_divergence(lhs, rhs, alg) is None


def test_pentagon_fails_with_wrong_sigma():
    alg = std_alg(6, sigma=1)
    lhs = action_table([KSTransform((1, 0), 1), KSTransform((0, 1), 1)], alg)
    rhs = action_table([KSTransform((0, 1), 1), KSTransform((1, 1), 1),
                        KSTransform((1, 0), 1)], alg)
    assert first_divergence(lhs, rhs, alg) is not None


def test_phase_ordered_product_ordering():
    alg = std_alg(6)
    spec = [((1, 0), 1, 1.0 + 0.1j), ((0, 1), 1, 0.1 + 1.0j),
            ((1, 1), 1, 1.1 + 1.1j)]
    table, factors = phase_ordered_product(spec, alg)
    assert [f.gamma for f in factors] == [(0, 1), (1, 1), (1, 0)]
    # pentagon: the 3-factor product equals the opposite-chamber 2-factor one
    lhs = action_table([KSTransform((1, 0), 1), KSTransform((0, 1), 1)], alg)
    assert first_divergence(table, lhs, alg) is None


def test_boundary_and_tiebreak():
    alg = std_alg(4)
    import cmath
    with pytest.raises(BoundaryRay):
        phase_ordered_product(
            [((1, 0), 1, cmath.exp(1j * (math.pi / 2 + 1e-7 - 1e-10)))], alg)
    with pytest.raises(TieBreak):
        phase_ordered_product([((1, 0), 1, 1 + 1j), ((0, 1), 1, 2 + 2j)], alg)
    # proportional charges sharing a phase are fine
    phase_ordered_product([((1, 0), 1, 1 + 1j), ((2, 0), 1, 2 + 2j)], alg)


def test_choose_positive_basis():
    charges = [(1, 0), (0, 1), (1, 1), (2, 1)]
    (b1, b2), coords = choose_positive_basis(charges, None)
    det = b1[0] * b2[1] - b1[1] * b2[0]
    assert det == 1
    for c, (x, y) in coords.items():
        assert x >= 0 and y >= 0
        assert (x * b1[0] + y * b2[0], x * b1[1] + y * b2[1]) == c
    with pytest.raises(ZeroCharge):
        choose_positive_basis([(2, 0), (0, 2)], None)


def _pentagon_spectra():
    # two-state chamber vs three-state chamber of the pentagon identity,
    # with CPT partners; crossing the wall swaps the phase order of Z(g1)
    # and Z(g2), so the two chambers carry swapped central charges
    za, zb = 1.0 + 0.1j, 0.1 + 1.0j
    two = [((1, 0), 1, zb), ((-1, 0), 1, -zb),
           ((0, 1), 1, za), ((0, -1), 1, -za)]
    three = [((1, 0), 1, za), ((-1, 0), 1, -za),
             ((0, 1), 1, zb), ((0, -1), 1, -zb),
             ((1, 1), 1, za + zb), ((-1, -1), 1, -(za + zb))]
    return two, three


def test_wcf_check_pentagon_chambers():
    two, three = _pentagon_spectra()
    pairing = ((0, 1), (-1, 0))
    equal, div = wcf_check(two, three, pairing, 12)
    assert equal, div


def test_wcf_check_detects_corruption():
    two, three = _pentagon_spectra()
    pairing = ((0, 1), (-1, 0))
    bad = [(g, (2 if g in ((1, 1), (-1, -1)) else om), z)
           for g, om, z in three]
    equal, div = wcf_check(two, bad, pairing, 12)
    assert not equal
    assert div is not None and div[0] >= 2    # height of first divergence
