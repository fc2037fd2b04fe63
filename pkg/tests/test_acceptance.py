"""Acceptance suite: one test per shipped acceptance criterion.

Each test prints a single "ACCEPTANCE n: PASS" line on success (pytest
reports the FAIL case); stated tolerances and runtime budgets are asserted
inside the tests themselves where they are load-bearing.
"""

import cmath
import itertools
import math
import time

import numpy as np
import pytest

from zetaflow.potential import HoloPotential, Phase, find_critical_points
from zetaflow.flow import (FlowConfig, flow_gradient, im_drift, re_monotone,
                           trace_thimble, thimble_image_distance)
from zetaflow.solitons import count_solitons, shooting_count
from zetaflow.periods import exponential_period, stokes_factor
from zetaflow.polygons import (ConvexPolygonQ, CriticalValueConfig,
                               DirectedCategory, LatticeVacuumModel,
                               _chain_convex, associativity_check,
                               enumerate_polygons, mutate_collection,
                               truncate_lattice)
from zetaflow.network import (CentralChargeMap, QuadraticDifferential,
                              ScanConfig, central_charge,
                              find_saddle_connections, support_check)
from zetaflow.wallcross import (KSTransform, TorusAlgebra, action_table,
                                first_divergence, wcf_check)
from zetaflow.errors import NonGeneric


AIRY = HoloPotential(1, {(3,): 1 / 3, (1,): -1.0})


def _corpus(rng, n=20):
    out = []
    while len(out) < n:
        deg = int(rng.integers(3, 6))
        coeffs = {(k,): complex(*rng.normal(size=2)) for k in range(1, deg)}
        coeffs[(deg,)] = 1.0
        W = HoloPotential(1, coeffs)
        try:
            cps = find_critical_points(W)
        except Exception:
            continue
        out.append((W, cps))
    return out


def test_acceptance_01_airy_counts():
    t0 = time.time()
    cps = find_critical_points(AIRY)
    p = next(c for c in cps if c.z.real > 0)
    q = next(c for c in cps if c.z.real < 0)
    cnt, _ = count_solitons(AIRY, p, q, critical_points=cps)
    assert abs(cnt) == 1
    s_cnt, _ = shooting_count(AIRY, p, q, cps)
    assert abs(s_cnt) == 1
    f = stokes_factor(W=AIRY, p=p, q=q, critical_points=cps)
    assert abs(f.entry) == 1          # quadrature residual < 0.1 enforced inside
    assert time.time() - t0 < 10.0
    print("ACCEPTANCE 1 (Airy soliton count = shooting = |Stokes entry| = 1): PASS")


def test_acceptance_02_conservation_suite():
    t0 = time.time()
    rng = np.random.default_rng(42)
    for W, cps in _corpus(rng, 20):
        zeta = Phase(cmath.exp(1j * rng.uniform(0, 2 * math.pi)))
        u0 = complex(*rng.normal(size=2))
        traj = flow_gradient(W, zeta, u0, critical_points=cps)
        dw = abs(W(traj.samples[0]) - W(traj.samples[-1]))
        assert im_drift(W, zeta, traj.samples) < 1e-8 * (1 + dw)
        assert re_monotone(W, zeta, traj.samples, slack=1e-12)
    assert time.time() - t0 < 60.0
    print("ACCEPTANCE 2 (Im conservation + Re monotonicity, 20 potentials): PASS")


def test_acceptance_03_thimble_image():
    t0 = time.time()
    rng = np.random.default_rng(7)
    done = 0
    for W, cps in _corpus(rng, 12):
        if done >= 6:
            break
        zeta = Phase(cmath.exp(1j * rng.uniform(0, 2 * math.pi)))
        p = cps[int(rng.integers(len(cps)))]
        try:
            th = trace_thimble(W, p, zeta, critical_points=cps)
        except Exception:
            continue   # phase too close to a ray for this draw
        if any(r.termination != "escaped" for r in th.rays):
            continue
        assert thimble_image_distance(W, p, zeta, th) < 1e-6
        done += 1
    assert done >= 4
    assert time.time() - t0 < 30.0
    print("ACCEPTANCE 3 (thimble W-image on the half-line, < 1e-6): PASS")


def test_acceptance_04_mutation_monodromy():
    t0 = time.time()
    vals = [(k, -0.75 * cmath.exp(2j * math.pi * k / 3)) for k in range(3)]
    cfg = CriticalValueConfig(vals, cmath.exp(0.1j))
    mu = {(a, b): 1 for a in range(3) for b in range(3) if a < b}
    cat = DirectedCategory(cfg, mu)
    start = (cat.ordering, dict(cat.mu))
    T0, _ = cat.total_product()
    for _ in range(6):
        key = min(cat.ray_phases().items(), key=lambda kv: kv[1])[0]
        cat = mutate_collection(cat, tuple(key), "ccw")
        T, _ = cat.total_product()
        assert T == T0                       # exact integer invariance
    assert (cat.ordering, dict(cat.mu)) == start   # identity after 2 pi
    assert time.time() - t0 < 5.0
    print("ACCEPTANCE 4 (A3 mutation invariance + 2pi identity, exact): PASS")


def test_acceptance_05_polygon_soundness():
    t0 = time.time()
    rng = np.random.default_rng(19)
    done = 0
    while done < 4:
        vals = [(k, complex(round(v.real, 3), round(v.imag, 3)))
                for k, v in ((k, complex(*rng.normal(size=2)))
                             for k in range(5))]
        zeta = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        try:
            cfg = CriticalValueConfig(vals, zeta)
            order = cfg.ordering()
        except NonGeneric:
            continue
        for p in order:
            for q in order:
                if p == q:
                    continue
                got = enumerate_polygons(cfg, p, q)
                expect = set()
                others = [i for i in cfg.ids if i not in (p, q)]
                for r in range(len(others) + 1):
                    for sub in itertools.permutations(others, r):
                        if _chain_convex(cfg, [p, *sub, q]):
                            expect.add(ConvexPolygonQ((p, *sub, q)))
                assert got == expect
        mu = {(a, b): int(rng.integers(-2, 3))
              for a in cfg.ids for b in cfg.ids if a < b}
        assert associativity_check(cfg, mu)["ok"]
        done += 1
    assert time.time() - t0 < 60.0
    print("ACCEPTANCE 5 (polygon enumeration = brute force; associativity): PASS")


def test_acceptance_06_lattice_truncation():
    t0 = time.time()
    model = LatticeVacuumModel([], 2, [1.0, 2j])
    mu_data = {(1, 0): 1, (-1, 0): 1, (0, 1): 2, (0, -1): 2}

    def brute(gamma, gamma_prime, bound):
        support = list(mu_data)
        rank = 0
        for L in range(1, 6):
            for steps in itertools.product(support, repeat=L):
                pts = [tuple(gamma)]
                for s in steps:
                    pts.append(tuple(a + b for a, b in zip(pts[-1], s)))
                if pts[-1] != tuple(gamma_prime) or len(set(pts)) != len(pts):
                    continue
                cost = sum(abs(model.z(s)) for s in steps)
                if cost >= bound and L > 1:
                    continue
                r = 1
                for s in steps:
                    r *= abs(mu_data[s])
                rank += r
        return rank

    for tgt in [(2, 0), (1, 1), (0, 2)]:
        for bound in (1.5, 3.2, 5.1):
            assert truncate_lattice(model, mu_data, (0, 0), tgt, bound).rank \
                == brute((0, 0), tgt, bound)
    assert time.time() - t0 < 10.0
    print("ACCEPTANCE 6 (lattice truncation rank = brute force, exact): PASS")


def test_acceptance_07_period_quantitative():
    t0 = time.time()
    z, _ = central_charge(QuadraticDifferential([-1.0, 0.0, 1.0]), (0, 1))
    assert min(abs(z - 1j * math.pi), abs(z + 1j * math.pi)) < 1e-8
    W = HoloPotential(1, {(2,): -0.5})
    p = find_critical_points(W)[0]
    pv = exponential_period(W, p, Phase(1), 1.0)
    target = math.sqrt(2 * math.pi)
    assert min(abs(pv.value - target), abs(pv.value + target)) < 1e-8
    assert time.time() - t0 < 5.0
    print("ACCEPTANCE 7 (Z(z^2-1) = i*pi; Gaussian period = sqrt(2*pi)): PASS")


def test_acceptance_08_ad_chambers():
    t0 = time.time()
    results = {}
    for u, expected in ((1j, 2), (3j, 3)):
        qd = QuadraticDifferential([u, -3.0, 0.0, 1.0])
        zmap = CentralChargeMap(qd)
        spec = find_saddle_connections(qd, ScanConfig(grid=300), zmap)
        states = {g for g in spec.charges() if g > tuple(-x for x in g)}
        assert len(states) == expected
        for e in spec.entries:
            zg = zmap.z(e.gamma)
            d = abs((cmath.phase(zg) - cmath.phase(e.z) + math.pi)
                    % (2 * math.pi) - math.pi)
            assert d < 1e-6
        results[u] = spec
    assert time.time() - t0 < 300.0
    print("ACCEPTANCE 8 (AD chambers: 2 and 3 states, phase-aligned): PASS")


def test_acceptance_09_wcf_certificate():
    t0 = time.time()
    # the two chamber spectra of the cubic family, in the adjacency basis
    def scan(u):
        qd = QuadraticDifferential([u, -3.0, 0.0, 1.0])
        zmap = CentralChargeMap(qd)
        spec = find_saddle_connections(qd, ScanConfig(grid=300), zmap)
        return [(e.gamma, e.omega, e.z) for e in spec.entries], zmap
    sa, zm = scan(1j)
    sb, _ = scan(3j)
    pairing = tuple(tuple(int(x) for x in row) for row in zm.lattice.pairing)
    equal, div = wcf_check(sa, sb, pairing, 12)
    assert equal, div
    # standalone pentagon at N = 12
    alg = TorusAlgebra(2, ((0, 1), (-1, 0)), 12)
    lhs = action_table([KSTransform((1, 0), 1), KSTransform((0, 1), 1)], alg)
    rhs = action_table([KSTransform((0, 1), 1), KSTransform((1, 1), 1),
                        KSTransform((1, 0), 1)], alg)
    assert first_divergence(lhs, rhs, alg) is None
    assert time.time() - t0 < 30.0
    print("ACCEPTANCE 9 (chamber spectra KS-equal at N=12; pentagon): PASS")


def test_acceptance_10_support_path():
    t0 = time.time()
    a_vals = []
    for k in range(50):
        u = 2.5 * cmath.exp(2j * math.pi * k / 50)   # circle avoiding u = +-2
        qd = QuadraticDifferential([u, -3.0, 0.0, 1.0])
        zmap = CentralChargeMap(qd)
        spec = find_saddle_connections(qd, ScanConfig(grid=200), zmap)
        assert spec.entries
        a, _ = support_check(spec, zmap)
        assert math.isfinite(a) and a > 0
        a_vals.append(a)
    for x, y in zip(a_vals, a_vals[1:] + a_vals[:1]):
        assert max(x / y, y / x) < 10.0
    assert time.time() - t0 < 600.0
    print("ACCEPTANCE 10 (finite support constant, no 10x jump on u-path): PASS")


def test_acceptance_11_determinism(tmp_path, capsys):
    import json
    from zetaflow.cli import main
    configs = [
        ("lg-solitons", {"potential": {"num_vars": 1, "terms": [
            {"exp": [3], "re": 1 / 3}, {"exp": [1], "re": -1.0}]}, "seed": 1}),
        ("sw-spectrum", {"poly": [[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
                         "grid": 100}),
        ("fs-homs", {"values": [{"id": 0, "im": 1.0}, {"id": 1}],
                     "zeta": {"re": 1.0}, "mu": [[0, 1, 1]]}),
    ]
    for cmd, cfg in configs:
        path = tmp_path / f"{cmd}.json"
        path.write_text(json.dumps(cfg))
        outs = []
        for _ in range(2):
            assert main([cmd, str(path)]) == 0
            outs.append(capsys.readouterr().out)
        assert outs[0] == outs[1]
    print("ACCEPTANCE 11 (byte-identical envelopes on repeated runs): PASS")
