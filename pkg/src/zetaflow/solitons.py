"""Signed soliton counting between vacua of a one-variable potential.

The primary algorithm continues the deg(W) branches of the preimage of the
straight segment [W(q), W(p)] in the value plane.  Because Im(W/zeta) is
conserved and Re(W/zeta) is monotone along a soliton, the value-plane image
of a soliton at the distinguished phase is exactly that segment, so branch
continuation is complete.  A shooting method along the two downward rays of
the source is kept as an independent cross-check (and as the flagged
heuristic for two variables).
"""

from __future__ import annotations

import cmath
import dataclasses
import math

import numpy as np

from .errors import NonGenericConfig, NotConverged
from .flow import FlowConfig, descending_directions, flow_gradient
from .potential import (DEFAULT_TOL, BpsMatrix, CriticalPoint, HoloPotential,
                        Phase, Tolerances, soliton_phase)


@dataclasses.dataclass
class SolitonRecord:
    source: int
    target: int
    phase: Phase
    samples: np.ndarray
    sign: int
    energy: float


@dataclasses.dataclass
class SolitonConfig:
    tol: Tolerances = dataclasses.field(default_factory=Tolerances)
    continuation_steps: int = 400
    edge_start: float = 1e-3      # uniform sweep stops here, geometric refinement after
    edge_cut: float = 1e-13       # final distance (in segment parameter) off each endpoint
    max_newton_iter: int = 40


def _segment_preimage_branches(W, wp, wq, cfg):
    """Continue all roots of W(z) = w(t) from t = 1/2 to both segment ends.

    w(t) = wq + t (wp - wq).  Returns a list of branches, each a pair of
    sample arrays (toward t=1, toward t=0) including the midpoint.
    """
    coeffs = W.coeffs_1d()

    def roots_at(t):
        c = coeffs.copy()
        c[0] -= wq + t * (wp - wq)
        return np.roots(c[::-1])

    def newton(z, t):
        for _ in range(cfg.max_newton_iter):
            val = _horner(coeffs, z) - (wq + t * (wp - wq))
            der = _horner_d(coeffs, z)
            if der == 0:
                return None
            step = val / der
            z = z - step
            if abs(step) < 1e-14 * (1 + abs(z)):
                return z
        return z

    mid_roots = roots_at(0.5)
    # parameter schedules: uniform sweep, then geometric approach to the
    # endpoint (the preimage has square-root behaviour at the vacua)
    n = cfg.continuation_steps
    up = [0.5 + (1.0 - cfg.edge_start - 0.5) * (k + 1) / n for k in range(n)]
    e = cfg.edge_start
    while e > cfg.edge_cut:
        e *= 0.5
        up.append(1.0 - max(e, cfg.edge_cut))
    down = [1.0 - t for t in up]

    branches = []
    for r in mid_roots:
        halves = []
        for schedule in (up, down):
            path = [complex(r)]
            t = 0.5
            z = complex(r)
            for t_next in schedule:
                zn = newton(z, t_next)
                if zn is None or abs(zn - z) > 0.5 * _min_root_gap(mid_roots):
                    # halve the sub-step once; segment continuation is benign
                    zn = newton(newton(z, 0.5 * (t + t_next)) or z, t_next)
                    if zn is None:
                        raise NotConverged("branch continuation lost a root")
                z = zn
                t = t_next
                path.append(z)
            halves.append(np.asarray(path))
        branches.append(halves)
    return branches


def _min_root_gap(roots):
    gap = math.inf
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            gap = min(gap, abs(roots[i] - roots[j]))
    return gap if gap < math.inf else 1.0


def _horner(c, z):
    acc = 0j
    for a in reversed(c):
        acc = acc * z + a
    return acc


def _horner_d(c, z):
    acc = 0j
    for k in range(len(c) - 1, 0, -1):
        acc = acc * z + k * c[k]
    return acc


def _ray_label(W, p, zeta, direction):
    """+1 / -1 depending on which downward ray of p the direction matches."""
    th_plus, _ = descending_directions(W, p, zeta)
    ang = cmath.phase(direction) % (2 * math.pi)
    d_plus = _angle_dist(ang, th_plus % (2 * math.pi))
    d_minus = _angle_dist(ang, (th_plus + math.pi) % (2 * math.pi))
    return 1 if d_plus <= d_minus else -1


def _ascending_label(W, p, zeta, direction):
    """Label against the upward rays of p (arrival side of a soliton)."""
    c = W.hessian(p.position)[0, 0] / complex(zeta)
    theta = (-cmath.phase(c)) / 2.0 % math.pi
    ang = cmath.phase(direction) % (2 * math.pi)
    d_plus = _angle_dist(ang, theta)
    d_minus = _angle_dist(ang, theta + math.pi)
    return 1 if d_plus <= d_minus else -1


def _angle_dist(a, b):
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def count_solitons(W: HoloPotential, p: CriticalPoint, q: CriticalPoint,
                   cfg: SolitonConfig | None = None,
                   critical_points: list[CriticalPoint] | None = None):
    """Signed count and records of solitons from p to q (one variable).

    Signs follow convention CV-1, realised by orienting the two downward
    rays at each vacuum (positive ray angle in [0, pi)) and multiplying the
    departure and arrival labels of each soliton.
    """
    cfg = cfg or SolitonConfig()
    if W.num_vars != 1:
        raise NotImplementedError("use shooting_count for the n=2 heuristic")
    if critical_points is None:
        from .potential import find_critical_points
        critical_points = find_critical_points(W)
    wp, wq = p.value, q.value
    zeta = soliton_phase(p, q, cfg.tol)
    _check_generic_segment(critical_points, p, q, cfg.tol)

    branches = _segment_preimage_branches(W, wp, wq, cfg)
    # a branch ends at a vacuum iff its endpoint sits within the square-root
    # approach scale of that vacuum (the fibre has a double root there)
    rad_p = _approach_radius(W, p, abs(wp - wq), cfg)
    rad_q = _approach_radius(W, q, abs(wp - wq), cfg)
    records = []
    for to_p, to_q in branches:
        end_p = to_p[-1]
        end_q = to_q[-1]
        if abs(end_p - p.z) > rad_p or abs(end_q - q.z) > rad_q:
            continue
        # orientation labels at both ends
        dep = _ray_label(W, p, zeta, end_p - p.z)
        arr = _ascending_label(W, q, zeta, end_q - q.z)
        samples = np.concatenate([to_p[::-1], to_q[1:]])
        records.append(SolitonRecord(
            source=p.id, target=q.id, phase=zeta, samples=samples,
            sign=dep * arr, energy=abs(wp - wq)))
    count = sum(r.sign for r in records)
    return count, records


def _approach_radius(W, cp, energy, cfg):
    """Capture radius for a branch end near the vacuum ``cp``.

    The preimage branch sits at distance ~ sqrt(2 e |dW| / |W''|) from the
    vacuum when the segment parameter is e off the endpoint.
    """
    hess = abs(W.hessian(cp.position)[0, 0])
    expected = math.sqrt(2.0 * cfg.edge_cut * energy / max(hess, 1e-30))
    return max(cfg.tol.tol_asym, 50.0 * expected)


def _fiber_roots(W, w0):
    c = W.coeffs_1d().copy()
    c[0] -= w0
    return np.roots(c[::-1])


def _check_generic_segment(critical_points, p, q, tol):
    """No third critical value may sit on the open segment [W(q), W(p)]."""
    wp, wq = p.value, q.value
    d = wp - wq
    L = abs(d)
    for r in critical_points:
        if r.id in (p.id, q.id):
            continue
        s = ((r.value - wq) / d).real if d != 0 else 0.0
        proj = wq + s * d
        if 0 < s < 1 and abs(r.value - proj) < tol.tol_val * (1 + L):
            raise NonGenericConfig(
                f"critical value of point {r.id} lies on the segment "
                f"({q.id} -> {p.id}); perturb the potential")


def shooting_count(W, p, q, critical_points, flow_cfg: FlowConfig | None = None,
                   capture_radius=5e-3):
    """Independent soliton count by shooting along the downward rays of p.

    At the distinguished phase the unstable set of p consists of two rays;
    a soliton is a ray captured at q.  Signs use the same CV-1 labels.
    Heuristic for n = 2 (fan shooting), exact cross-check for n = 1.
    """
    flow_cfg = flow_cfg or FlowConfig(capture_radius=capture_radius,
                                      rtol=1e-13, atol=1e-14)
    zeta = soliton_phase(p, q)
    if W.num_vars != 1:
        return _fan_shooting_n2(W, p, q, critical_points, zeta, flow_cfg)
    count = 0
    hits = 0
    others = [c for c in critical_points if c.id != p.id]
    for label, th in zip((1, -1), descending_directions(W, p, zeta)):
        seed = p.z + flow_cfg.seed_offset * cmath.exp(1j * th)
        traj = flow_gradient(W, zeta, seed, flow_cfg, others)
        if traj.termination == "captured" and traj.captured_id == q.id:
            arr = _ascending_label(W, q, zeta, traj.samples[-2] - q.z)
            count += label * arr
            hits += 1
    return count, hits


def _fan_shooting_n2(W, p, q, critical_points, zeta, flow_cfg, fan=64):
    """Heuristic two-variable fallback: shoot a fan over the unstable plane.

    The unstable directions of Re(W/zeta) at p span a real 2-plane inside
    C^2 (Morse index is always n for holomorphic W); seeds are launched on a
    circle in that plane and captures at q are counted by angular connected
    component.  Signs are NOT determined -- each component contributes +1 and
    the result is an unsigned lower bound, flagged as heuristic.
    """
    import numpy as np
    inv_zeta = 1.0 / complex(zeta)
    H = W.hessian(p.position)
    # real 4x4 Hessian of Re(W/zeta) at p: unstable eigenvectors
    A = inv_zeta * H
    R = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            a = A[i, j]
            R[2 * i, 2 * j] = a.real
            R[2 * i, 2 * j + 1] = -a.imag
            R[2 * i + 1, 2 * j] = -a.imag
            R[2 * i + 1, 2 * j + 1] = -a.real
    vals, vecs = np.linalg.eigh(R)
    unstable = vecs[:, vals < 0]
    if unstable.shape[1] < 2:
        return 0, 0
    v1, v2 = unstable[:, 0], unstable[:, 1]

    def to_c(v):
        return np.array([v[0] + 1j * v[1], v[2] + 1j * v[3]])

    hits = []
    for k in range(fan):
        phi = 2 * math.pi * k / fan
        d = math.cos(phi) * to_c(v1) + math.sin(phi) * to_c(v2)
        seed = tuple(np.array(p.position) + flow_cfg.seed_offset * d)
        traj = flow_gradient(W, zeta, seed, flow_cfg,
                             [c for c in critical_points if c.id != p.id])
        hits.append(traj.termination == "captured" and traj.captured_id == q.id)
    # count angular connected components of captures
    comps = 0
    for k in range(fan):
        if hits[k] and not hits[k - 1]:
            comps += 1
    if comps == 0 and all(hits):
        comps = 1
    return comps, sum(hits)


def build_bps_matrix(W, critical_points, cfg: SolitonConfig | None = None):
    """Assemble the antisymmetric soliton-count matrix over all vacua."""
    cfg = cfg or SolitonConfig()
    n = len(critical_points)
    mat = BpsMatrix(n)
    records = []
    for i in range(n):
        for j in range(i + 1, n):
            p, q = critical_points[i], critical_points[j]
            zeta = soliton_phase(p, q, cfg.tol)
            cnt, recs = count_solitons(W, p, q, cfg, critical_points)
            mat.set_pair(i, j, cnt, complex(zeta))
            records.extend(recs)
    return mat, records
