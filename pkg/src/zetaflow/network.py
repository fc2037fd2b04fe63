"""Spectral networks of polynomial quadratic differentials on C.

Trajectories solve dz/dt = zeta / sqrt(p(z)) with the square-root sheet
carried as explicit state (kernel-level continuity enforcement); saddle
connections between turning points are located by a phase-grid scan with
side-flip bisection, and their charges are identified against a basis of
cycles by central-charge matching.
"""

from __future__ import annotations

import cmath
import dataclasses
import math

import numpy as np

from . import _kernels as K
from .errors import (BranchAmbiguity, ChargeIdentificationFail,
                     ContourThroughRoot, NonSimpleRoot, StepFailure,
                     UnresolvedConnection, ZeroCentralCharge)
from .potential import Phase


class QuadraticDifferential:
    """p(z) dz^2 with polynomial p, coefficients lowest degree first."""

    def __init__(self, coeffs, tol_crit=1e-10):
        self.coeffs = np.asarray([complex(c) for c in coeffs], dtype=complex)
        while len(self.coeffs) > 1 and self.coeffs[-1] == 0:
            self.coeffs = self.coeffs[:-1]
        # trajectory tracing works for any degree (the standard webs p = 1
        # and p = z are valid inputs); the charge lattice needs degree >= 2
        # and checks separately
        self.tol_crit = tol_crit
        self._tps = None

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, z):
        acc = 0j
        for c in self.coeffs[::-1]:
            acc = acc * z + c
        return acc

    def dp(self, z):
        acc = 0j
        for k in range(self.degree, 0, -1):
            acc = acc * z + k * self.coeffs[k]
        return acc

    @property
    def turning_points(self):
        if self._tps is None:
            r = np.roots(self.coeffs[::-1])
            scale = 1.0 + max((abs(x) for x in r), default=0.0)
            for i in range(len(r)):
                for j in range(i + 1, len(r)):
                    if abs(r[i] - r[j]) < self.tol_crit * scale:
                        raise NonSimpleRoot(
                            f"roots {r[i]:.6g} and {r[j]:.6g} coincide")
            self._tps = np.array(sorted(r, key=lambda z: (z.real, z.imag)),
                                 dtype=complex)
        return self._tps


@dataclasses.dataclass
class TraceConfig:
    collision_radius: float = 1e-8
    escape_radius: float = 25.0
    t_max: float = 100.0
    rtol: float = 1e-11
    atol: float = 1e-12
    h0: float = 1e-4
    max_steps: int = 400000
    seed_offset: float = 1e-5


@dataclasses.dataclass
class TrajectoryPath:
    samples: np.ndarray
    termination: str             # "hit" | "escaped" | "max_length"
    hit_index: int | None
    t_end: float
    min_dist: np.ndarray         # closest approach per turning point
    min_side: np.ndarray         # signed side at closest approach
    t_at_min: np.ndarray
    phase: complex


_STATUS = {K.TRAJ_HIT: "hit", K.TRAJ_ESCAPED: "escaped",
           K.TRAJ_MAXLEN: "max_length"}


def trace_trajectory(qd: QuadraticDifferential, seed, sqrt0, zeta,
                     cfg: TraceConfig | None = None, record=True) -> TrajectoryPath:
    """Foliation line through ``seed`` on the sheet fixed by ``sqrt0``."""
    cfg = cfg or TraceConfig()
    tps = qd.turning_points
    dmin = min((abs(complex(seed) - t) for t in tps), default=math.inf)
    if dmin < cfg.collision_radius:
        raise BranchAmbiguity("seed coincides with a turning point")
    samples, status, hit, t_end, md, ms, tm = K.trace_quadratic(
        qd.coeffs, complex(zeta), complex(seed), complex(sqrt0), tps,
        cfg.collision_radius, cfg.escape_radius, cfg.t_max,
        cfg.rtol, cfg.atol, cfg.h0, cfg.max_steps, record)
    if status == K.TRAJ_STEPFAIL:
        raise StepFailure("adaptive step underflow in trajectory tracing")
    return TrajectoryPath(samples, _STATUS[status],
                          int(hit) if hit >= 0 else None,
                          t_end, md, ms, tm, complex(zeta))


def critical_directions(qd: QuadraticDifferential, tp_index, zeta):
    """The three angles along which trajectories leave a simple turning point.

    Near a simple zero z0, int sqrt(p) = (2/3) sqrt(p'(z0)) (z - z0)^{3/2};
    the trajectory condition sqrt(p) dz in zeta R gives
    theta_m = (2/3)(arg zeta - arg sqrt(p'(z0)) + m pi).
    """
    z0 = qd.turning_points[tp_index]
    base = cmath.phase(complex(zeta)) - 0.5 * cmath.phase(qd.dp(z0))
    return [(2.0 / 3.0) * (base + m * math.pi) for m in range(3)]


def launch(qd, tp_index, direction_angle, zeta, cfg: TraceConfig | None = None,
           record=True):
    """Trace from just off a turning point along one critical direction."""
    cfg = cfg or TraceConfig()
    z0 = qd.turning_points[tp_index]
    seed = z0 + cfg.seed_offset * cmath.exp(1j * direction_angle)
    s = cmath.sqrt(qd(seed))
    v = complex(zeta) / s
    # pick the sheet on which the motion points away from the turning point
    if (v * cmath.exp(-1j * direction_angle)).real < 0:
        s = -s
    return trace_trajectory(qd, seed, s, zeta, cfg, record)


def im_drift_quadratic(qd, zeta, samples):
    """Drift of Im(zeta^{-1} int sqrt(p) dz) along a sample path, with the
    sheet continued from the first sample (trapezoid rule diagnostic)."""
    if len(samples) < 2:
        return 0.0
    inv = 1.0 / complex(zeta)
    s = cmath.sqrt(qd(samples[0]))
    acc = 0.0
    worst = 0.0
    prev = s
    zprev = samples[0]
    for z in samples[1:]:
        s = cmath.sqrt(qd(z))
        if abs(s - prev) > abs(s + prev):
            s = -s
        acc += ((s + prev) * 0.5 * (z - zprev) * inv).imag
        worst = max(worst, abs(acc))
        prev, zprev = s, z
    return worst


# -- central charges ------------------------------------------------------

@dataclasses.dataclass
class ChargeLattice:
    """Basis cycles around consecutive turning-point pairs (sorted order),
    with the adjacency pairing <gamma_k, gamma_{k+1}> = 1."""

    rank: int
    pairing: np.ndarray
    basis_pairs: list            # (i, j) turning-point index pairs

    @classmethod
    def for_differential(cls, qd: QuadraticDifferential):
        n = qd.degree
        if n < 2:
            raise NonSimpleRoot("charge lattice needs deg p >= 2")
        rank = n - 1
        pairing = np.zeros((rank, rank), dtype=int)
        for k in range(rank - 1):
            pairing[k, k + 1] = 1
            pairing[k + 1, k] = -1
        pairs = [(k, k + 1) for k in range(rank)]
        return cls(rank, pairing, pairs)


def central_charge(qd: QuadraticDifferential, pair, orders=(32, 64, 128, 256),
                   tol=1e-10):
    """Z = 2 int_a^b sqrt(p) dz for the cycle around turning points (a, b).

    Straight contour with the endpoint square roots factored out:
    z = c + h sin(theta) maps the segment to theta in [-pi/2, pi/2] and
    (z-a)(z-b) = -h^2 cos^2(theta), giving
    Z = 2 i h^2 int cos^2(theta) sqrt(q(z)) dtheta,  q = p / ((z-a)(z-b)),
    with the branch of sqrt(q) continued from theta = 0.  Gauss-Legendre with
    order escalation; the last inter-order difference is the error estimate.
    """
    tps = qd.turning_points
    a, b = tps[pair[0]], tps[pair[1]]
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    # no third root may sit on (a hair off) the contour
    for k, r in enumerate(tps):
        if k in pair:
            continue
        s = ((r - c) / h).real
        d = abs(r - (c + min(max(s, -1.0), 1.0) * h))
        if d < 1e-8 * (1 + abs(h)):
            raise ContourThroughRoot(
                f"turning point {k} lies on the contour between {pair}")

    def q(z):
        val = qd(z)
        den = (z - a) * (z - b)
        return val / den

    prev = None
    err = math.inf
    for order in orders:
        x, w = np.polynomial.legendre.leggauss(order)
        theta = 0.5 * math.pi * x
        total = 0j
        # continue sqrt(q) from the midpoint outward in two sweeps so the
        # branch never jumps between adjacent nodes
        zs = c + h * np.sin(theta)
        sq = np.empty(len(zs), dtype=complex)
        mid = len(zs) // 2
        ref = cmath.sqrt(q(zs[mid]))
        for i in range(mid, len(zs)):
            s = cmath.sqrt(q(zs[i]))
            if abs(s - ref) > abs(s + ref):
                s = -s
            sq[i] = s
            ref = s
        ref = sq[mid]
        for i in range(mid - 1, -1, -1):
            s = cmath.sqrt(q(zs[i]))
            if abs(s - ref) > abs(s + ref):
                s = -s
            sq[i] = s
            ref = s
        total = np.sum(w * np.cos(theta) ** 2 * sq) * 0.5 * math.pi
        val = 2j * h * h * total
        if prev is not None:
            err = abs(val - prev)
            if err < tol * (1 + abs(val)):
                return val, err
        prev = val
    return prev, err


class CentralChargeMap:
    """Z on the charge lattice, stored on the basis; exact additivity."""

    def __init__(self, qd: QuadraticDifferential, lattice: ChargeLattice | None = None):
        self.lattice = lattice or ChargeLattice.for_differential(qd)
        self.basis_values = []
        self.errors = []
        for pair in self.lattice.basis_pairs:
            z, e = central_charge(qd, pair)
            self.basis_values.append(z)
            self.errors.append(e)

    def z(self, gamma):
        return sum(g * zv for g, zv in zip(gamma, self.basis_values))


# -- saddle connection scan ----------------------------------------------

@dataclasses.dataclass
class ScanConfig:
    grid: int = 2000                 # phase samples over [0, pi)
    bisect_depth: int = 40
    tol_phase: float = 1e-6
    detect_radius: float = 1.0       # near-miss threshold for bisection triggers
    match_range: int = 3             # basis coefficients tried for charge id
    match_rtol: float = 1e-4
    trace: TraceConfig = dataclasses.field(default_factory=TraceConfig)


@dataclasses.dataclass
class SpectrumEntry:
    gamma: tuple
    omega: int
    phase: complex
    z: complex
    witness: np.ndarray | None
    tp_pair: tuple
    t_length: float


@dataclasses.dataclass
class BpsSpectrum:
    entries: list
    grid: int
    bisect_depth: int

    def charges(self):
        return sorted(e.gamma for e in self.entries)


def _closest_approach(qd, src, direction, theta, cfg, exclude_t=1e-3):
    """Trace at phase angle theta; return (per-tp min_dist, min_side, path)."""
    zeta = cmath.exp(1j * theta)
    path = launch(qd, src, direction(theta), zeta, cfg.trace, record=False)
    md = path.min_dist.copy()
    # ignore the immediate neighbourhood of the launch point
    md[src] = math.inf if path.t_at_min[src] < exclude_t else md[src]
    return md, path


def find_saddle_connections(qd: QuadraticDifferential,
                            cfg: ScanConfig | None = None,
                            zmap: CentralChargeMap | None = None) -> BpsSpectrum:
    """Phase scan for saddle connections; Omega = 1 per hypermultiplet.

    For every grid phase the three critical trajectories of every turning
    point are traced; a sign flip of the closest-approach side at another
    turning point between adjacent phases triggers bisection in the phase.
    Charges are identified by matching the connection period 2 zeta t
    against small integer combinations of the basis central charges; each
    connection is recorded for +gamma and -gamma (CPT).
    """
    cfg = cfg or ScanConfig()
    zmap = zmap or CentralChargeMap(qd)
    tps = qd.turning_points
    found = {}

    for src in range(len(tps)):
        for m in range(3):
            def direction(theta, m=m, src=src):
                z0 = tps[src]
                base = theta - 0.5 * cmath.phase(qd.dp(z0))
                return (2.0 / 3.0) * (base + m * math.pi)

            step = math.pi / cfg.grid
            prev = None
            for k in range(cfg.grid + 1):
                th = k * step
                md, path = _closest_approach(qd, src, direction, th, cfg)
                ms = path.min_side
                if prev is not None:
                    p_md, p_ms = prev
                    for tgt in range(len(tps)):
                        if tgt == src:
                            continue
                        if (p_md[tgt] < cfg.detect_radius
                                and md[tgt] < cfg.detect_radius
                                and p_ms[tgt] * ms[tgt] < 0):
                            _bisect(qd, src, tgt, direction,
                                    th - step, th, cfg, zmap, found)
                prev = (md, ms)

    entries = list(found.values())
    entries.sort(key=lambda e: (cmath.phase(e.phase), e.gamma))
    return BpsSpectrum(entries, cfg.grid, cfg.bisect_depth)


def _bisect(qd, src, tgt, direction, lo, hi, cfg, zmap, found):
    _, path_lo = _closest_approach(qd, src, direction, lo, cfg)
    side_lo = path_lo.min_side[tgt]
    if side_lo == 0:
        return
    best = None
    for _ in range(cfg.bisect_depth):
        mid = 0.5 * (lo + hi)
        md, path = _closest_approach(qd, src, direction, mid, cfg)
        if path.termination == "hit" and path.hit_index == tgt:
            best = (mid, path)
            break
        if md[tgt] < (best[1].min_dist[tgt] if best else math.inf):
            best = (mid, path)
        if path.min_side[tgt] == side_lo:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    if best is None:
        return
    theta, path = best
    if path.termination == "hit" and path.hit_index == tgt:
        t_conn = path.t_end
    elif path.min_dist[tgt] < 1e-5:
        t_conn = path.t_end if path.termination == "hit" else path.t_at_min[tgt]
    else:
        return    # the side flip was topological, not a connection
    zeta = cmath.exp(1j * theta)
    z_conn = 2.0 * zeta * t_conn
    gamma = _identify_charge(z_conn, zmap, cfg)
    for g, zv in ((gamma, z_conn), (tuple(-x for x in gamma), -z_conn)):
        key = g
        if key in found and abs(found[key].z - zv) < 1e-4 * (1 + abs(zv)):
            continue
        found[key] = SpectrumEntry(
            gamma=g, omega=1, phase=zv / abs(zv), z=zv, witness=None,
            tp_pair=(src, tgt), t_length=t_conn)


def _identify_charge(z_conn, zmap: CentralChargeMap, cfg: ScanConfig):
    """Match the connection period against small integer combinations of the
    basis central charges; the match must be unique up to overall sign."""
    import itertools
    rank = zmap.lattice.rank
    matches = []
    rng = range(-cfg.match_range, cfg.match_range + 1)
    for combo in itertools.product(rng, repeat=rank):
        if all(c == 0 for c in combo):
            continue
        zc = zmap.z(combo)
        if abs(zc - z_conn) < cfg.match_rtol * (1 + abs(z_conn)):
            matches.append(combo)
    if not matches:
        raise ChargeIdentificationFail(
            f"no basis combination matches period {z_conn:.6g}")
    matches.sort(key=lambda c: sum(x * x for x in c))
    if len(matches) > 1 and sum(x * x for x in matches[0]) == sum(x * x for x in matches[1]):
        raise ChargeIdentificationFail(
            f"ambiguous charge for period {z_conn:.6g}: {matches[:2]}")
    return tuple(matches[0])


# -- support property -----------------------------------------------------

def support_check(spectrum: BpsSpectrum, zmap: CentralChargeMap,
                  norm=None, tol_val=1e-8):
    """A = max ||gamma|| / |Z(gamma)| over active charges, plus a per-charge
    report; the bound is tautological for this A and becomes informative
    when compared across parameters/chambers."""
    if norm is None:
        def norm(g):
            return math.sqrt(sum(x * x for x in g))
    report = {}
    a_const = 0.0
    for e in spectrum.entries:
        zg = zmap.z(e.gamma)
        if abs(zg) < tol_val:
            raise ZeroCentralCharge(
                f"charge {e.gamma} has |Z| = {abs(zg):.3g}: discriminant proximity")
        ratio = norm(e.gamma) / abs(zg)
        a_const = max(a_const, ratio)
        report[e.gamma] = ratio
    passes = {g: r <= a_const + 1e-15 for g, r in report.items()}
    return a_const, passes
