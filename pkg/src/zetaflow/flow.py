"""Downward gradient flow of Re(W/zeta) and Lefschetz thimbles.

One-variable flows run on the selected kernel backend (compiled or pure);
two-variable flows use a generic adaptive RK step in numpy, since they only
back the heuristic shooting fallback.
"""

from __future__ import annotations

import cmath
import dataclasses
import math

import numpy as np

from . import _kernels as K
from .errors import OnStokesRay, StepFailure
from .potential import (DEFAULT_TOL, CriticalPoint, HoloPotential, Phase,
                        Tolerances)


@dataclasses.dataclass
class FlowConfig:
    capture_radius: float = 1e-6
    escape_radius: float = 12.0
    max_arclength: float = 200.0
    rtol: float = 1e-12
    atol: float = 1e-13
    h0: float = 1e-4
    max_steps: int = 400000
    seed_offset: float = 1e-3
    tol: Tolerances = dataclasses.field(default_factory=Tolerances)


@dataclasses.dataclass
class Trajectory:
    samples: np.ndarray          # complex, shape (m,) for n=1 or (m, 2)
    termination: str             # "captured" | "escaped" | "max_length"
    captured_id: int | None
    arclength: float
    phase: Phase

    def w_values(self, W):
        if self.samples.ndim == 1:
            return np.array([W(z) for z in self.samples])
        return np.array([W(tuple(u)) for u in self.samples])


def flow_gradient(W: HoloPotential, zeta: Phase, u0,
                  cfg: FlowConfig | None = None,
                  critical_points: list[CriticalPoint] | None = None) -> Trajectory:
    """Integrate du/dx = -conj(dW/du / zeta) until capture, escape or length."""
    cfg = cfg or FlowConfig()
    if critical_points is None:
        from .potential import find_critical_points
        critical_points = find_critical_points(W)
    if W.num_vars == 1:
        crit = np.array([p.z for p in critical_points], dtype=complex)
        samples, status, captured, arclen = K.flow_polynomial_1d(
            W.dcoeffs_1d(), complex(zeta), complex(u0), crit,
            cfg.capture_radius, cfg.escape_radius, cfg.max_arclength,
            cfg.rtol, cfg.atol, cfg.h0, cfg.max_steps)
        if status == K.FLOW_STEPFAIL:
            raise StepFailure("adaptive step underflow in gradient flow")
        term = {K.FLOW_CAPTURED: "captured", K.FLOW_ESCAPED: "escaped",
                K.FLOW_MAXLEN: "max_length"}[status]
        cap = critical_points[captured].id if captured >= 0 else None
        return Trajectory(samples, term, cap, arclen, zeta)
    return _flow_n2(W, zeta, u0, cfg, critical_points)


def _flow_n2(W, zeta, u0, cfg, critical_points):
    inv_zeta = 1.0 / complex(zeta)

    def rhs(u):
        g = W.gradient(tuple(u))
        return np.array([-(inv_zeta * gi).conjugate() for gi in g])

    u = np.array(u0, dtype=complex)
    h = cfg.h0
    samples = [u.copy()]
    arclen = 0.0
    term, cap = "max_length", None
    for _ in range(cfg.max_steps):
        if h < 1e-14:
            raise StepFailure("adaptive step underflow in gradient flow (n=2)")
        u1, err = _dp_step(rhs, u, h)
        tol = cfg.atol + cfg.rtol * max(np.linalg.norm(u), np.linalg.norm(u1))
        if err > tol:
            h *= max(0.2, 0.9 * (tol / err) ** 0.2)
            continue
        arclen += np.linalg.norm(u1 - u)
        u = u1
        samples.append(u.copy())
        hit = next((p for p in critical_points
                    if max(abs(a - b) for a, b in zip(u, p.position)) < cfg.capture_radius),
                   None)
        if hit is not None:
            term, cap = "captured", hit.id
            break
        if np.linalg.norm(u) > cfg.escape_radius:
            term = "escaped"
            break
        if arclen > cfg.max_arclength:
            term = "max_length"
            break
        h *= min(5.0, 0.9 * (tol / max(err, 1e-300)) ** 0.2)
    return Trajectory(np.array(samples), term, cap, arclen, zeta)


def _dp_step(rhs, u, h):
    from ._kernels.pure import _DP_A, _DP_B4, _DP_B5
    ks = [rhs(u)]
    for i in range(1, 7):
        acc = sum((a * kj for a, kj in zip(_DP_A[i], ks)), np.zeros_like(u))
        ks.append(rhs(u + h * acc))
    u5 = u + h * sum(b * kj for b, kj in zip(_DP_B5, ks))
    u4 = u + h * sum(b * kj for b, kj in zip(_DP_B4, ks))
    return u5, float(np.linalg.norm(u5 - u4))


# -- flow diagnostics ----------------------------------------------------

def action_values(W, zeta, samples):
    """Re and Im of W/zeta along a sample path."""
    inv_zeta = 1.0 / complex(zeta)
    if samples.ndim == 1:
        w = np.array([inv_zeta * W(z) for z in samples])
    else:
        w = np.array([inv_zeta * W(tuple(u)) for u in samples])
    return w.real, w.imag


def im_drift(W, zeta, samples):
    _, im = action_values(W, zeta, samples)
    return float(im.max() - im.min())


def re_monotone(W, zeta, samples, slack=0.0):
    re, _ = action_values(W, zeta, samples)
    return bool(np.all(np.diff(re) <= slack))


# -- thimbles ------------------------------------------------------------

@dataclasses.dataclass
class Thimble:
    point_id: int
    phase: Phase
    rays: tuple[Trajectory, Trajectory]   # (positive ray, negative ray)
    ray_angles: tuple[float, float]

    @property
    def contour(self):
        """Samples ordered from the negative ray end through p to the
        positive ray end (n = 1 only)."""
        neg = self.rays[1].samples[::-1]
        pos = self.rays[0].samples
        return np.concatenate([neg, pos[1:]])


def descending_directions(W, p: CriticalPoint, zeta) -> tuple[float, float]:
    """Angles of the two downward rays at p for one-variable W.

    Near p, Re((W - W(p))/zeta) ~ Re(c e^{2 i theta}) |dz|^2 / 2 with
    c = W''(p)/zeta; the descending axis solves 2 theta = pi - arg(c).
    The positive label goes to the representative in [0, pi).
    """
    c = W.hessian(p.position)[0, 0] / complex(zeta)
    theta = (math.pi - cmath.phase(c)) / 2.0
    theta %= math.pi
    return theta, theta + math.pi


def check_no_stokes_ray(zeta, critical_points, gap=1e-9):
    """Raise OnStokesRay if zeta aligns with any soliton phase."""
    z = complex(zeta)
    for i, p in enumerate(critical_points):
        for q in critical_points[i + 1:]:
            dw = p.value - q.value
            if dw == 0:
                continue
            ray = dw / abs(dw)
            if min(abs(z - ray), abs(z + ray)) < gap:
                raise OnStokesRay(
                    f"zeta within {gap} of the soliton phase of pair ({p.id},{q.id})")


def trace_thimble(W: HoloPotential, p: CriticalPoint, zeta: Phase,
                  cfg: FlowConfig | None = None,
                  critical_points: list[CriticalPoint] | None = None) -> Thimble:
    """Unstable manifold of p for the downward flow at the given phase (n=1)."""
    cfg = cfg or FlowConfig()
    if critical_points is None:
        from .potential import find_critical_points
        critical_points = find_critical_points(W)
    check_no_stokes_ray(zeta, critical_points)
    if W.num_vars != 1:
        raise NotImplementedError("thimble tracing is one-variable only")
    th_plus, th_minus = descending_directions(W, p, zeta)
    rays = []
    for th in (th_plus, th_minus):
        seed = p.z + cfg.seed_offset * cmath.exp(1j * th)
        traj = flow_gradient(W, zeta, seed, cfg, critical_points)
        rays.append(traj)
    return Thimble(p.id, zeta, (rays[0], rays[1]), (th_plus, th_minus))


def thimble_image_distance(W, p, zeta, thimble: Thimble):
    """Max normalised distance of the thimble W-image from W(p) - R>=0 zeta."""
    inv_zeta = 1.0 / complex(zeta)
    worst = 0.0
    for ray in thimble.rays:
        for z in ray.samples:
            q = inv_zeta * (W(z) - p.value)
            d = abs(q.imag) + max(q.real, 0.0)
            worst = max(worst, d / (1.0 + abs(q)))
    return worst
