"""Exponential periods along Lefschetz thimbles and Stokes entries.

The integrand e^{W/u} is entire, so the integral over a thimble depends only
on the (truncated) endpoints; we integrate along the traced polyline with
composite Gauss-Legendre panels and estimate the error by refinement.

A Stokes entry is read off from the jump of the period through the dominant
vacuum as the phase crosses the soliton ray: the jump is an integer multiple
of the period through the subdominant vacuum.
"""

from __future__ import annotations

import cmath
import dataclasses
import math

import numpy as np

from .errors import AmbiguousRounding, NonDecaying, QuadratureFail
from .flow import FlowConfig, Thimble, trace_thimble
from .potential import CriticalPoint, HoloPotential, Phase, soliton_phase


@dataclasses.dataclass
class PeriodValue:
    thimble_id: tuple[int, Phase]
    u_param: complex
    value: complex
    est_error: float


@dataclasses.dataclass
class StokesFactor:
    ray_phase: Phase
    source: int
    target: int
    entry: int


@dataclasses.dataclass
class PeriodConfig:
    gl_order: int = 12
    truncate: float = 1e-16        # drop contour tail below this of peak magnitude
    rel_error_cap: float = 1e-6    # accept only est_error below this times |value|
    eps: float = 1e-2              # two-sided phase offset for Stokes probes
    flow: FlowConfig = dataclasses.field(default_factory=lambda: FlowConfig(
        escape_radius=30.0, max_arclength=400.0, rtol=1e-12, atol=1e-13))


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_nodes(order):
    if order not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(order)
        _GL_CACHE[order] = (x, w)
    return _GL_CACHE[order]


def _integrate_polyline(f, pts, order):
    """Composite Gauss-Legendre integral of f along the polyline ``pts``."""
    x, w = _gl_nodes(order)
    total = 0j
    for a, b in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        if half == 0:
            continue
        total += half * sum(wk * f(mid + half * xk) for xk, wk in zip(x, w))
    return total


def _refine(pts):
    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        out.append(0.5 * (a + b))
        out.append(b)
    return np.asarray(out)


def _truncate_contour(W, u, pts, cut):
    """Keep the contiguous stretch where |e^{W/u}| is above cut * peak."""
    logmag = np.array([(W(z) / u).real for z in pts])
    peak = logmag.max()
    keep = logmag >= peak + math.log(cut)
    idx = np.nonzero(keep)[0]
    if len(idx) == 0:
        raise QuadratureFail("integrand vanished everywhere on the contour")
    return pts[idx[0]: idx[-1] + 1]


def exponential_period(W: HoloPotential, p: CriticalPoint, zeta: Phase,
                       u_param: complex, cfg: PeriodConfig | None = None,
                       thimble: Thimble | None = None) -> PeriodValue:
    """Quadrature of  ∫ e^{W(z)/u} dz  along the thimble of p at phase zeta.

    The thimble W-image is the half-line W(p) - R>=0 zeta, so the integrand
    decays iff Re(zeta / u) > 0; this alignment is checked up front.
    """
    cfg = cfg or PeriodConfig()
    u = complex(u_param)
    if u == 0:
        raise NonDecaying("u_param must be nonzero")
    if (complex(zeta) / u).real <= 0:
        raise NonDecaying(
            "u_param misaligned with zeta: e^{W/u} grows along the thimble")
    if thimble is None:
        thimble = trace_thimble(W, p, zeta, cfg.flow)
    for ray in thimble.rays:
        if ray.termination == "captured":
            raise NonDecaying(
                "thimble ray captured by another vacuum; phase is on or too "
                "close to a Stokes ray")
    pts = _truncate_contour(W, u, thimble.contour, cfg.truncate)

    def f(z):
        return cmath.exp(W(z) / u)

    coarse = _integrate_polyline(f, pts, cfg.gl_order)
    fine = _integrate_polyline(f, _refine(pts), cfg.gl_order)
    err = abs(fine - coarse)
    if not (cmath.isfinite(fine.real) and cmath.isfinite(fine.imag)):
        raise QuadratureFail("non-finite period value")
    if err > cfg.rel_error_cap * max(abs(fine), 1e-300):
        raise QuadratureFail(
            f"refinement disagreement {err:.3e} exceeds "
            f"{cfg.rel_error_cap:.1e} * |value|")
    return PeriodValue((p.id, zeta), u, fine, err)


def stokes_factor(W: HoloPotential, p: CriticalPoint, q: CriticalPoint,
                  cfg: PeriodConfig | None = None,
                  critical_points: list[CriticalPoint] | None = None) -> StokesFactor:
    """Integer Stokes entry for the ordered pair (p, q) from period jumps.

    At the soliton ray zeta_{p,q} the period through the dominant vacuum p
    jumps by an integer multiple of the period through q; the entry is that
    integer, extracted from two-sided probes at zeta e^{+-i eps} with a
    Richardson step in eps to kill the leading drift.
    """
    cfg = cfg or PeriodConfig()
    ray = soliton_phase(p, q)
    z0 = complex(ray)
    # dominance: Re(W(p)/zeta) > Re(W(q)/zeta) means p's integrand dominates
    if (p.value / z0).real <= (q.value / z0).real:
        raise NonDecaying(
            "target not dominated: the pair must be ordered with "
            "Re(W(p)/zeta) > Re(W(q)/zeta)")
    u = z0
    # reference descending angles at the exact ray: the positive-ray label of a
    # perturbed thimble can wrap mod pi across the ray, silently reversing the
    # contour; periods below are sign-corrected against these references
    from .flow import descending_directions
    ref_p = descending_directions(W, p, Phase(z0))[0]
    ref_q = descending_directions(W, q, Phase(z0))[0]

    def oriented(cp, phase, ref):
        th = trace_thimble(W, cp, phase, cfg.flow, critical_points)
        pv = exponential_period(W, cp, phase, u, cfg, th)
        d = abs((th.ray_angles[0] - ref + math.pi) % (2 * math.pi) - math.pi)
        return -pv.value if d > math.pi / 2 else pv.value

    def raw_entry(eps):
        zp = Phase(z0 * cmath.exp(1j * eps))
        zm = Phase(z0 * cmath.exp(-1j * eps))
        ip = oriented(p, zp, ref_p)
        im = oriented(p, zm, ref_p)
        iq = oriented(q, zm, ref_q)
        if abs(iq) == 0:
            raise QuadratureFail("reference period through target vanished")
        return (ip - im) / iq

    e1 = raw_entry(cfg.eps)
    e2 = raw_entry(0.5 * cfg.eps)
    extrap = 2.0 * e2 - e1
    entry = round(extrap.real)
    residual = abs(extrap - entry)
    if residual >= 0.1:
        raise AmbiguousRounding(
            f"Stokes entry residual {residual:.3f} >= 0.1 "
            f"(raw probes {e1:.4f}, {e2:.4f})")
    return StokesFactor(ray, p.id, q.id, int(entry))


def stokes_matrix(W: HoloPotential, critical_points: list[CriticalPoint],
                  cfg: PeriodConfig | None = None):
    """All pairwise Stokes entries, with ray phases, as a JSON-ready dict.

    Each unordered pair contributes one entry, for the ordering in which the
    target is dominated on the soliton ray.
    """
    cfg = cfg or PeriodConfig()
    factors = []
    n = len(critical_points)
    for i in range(n):
        for j in range(i + 1, n):
            p, q = critical_points[i], critical_points[j]
            ray = soliton_phase(p, q)
            if (p.value / complex(ray)).real <= (q.value / complex(ray)).real:
                p, q = q, p
            factors.append(stokes_factor(W, p, q, cfg, critical_points))
    factors.sort(key=lambda f: cmath.phase(complex(f.ray_phase)))
    return {
        "ordering": [f"{f.source}->{f.target}" for f in factors],
        "factors": [
            {"source": f.source, "target": f.target, "entry": f.entry,
             "ray_re": complex(f.ray_phase).real,
             "ray_im": complex(f.ray_phase).imag}
            for f in factors
        ],
    }
