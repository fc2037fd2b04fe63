"""Polynomial potentials on C^n (n = 1 or 2) and their critical data.

The gradient convention is the flat one throughout the package:
grad Re(f) = conj(df/dz) component-wise, without a factor-2 normalisation.
This only reparametrises flow time and leaves all counts unchanged.
"""

from __future__ import annotations

import cmath
import dataclasses
import math

import numpy as np

from .errors import CoincidentValues, DegenerateCritical, NotConverged


@dataclasses.dataclass(frozen=True)
class Tolerances:
    """Default numerical tolerances, all overridable per call."""

    tol_crit: float = 1e-10
    tol_val: float = 1e-8
    tol_cons: float = 1e-8
    tol_asym: float = 1e-6


DEFAULT_TOL = Tolerances()


@dataclasses.dataclass(frozen=True)
class Phase:
    """A unit complex number."""

    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if abs(abs(self.value) - 1.0) > 1e-12:
            raise ValueError(f"phase must be unimodular, got |zeta|={abs(self.value)}")

    @classmethod
    def from_angle(cls, theta: float) -> "Phase":
        return cls(cmath.exp(1j * theta))

    @property
    def angle(self) -> float:
        return cmath.phase(self.value)

    def __complex__(self):
        return self.value


@dataclasses.dataclass(frozen=True)
class CriticalPoint:
    position: tuple[complex, ...]
    value: complex
    hessian_det: complex
    id: int

    @property
    def z(self) -> complex:
        """Scalar position, only meaningful for one-variable potentials."""
        return self.position[0]


class HoloPotential:
    """Sparse polynomial W: C^n -> C with n in {1, 2}.

    Parameters
    ----------
    num_vars : int
    coefficients : dict
        Multi-exponent tuple -> complex coefficient.  Zero coefficients are
        dropped so the representation is canonical.
    """

    def __init__(self, num_vars, coefficients):
        if num_vars not in (1, 2):
            raise ValueError("num_vars must be 1 or 2")
        terms = {}
        for exp, c in coefficients.items():
            exp = tuple(int(e) for e in (exp if isinstance(exp, (tuple, list)) else (exp,)))
            if len(exp) != num_vars:
                raise ValueError(f"exponent {exp} has wrong arity")
            if any(e < 0 for e in exp):
                raise ValueError("negative exponents not allowed")
            c = complex(c)
            if c != 0:
                terms[exp] = terms.get(exp, 0) + c
        terms = {e: c for e, c in terms.items() if c != 0}
        if not terms:
            raise ValueError("potential is identically zero")
        self.num_vars = num_vars
        self.coefficients = terms
        self.degree = max(sum(e) for e in terms)
        if self.degree < 2:
            raise ValueError("degree must be >= 2")

    # -- evaluation ------------------------------------------------------

    def __call__(self, u):
        u = self._as_point(u)
        return sum(c * math.prod(ui**e for ui, e in zip(u, exp))
                   for exp, c in self.coefficients.items())

    def _as_point(self, u):
        if isinstance(u, (int, float, complex)):
            u = (u,)
        u = tuple(complex(x) for x in u)
        if len(u) != self.num_vars:
            raise ValueError("point arity mismatch")
        return u

    def gradient(self, u):
        """Holomorphic partials (dW/du_1, ..., dW/du_n)."""
        u = self._as_point(u)
        out = []
        for a in range(self.num_vars):
            acc = 0j
            for exp, c in self.coefficients.items():
                if exp[a] == 0:
                    continue
                term = c * exp[a]
                for b, ub in enumerate(u):
                    e = exp[b] - (1 if b == a else 0)
                    term *= ub**e
                acc += term
            out.append(acc)
        return tuple(out)

    def hessian(self, u):
        u = self._as_point(u)
        n = self.num_vars
        H = np.zeros((n, n), dtype=complex)
        for a in range(n):
            for b in range(n):
                acc = 0j
                for exp, c in self.coefficients.items():
                    ea, eb = exp[a], exp[b]
                    if a == b:
                        if ea < 2:
                            continue
                        factor = ea * (ea - 1)
                    else:
                        if ea < 1 or eb < 1:
                            continue
                        factor = ea * eb
                    term = c * factor
                    for k, uk in enumerate(u):
                        e = exp[k] - (2 if (k == a and a == b) else
                                      (1 if k in (a, b) else 0))
                        term *= uk**e
                    acc += term
                H[a, b] = acc
        return H

    # -- dense coefficient views (n = 1) ---------------------------------

    def coeffs_1d(self):
        """Dense coefficients of W, lowest degree first (n = 1 only)."""
        if self.num_vars != 1:
            raise ValueError("coeffs_1d requires a one-variable potential")
        out = np.zeros(self.degree + 1, dtype=complex)
        for (e,), c in self.coefficients.items():
            out[e] = c
        return out

    def dcoeffs_1d(self):
        """Dense coefficients of W', lowest degree first (n = 1 only)."""
        c = self.coeffs_1d()
        return np.array([k * c[k] for k in range(1, len(c))], dtype=complex)

    # -- serialisation ---------------------------------------------------

    @classmethod
    def from_json(cls, doc):
        """Build from {"num_vars": n, "terms": [{"exp": [...], "re": a, "im": b}]}."""
        terms = {}
        for t in doc["terms"]:
            exp = tuple(t["exp"])
            terms[exp] = terms.get(exp, 0) + complex(t.get("re", 0.0), t.get("im", 0.0))
        return cls(doc["num_vars"], terms)

    def to_json(self):
        return {
            "num_vars": self.num_vars,
            "terms": [
                {"exp": list(e), "re": c.real, "im": c.imag}
                for e, c in sorted(self.coefficients.items())
            ],
        }

    def __repr__(self):
        return f"HoloPotential(num_vars={self.num_vars}, terms={len(self.coefficients)})"


@dataclasses.dataclass
class RootSearchConfig:
    tol: Tolerances = dataclasses.field(default_factory=Tolerances)
    num_starts: int = 200
    search_radius: float = 10.0
    max_newton_iter: int = 80
    seed: int = 0


def find_critical_points(W: HoloPotential, cfg: RootSearchConfig | None = None):
    """All nondegenerate critical points of W, with distinct values enforced.

    For n = 1 the search is complete (companion-matrix roots of W').  For
    n = 2 it is multi-start damped Newton on the gradient; completeness is
    not guaranteed and the caller should inspect ``coverage`` metadata via
    :func:`find_critical_points_n2`.
    """
    cfg = cfg or RootSearchConfig()
    if W.num_vars == 1:
        positions = _roots_1d(W, cfg)
    else:
        positions, _ = find_critical_points_n2(W, cfg)
    pts = []
    for i, pos in enumerate(positions):
        H = W.hessian(pos)
        hdet = complex(np.linalg.det(H))
        scale = max(1.0, max(abs(h) for h in np.ravel(H)))
        if abs(hdet) < cfg.tol.tol_crit * scale:
            raise DegenerateCritical(f"critical point {pos} has |det Hess| = {abs(hdet):.3e}")
        pts.append(CriticalPoint(position=tuple(pos), value=W(pos), hessian_det=hdet, id=i))
    vals = [p.value for p in pts]
    vscale = 1.0 + max((abs(v) for v in vals), default=0.0)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if abs(vals[i] - vals[j]) < cfg.tol.tol_val * vscale:
                raise CoincidentValues(
                    f"critical values of points {i} and {j} coincide: {vals[i]}")
    return pts


def _roots_1d(W, cfg):
    dcoeffs = W.dcoeffs_1d()
    # numpy.roots wants highest degree first
    roots = np.roots(dcoeffs[::-1])
    roots = sorted(roots, key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    # polish by Newton on W' and check multiplicity separation
    polished = []
    for r in roots:
        z = complex(r)
        for _ in range(50):
            d = _horner(dcoeffs, z)
            d2 = _horner(np.array([k * dcoeffs[k] for k in range(1, len(dcoeffs))],
                                  dtype=complex), z) if len(dcoeffs) > 1 else 0j
            if d2 == 0:
                break
            step = d / d2
            z -= step
            if abs(step) < 1e-15 * (1 + abs(z)):
                break
        polished.append(z)
    scale = 1.0 + max(abs(z) for z in polished)
    for i in range(len(polished)):
        for j in range(i + 1, len(polished)):
            if abs(polished[i] - polished[j]) < cfg.tol.tol_crit * scale:
                raise DegenerateCritical(
                    f"W' has a multiple root near {polished[i]}")
    return [(z,) for z in polished]


def find_critical_points_n2(W, cfg):
    """Multi-start damped Newton on grad W for two variables.

    Returns (positions, coverage) where coverage records how many starts
    converged and how many distinct points were found; completeness is
    heuristic and flagged to the caller.
    """
    rng = np.random.default_rng(cfg.seed)
    found = []
    converged = 0
    for _ in range(cfg.num_starts):
        u = tuple(rng.uniform(-cfg.search_radius, cfg.search_radius)
                  + 1j * rng.uniform(-cfg.search_radius, cfg.search_radius)
                  for _ in range(2))
        u = _newton_n2(W, u, cfg)
        if u is None:
            continue
        converged += 1
        if all(_dist2(u, v) > (10 * cfg.tol.tol_crit) for v in found):
            found.append(u)
    if converged == 0:
        raise NotConverged("no Newton start converged for the 2-variable search")
    coverage = {"starts": cfg.num_starts, "converged": converged,
                "distinct": len(found), "complete": False}
    found.sort(key=lambda u: (round(u[0].real, 9), round(u[0].imag, 9),
                              round(u[1].real, 9), round(u[1].imag, 9)))
    return found, coverage


def _newton_n2(W, u, cfg):
    u = np.array(u, dtype=complex)
    for _ in range(cfg.max_newton_iter):
        g = np.array(W.gradient(tuple(u)), dtype=complex)
        gn = np.linalg.norm(g)
        if gn < cfg.tol.tol_crit:
            return tuple(u)
        H = W.hessian(tuple(u))
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        for _ in range(20):
            un = u - lam * step
            if np.linalg.norm(np.array(W.gradient(tuple(un)))) < gn:
                u = un
                break
            lam *= 0.5
        else:
            return None
        if np.linalg.norm(u) > 1e6:
            return None
    g = np.array(W.gradient(tuple(u)), dtype=complex)
    return tuple(u) if np.linalg.norm(g) < cfg.tol.tol_crit else None


def _dist2(u, v):
    return max(abs(a - b) for a, b in zip(u, v))


def _horner(coeffs, z):
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def soliton_phase(p: CriticalPoint, q: CriticalPoint,
                  tol: Tolerances = DEFAULT_TOL) -> Phase:
    """The distinguished phase (W(p) - W(q)) / |W(p) - W(q)|."""
    dw = p.value - q.value
    if abs(dw) < tol.tol_val * (1 + abs(p.value) + abs(q.value)):
        raise CoincidentValues("soliton phase undefined for equal critical values")
    return Phase(dw / abs(dw))


class BpsMatrix:
    """Signed two-dimensional BPS counts between pairs of vacua.

    ``mu[p][q]`` is the signed soliton count, antisymmetric by the CV-1
    convention; ``phase_table[p][q]`` holds the distinguished phases.
    """

    def __init__(self, dim):
        self.dim = dim
        self.mu = np.zeros((dim, dim), dtype=np.int64)
        self.phase_table = np.zeros((dim, dim), dtype=complex)

    def set_pair(self, i, j, count, phase):
        self.mu[i, j] = count
        self.mu[j, i] = -count
        self.phase_table[i, j] = phase
        self.phase_table[j, i] = -phase

    def check_invariants(self):
        assert np.all(np.diag(self.mu) == 0)
        assert np.array_equal(self.mu, -self.mu.T)
        assert np.allclose(self.phase_table, -self.phase_table.T)

    def to_json(self):
        return {
            "dim": self.dim,
            "mu": self.mu.tolist(),
            "phases": [[{"re": z.real, "im": z.imag} for z in row]
                       for row in self.phase_table],
        }
