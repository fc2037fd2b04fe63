"""Convex-polygon combinatorics of critical values: Hom complexes,
composition, exceptional collections, mutations and lattice truncation.

All convexity tests run in exact rational arithmetic.  Input critical values
and the phase direction are rationalized onto a denominator grid (recorded in
the config), after which every orientation predicate is an exact integer-sign
computation: no floating-point flakiness.

Conventions
-----------
A candidate polygon is the chain  w_inf -> W(p) -> W(p_1) -> ... -> W(p')
-> w_inf  with the vertex at infinity in direction zeta, entering along
-zeta and leaving along +zeta.  The chain is *convex* when

  * every finite edge f satisfies Im(conj(zeta) f) <= 0  (closed half-plane,
    so collinear degenerate chains are allowed), and
  * every consecutive direction pair turns weakly left (cross >= 0),
    including the two turns against the infinite edges, and
  * no edge exactly reverses the previous one.

For a bigon this reduces to Im(zeta^{-1} W(p')) <= Im(zeta^{-1} W(p)):
nonzero homs go from higher to lower Im(zeta^{-1} W), the directedness of
the collection.
"""

from __future__ import annotations

import cmath
import dataclasses
import itertools
import math
from fractions import Fraction

from .errors import NonGeneric, NotAdjacent, SupportViolation
from .potential import Phase


# -- exact rational planar arithmetic ------------------------------------

class QC:
    """A complex number with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, o):
        return QC(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return QC(self.re - o.re, self.im - o.im)

    def __neg__(self):
        return QC(-self.re, -self.im)

    def __eq__(self, o):
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"QC({self.re}, {self.im})"

    def cross(self, o):
        return self.re * o.im - self.im * o.re

    def dot(self, o):
        return self.re * o.re + self.im * o.im

    def conj_mul_im(self, o):
        """Im(conj(self) * o) -- same as cross."""
        return self.cross(o)

    def __complex__(self):
        return complex(float(self.re), float(self.im))


def rationalize(x: complex, denominator: int) -> QC:
    return QC(Fraction(round(x.real * denominator), denominator),
              Fraction(round(x.imag * denominator), denominator))


# -- configuration -------------------------------------------------------

@dataclasses.dataclass
class GenericityCert:
    min_value_gap: float
    min_ray_gap: float      # min angular distance from zeta to any soliton ray


class CriticalValueConfig:
    """Rationalized critical values with a distinguished phase direction.

    Parameters
    ----------
    values : list of (id, complex)
    zeta : Phase or complex
    denominator : int
        Grid denominator for exact rationalization (recorded).
    """

    def __init__(self, values, zeta, denominator=10**6):
        self.denominator = int(denominator)
        self.ids = [i for i, _ in values]
        if len(set(self.ids)) != len(self.ids):
            raise NonGeneric("duplicate critical point ids")
        self.raw = {i: complex(v) for i, v in values}
        self.zeta_raw = complex(zeta)
        self.val = {i: rationalize(v, self.denominator) for i, v in self.raw.items()}
        self.zeta = rationalize(self.zeta_raw, self.denominator)
        if self.zeta.re == 0 and self.zeta.im == 0:
            raise NonGeneric("phase direction rationalized to zero")
        self._check_generic()

    def _check_generic(self):
        min_gap = math.inf
        min_ray = math.inf
        for a, b in itertools.combinations(self.ids, 2):
            if self.val[a] == self.val[b]:
                raise NonGeneric(f"values of {a} and {b} coincide on the grid")
            d = self.val[a] - self.val[b]
            if self.zeta.cross(d) == 0:
                raise NonGeneric(
                    f"phase lies exactly on the soliton ray of pair ({a},{b})")
            min_gap = min(min_gap, abs(self.raw[a] - self.raw[b]))
            ray = (self.raw[a] - self.raw[b])
            ang = abs(cmath.phase(ray / self.zeta_raw)) % math.pi
            min_ray = min(min_ray, ang, math.pi - ang)
        self.genericity_cert = GenericityCert(
            0.0 if min_gap is math.inf else min_gap,
            0.0 if min_ray is math.inf else min_ray)

    def im_height(self, i):
        """Exact Im(conj(zeta) W(p_i)), the directedness height (up to the
        positive factor |zeta|^2)."""
        v = self.val[i]
        return self.zeta.re * v.im - self.zeta.im * v.re

    def ordering(self):
        """Object ids sorted by strictly decreasing Im(zeta^{-1} W)."""
        order = sorted(self.ids, key=self.im_height, reverse=True)
        for a, b in zip(order[:-1], order[1:]):
            if self.im_height(a) == self.im_height(b):
                raise NonGeneric(
                    f"objects {a} and {b} have equal height; ordering not strict")
        return order


# -- the convexity predicate ---------------------------------------------

def _chain_convex(cfg: CriticalValueConfig, chain) -> bool:
    """Exact convexity of the chain (list of ids) closed off through w_inf."""
    if len(set(chain)) != len(chain):
        return False
    pts = [cfg.val[i] for i in chain]
    dirs = [-cfg.zeta]
    for a, b in zip(pts[:-1], pts[1:]):
        f = b - a
        # closed half-plane for finite edges: Im(conj(zeta) f) <= 0
        if cfg.zeta.cross(f) > 0:
            return False
        dirs.append(f)
    dirs.append(cfg.zeta)
    for d1, d2 in zip(dirs[:-1], dirs[1:]):
        c = d1.cross(d2)
        if c < 0:
            return False
        if c == 0 and d1.dot(d2) < 0:   # exact reversal
            return False
    return True


@dataclasses.dataclass(frozen=True)
class ConvexPolygonQ:
    vertex_ids: tuple

    @property
    def interior(self):
        return self.vertex_ids[1:-1]


def enumerate_polygons(cfg: CriticalValueConfig, p, p_prime,
                       max_interior: int | None = None):
    """All convex polygons from p to p' with at most max_interior interior
    vertices (unbounded when None: the finite value set bounds the search).

    Prefix pruning is sound because every subchain of a convex chain is
    convex (dropping a vertex merges two weakly-left turns into one).
    """
    if p == p_prime:
        raise NonGeneric("endpoints must be distinct")
    others = [i for i in cfg.ids if i not in (p, p_prime)]
    cap = len(others) if max_interior is None else min(max_interior, len(others))
    found = set()

    def extend(chain):
        if len(chain) >= 2 and _chain_convex(cfg, chain + [p_prime]):
            found.add(ConvexPolygonQ(tuple(chain + [p_prime])))
        if len(chain) - 1 >= cap:
            return
        for i in others:
            if i in chain:
                continue
            nxt = chain + [i]
            if _prefix_feasible(cfg, nxt):
                extend(nxt)

    if _chain_convex(cfg, [p, p_prime]):
        found.add(ConvexPolygonQ((p, p_prime)))
    for i in others:
        if _prefix_feasible(cfg, [p, i]):
            extend([p, i])
    return found


def _prefix_feasible(cfg, chain):
    """Necessary conditions on a prefix of a convex chain (final turns into
    +zeta not yet checked)."""
    pts = [cfg.val[i] for i in chain]
    dirs = [-cfg.zeta]
    for a, b in zip(pts[:-1], pts[1:]):
        f = b - a
        if cfg.zeta.cross(f) > 0:
            return False
        dirs.append(f)
    for d1, d2 in zip(dirs[:-1], dirs[1:]):
        c = d1.cross(d2)
        if c < 0 or (c == 0 and d1.dot(d2) < 0):
            return False
    return True


# -- Hom complexes -------------------------------------------------------

@dataclasses.dataclass
class HomComplex:
    """Direct sum over convex polygons of tensor words of soliton generators.

    All generators sit in degree 0 with zero differential; the container
    keeps the polygon decomposition so a differential can be added later.
    """

    source: object
    target: object
    summands: dict   # ConvexPolygonQ -> list of basis words; a word is a
                     # tuple of (a, b, k) soliton-generator labels

    @property
    def rank(self):
        return sum(len(words) for words in self.summands.values())

    def basis(self):
        out = []
        for poly in sorted(self.summands, key=lambda q: q.vertex_ids):
            for w in self.summands[poly]:
                out.append((poly, w))
        return out


def _mu_abs(mu, a, b):
    if hasattr(mu, "mu"):
        return abs(int(mu.mu[a, b]))
    return abs(int(mu.get((a, b), 0)))


def build_hom(cfg: CriticalValueConfig, mu, p, p_prime,
              max_interior: int | None = None) -> HomComplex:
    """R_{p,p'} = sum over convex polygons Q of the tensor product of the
    soliton spaces along consecutive edges of Q; rank of a summand is the
    product of the |mu| counts, and zero factors drop the polygon."""
    if p == p_prime:
        return HomComplex(p, p, {ConvexPolygonQ((p,)): [()]})
    summands = {}
    for poly in enumerate_polygons(cfg, p, p_prime, max_interior):
        chain = poly.vertex_ids
        ranks = [_mu_abs(mu, a, b) for a, b in zip(chain[:-1], chain[1:])]
        if any(r == 0 for r in ranks):
            continue
        words = [tuple((a, b, k) for (a, b), k in zip(zip(chain[:-1], chain[1:]), ks))
                 for ks in itertools.product(*[range(r) for r in ranks])]
        summands[poly] = words
    return HomComplex(p, p_prime, summands)


@dataclasses.dataclass
class HomElement:
    """Integer combination of (polygon, word) basis elements."""

    source: object
    target: object
    terms: dict     # (vertex_ids tuple, word tuple) -> int

    @classmethod
    def basis_element(cls, hom: HomComplex, poly: ConvexPolygonQ, word):
        return cls(hom.source, hom.target, {(poly.vertex_ids, word): 1})

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, {})

    def __add__(self, o):
        t = dict(self.terms)
        for k, c in o.terms.items():
            t[k] = t.get(k, 0) + c
            if t[k] == 0:
                del t[k]
        return HomElement(self.source, self.target, t)

    def scale(self, c):
        if c == 0:
            return HomElement.zero(self.source, self.target)
        return HomElement(self.source, self.target,
                          {k: c * v for k, v in self.terms.items()})

    def is_zero(self):
        return not self.terms

    def __eq__(self, o):
        return (self.source == o.source and self.target == o.target
                and self.terms == o.terms)


def compose(a: HomElement, b: HomElement, cfg: CriticalValueConfig) -> HomElement:
    """Bilinear composition: glue polygons along the shared endpoint, keep
    the term iff the glued chain is convex (the shared infinite edge drops).
    """
    if a.target != b.source:
        raise NonGeneric("composition endpoints do not match")
    out = HomElement.zero(a.source, b.target)
    terms = {}
    for (ca, wa), xa in a.terms.items():
        for (cb, wb), xb in b.terms.items():
            if len(ca) == 1:            # identity of R_{p,p}
                glued, word = cb, wb
            elif len(cb) == 1:
                glued, word = ca, wa
            else:
                glued = ca + cb[1:]
                word = wa + wb
                if not _chain_convex(cfg, list(glued)):
                    continue
            key = (glued, word)
            terms[key] = terms.get(key, 0) + xa * xb
    out.terms = {k: v for k, v in terms.items() if v != 0}
    return out


def associativity_check(cfg: CriticalValueConfig, mu, triples=None):
    """(ab)c == a(bc) on homogeneous basis triples; exhaustive by default.

    Returns a report dict with the number of triples checked and failures.
    """
    order = cfg.ordering()
    homs = {}
    for p in order:
        for q in order:
            homs[p, q] = build_hom(cfg, mu, p, q)
    if triples is None:
        triples = [(p, q, r) for p in order for q in order for r in order]
    checked = 0
    failures = []
    for p, q, r in triples:
        for (pa, wa) in homs[p, q].basis():
            ea = HomElement.basis_element(homs[p, q], pa, wa)
            for (pb, wb) in homs[q, r].basis():
                eb = HomElement.basis_element(homs[q, r], pb, wb)
                ab = compose(ea, eb, cfg)
                for s in order:
                    for (pc, wc) in homs[r, s].basis():
                        ec = HomElement.basis_element(homs[r, s], pc, wc)
                        lhs = compose(ab, ec, cfg)
                        rhs = compose(ea, compose(eb, ec, cfg), cfg)
                        checked += 1
                        if lhs != rhs:
                            failures.append(((p, q, r, s), (pa, wa), (pb, wb), (pc, wc)))
    return {"checked": checked, "failures": failures, "ok": not failures}


# -- exceptional collections and mutation --------------------------------

def _pair_phase(cfg, a, b):
    """arg(zeta_{a,b} / zeta) in (0, pi) for a above b in the ordering."""
    d = cfg.raw[a] - cfg.raw[b]
    return cmath.phase(d / cfg.zeta_raw) % math.pi


def _ordered_pairs(order):
    return [(order[i], order[j])
            for i in range(len(order)) for j in range(i + 1, len(order))]


def stokes_product(order, mu, phases):
    """Product of I + mu[a][b] E_{ab} over ordered pairs, clockwise in ray
    phase (descending arg in (0, pi)); exact integer matrices in id basis."""
    ids = list(order)
    idx = {v: k for k, v in enumerate(ids)}
    n = len(ids)
    T = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    pairs = sorted(_ordered_pairs(order), key=lambda ab: -phases[frozenset(ab)])
    for a, b in pairs:
        m = _mu_signed(mu, a, b)
        # right-multiply T by (I + m E_{ab})
        ia, ib = idx[a], idx[b]
        for r in range(n):
            T[r][ib] += T[r][ia] * m
    return T, pairs, idx


def _mu_signed(mu, a, b):
    if hasattr(mu, "mu"):
        return int(mu.mu[a, b])
    return int(mu.get((a, b), 0))


@dataclasses.dataclass
class DirectedCategory:
    """Exceptional collection at a phase: ordering plus BPS data.

    ``mu`` is a dict on ordered id pairs, antisymmetric.  ``homs`` are
    recomputed on demand from the value configuration.
    """

    cfg: CriticalValueConfig
    mu: dict

    def __post_init__(self):
        for (a, b), m in list(self.mu.items()):
            if self.mu.get((b, a), -m) != -m:
                raise NonGeneric(f"mu not antisymmetric on pair ({a},{b})")
            self.mu[(b, a)] = -m

    @property
    def ordering(self):
        return self.cfg.ordering()

    def hom_table(self):
        order = self.ordering
        return {(p, q): build_hom(self.cfg, self.mu, p, q)
                for p in order for q in order}

    def ray_phases(self):
        return {frozenset((a, b)): _pair_phase(self.cfg, a, b)
                for a, b in _ordered_pairs(self.ordering)}

    def total_product(self):
        T, pairs, idx = stokes_product(self.ordering, self.mu, self.ray_phases())
        return T, idx


def mutate_collection(cat: DirectedCategory, pair, direction="ccw") -> DirectedCategory:
    """Cross the soliton ray of ``pair`` with the phase and return the
    mutated collection.

    The pair must be adjacent in the current ordering and its ray must be
    the next one hit by the rotating phase (smallest ray angle for a
    counter-clockwise rotation, largest for clockwise).  The new counts are
    solved, in exact integers, from invariance of the clockwise-ordered
    Stokes product; the crossed factor migrates to the opposite end of the
    product and the two objects swap in the ordering.
    """
    p, q = pair
    order = cat.ordering
    ip, iq = order.index(p), order.index(q)
    if abs(ip - iq) != 1:
        raise NotAdjacent(f"objects {p} and {q} are not adjacent in the ordering")
    phases = cat.ray_phases()
    key = frozenset((p, q))
    extreme = min(phases, key=phases.get) if direction == "ccw" \
        else max(phases, key=phases.get)
    if extreme != key:
        raise NotAdjacent(
            f"the rotating phase crosses the ray of pair {tuple(sorted(extreme))} "
            f"before the ray of ({p},{q})")

    T_old, idx = cat.total_product()
    n = len(order)

    # rotate zeta just past the crossed ray: by phi_key + delta for a ccw
    # rotation (ray angles decrease), by -(pi - phi_key) - delta for cw
    others = [v for k, v in phases.items() if k != key]
    if direction == "ccw":
        gap = (min(others) - phases[key]) if others else math.pi / 2
        turn = phases[key] + 0.5 * gap
    else:
        gap = (phases[key] - max(others)) if others else math.pi / 2
        turn = -(math.pi - phases[key]) - 0.5 * gap
    new_zeta = cat.cfg.zeta_raw * cmath.exp(1j * turn)
    new_cfg = CriticalValueConfig(
        [(i, cat.cfg.raw[i]) for i in cat.cfg.ids],
        new_zeta / abs(new_zeta), cat.cfg.denominator)

    new_order = new_cfg.ordering()
    if not (new_order.index(p) == iq and new_order.index(q) == ip
            and all(new_order[k] == order[k] for k in range(n) if k not in (ip, iq))):
        raise NonGeneric("phase rotation crossed more than the requested ray")
    new_phases = {frozenset(ab): _pair_phase(new_cfg, *ab)
                  for ab in _ordered_pairs(new_order)}

    # solve new counts from entrywise invariance of the product in the
    # position basis, triangularly by pair span
    new_mu = {}
    for a, b in _ordered_pairs(new_order):
        new_mu[(a, b)] = _mu_signed(cat.mu, a, b)
        new_mu[(b, a)] = -new_mu[(a, b)]
    pos = {v: k for k, v in enumerate(new_order)}
    for _ in range(n * n):
        T_new, _, _ = stokes_product(new_order, new_mu, new_phases)
        if T_new == T_old:
            break
        for a, b in sorted(_ordered_pairs(new_order), key=lambda ab: pos[ab[1]] - pos[ab[0]]):
            delta = T_old[pos[a]][pos[b]] - T_new[pos[a]][pos[b]]
            if delta:
                new_mu[(a, b)] += delta
                new_mu[(b, a)] = -new_mu[(a, b)]
                T_new, _, _ = stokes_product(new_order, new_mu, new_phases)
    else:
        raise NonGeneric("Stokes-product solve did not converge")
    return DirectedCategory(new_cfg, new_mu)


# -- lattice model and truncation ----------------------------------------

@dataclasses.dataclass
class LatticeVacuumModel:
    """Critical points (p, gamma) with values W(p) + Z(gamma) on a lattice.

    ``central_charge`` is stored on a basis of the rank-r lattice; Z extends
    by exact linearity of the stored basis values.
    """

    base_values: list
    rank: int
    z_basis: list            # complex Z(e_k) per basis vector

    def z(self, gamma):
        return sum(g * z for g, z in zip(gamma, self.z_basis))


@dataclasses.dataclass
class LatticeHom:
    rank: int
    basis: list              # list of chains, each a tuple of lattice points
    bound: float


def truncate_lattice(model: LatticeVacuumModel, mu_data, gamma, gamma_prime,
                     bound, support=None, tol_val=1e-8) -> LatticeHom:
    """Hom rank between (p, gamma) and (p, gamma') truncated at total
    |Z|-length < bound.

    Chains step through the active support (charges with nonzero index);
    each chain gamma = g_0, g_1, ..., g_m = gamma' costs sum |Z(g_{j+1} -
    g_j)| and contributes the product of |Omega| over its steps.  The direct
    bigon is always retained; interior chains are filtered by the bound.
    Finiteness needs every support charge to carry |Z| bounded away from
    zero, otherwise SupportViolation.
    """
    if support is None:
        support = [g for g, om in mu_data.items() if om]
    support = [tuple(g) for g in support]
    if not support:
        return LatticeHom(0, [], bound)
    zmin = min(abs(model.z(s)) for s in support)
    if zmin < tol_val:
        raise SupportViolation(
            "a support charge has vanishing central charge; the truncated "
            "enumeration would be infinite")
    gamma = tuple(gamma)
    gamma_prime = tuple(gamma_prime)
    chains = []

    def omega(step):
        return abs(mu_data.get(step, 0))

    def extend(point, path, cost):
        for s in support:
            nxt = tuple(a + b for a, b in zip(point, s))
            c = cost + abs(model.z(s))
            if nxt == gamma_prime:
                if c < bound or len(path) == 1:   # bigon always kept
                    chains.append(tuple(path + [nxt]))
                continue
            if c + zmin >= bound:
                continue
            if nxt in path:
                continue
            extend(nxt, path + [nxt], c)

    extend(gamma, [gamma], 0.0)
    rank = 0
    kept = []
    for ch in sorted(chains):
        r = 1
        for a, b in zip(ch[:-1], ch[1:]):
            r *= omega(tuple(x - y for x, y in zip(b, a)))
        if r:
            kept.append(ch)
            rank += r
    return LatticeHom(rank, kept, bound)
