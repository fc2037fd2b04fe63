"""Kontsevich-Soibelman torus-algebra engine, exact rational arithmetic.

Series live on the positive cone of a chosen basis, truncated at total
exponent height N; a KS transformation acts on generators by

    x_mu  ->  x_mu * (1 - sigma * x_gamma)^(<gamma, mu> * Omega(gamma))

with the quadratic-refinement sign sigma = -1 by default (configurable).
Negative exponents expand as geometric series, exact in the truncation.
No floating point enters this module except for phase ordering of factors.
"""

from __future__ import annotations

import cmath
import dataclasses
import itertools
import math
from fractions import Fraction

from .errors import BoundaryRay, TieBreak, ZeroCharge


@dataclasses.dataclass(frozen=True)
class TorusAlgebra:
    rank: int
    pairing: tuple          # antisymmetric integer matrix, row tuples
    order: int              # truncation: total exponent height < = order
    sigma: int = -1

    def __post_init__(self):
        P = self.pairing
        for i in range(self.rank):
            for j in range(self.rank):
                if P[i][j] != -P[j][i]:
                    raise ValueError("pairing must be antisymmetric")
        if self.order < 1:
            raise ValueError("truncation bound must be >= 1")

    def pair(self, gamma, mu):
        return sum(gamma[i] * self.pairing[i][j] * mu[j]
                   for i in range(self.rank) for j in range(self.rank))


def unit(alg: TorusAlgebra):
    return {(0,) * alg.rank: Fraction(1)}


def gen(alg: TorusAlgebra, k):
    e = [0] * alg.rank
    e[k] = 1
    return {tuple(e): Fraction(1)}


def monomial(alg, exponent, coeff=1):
    return {tuple(exponent): Fraction(coeff)}


def mul(alg: TorusAlgebra, a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if sum(e) > alg.order:
                continue
            out[e] = out.get(e, Fraction(0)) + ca * cb
    return {e: c for e, c in out.items() if c}


def add(a, b):
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, Fraction(0)) + c
        if out[e] == 0:
            del out[e]
    return out


def _binomial_power(alg: TorusAlgebra, gamma, power):
    """(1 - sigma x_gamma)^power truncated, for any integer power."""
    height = sum(gamma)
    if height <= 0:
        raise ZeroCharge("KS charge must lie in the positive cone")
    kmax = alg.order // height
    out = {}
    s = alg.sigma
    for k in range(kmax + 1):
        if power >= 0 and k > power:
            break
        c = math.comb(power, k) * (-s) ** k if power >= 0 \
            else math.comb(-power + k - 1, k) * s ** k
        if c == 0:
            continue
        e = tuple(k * g for g in gamma)
        out[e] = out.get(e, Fraction(0)) + Fraction(c)
    return out


@dataclasses.dataclass(frozen=True)
class KSTransform:
    gamma: tuple
    omega: int

    def __post_init__(self):
        if all(g == 0 for g in self.gamma):
            raise ZeroCharge("KS charge must be nonzero")


def apply_ks(T: KSTransform, s, alg: TorusAlgebra):
    """Automorphism action on a truncated series, monomial by monomial:
    x^e -> x^e (1 - sigma x_gamma)^(<gamma, e> Omega)."""
    out = {}
    for e, c in s.items():
        p = alg.pair(T.gamma, e) * T.omega
        if p == 0:
            out[e] = out.get(e, Fraction(0)) + c
            continue
        factor = _binomial_power(alg, T.gamma, p)
        for ef, cf in factor.items():
            en = tuple(x + y for x, y in zip(e, ef))
            if sum(en) > alg.order:
                continue
            out[en] = out.get(en, Fraction(0)) + c * cf
    return {e: c for e, c in out.items() if c}


def action_table(factors, alg: TorusAlgebra):
    """Image of every basis generator under the composition of ``factors``:
    the list is in composition order (leftmost outermost), so the last
    factor acts on the series first.  With factors listed by decreasing
    arg Z this convention satisfies the pentagon identity at sigma = -1."""
    table = {}
    for k in range(alg.rank):
        s = gen(alg, k)
        for T in reversed(factors):
            s = apply_ks(T, s, alg)
        table[k] = s
    return table


def phase_ordered_product(spectrum, alg: TorusAlgebra, sector=None,
                          tol_boundary=1e-9):
    """Factors of a sector, ordered by decreasing arg Z, composed into an
    action table.

    ``spectrum`` is a list of (gamma, omega, Z) with gamma in positive-basis
    coordinates; entries with arg Z outside the sector are dropped.  A charge
    on the sector boundary raises BoundaryRay; two non-proportional charges
    sharing a phase raise TieBreak (a wall -- never silently ordered).
    Returns (table, ordered factors).
    """
    if sector is None:
        sector = (-0.5 * math.pi + 1e-7, 0.5 * math.pi + 1e-7)
    a, b = sector
    chosen = []
    for gamma, omega, z in spectrum:
        if omega == 0:
            continue
        ph = cmath.phase(z)
        # place the phase inside [a, a + 2 pi)
        while ph < a:
            ph += 2 * math.pi
        if ph >= b:
            continue
        if min(abs(ph - a), abs(ph - b)) < tol_boundary:
            raise BoundaryRay(
                f"charge {gamma} sits on the sector boundary (arg Z = {ph:.9f})")
        chosen.append((ph, tuple(gamma), int(omega), z))
    chosen.sort(key=lambda t: -t[0])
    for (p1, g1, *_), (p2, g2, *_) in zip(chosen[:-1], chosen[1:]):
        if abs(p1 - p2) < tol_boundary and not _proportional(g1, g2):
            raise TieBreak(
                f"charges {g1} and {g2} share phase {p1:.9f}: wall configuration")
    factors = [KSTransform(g, om) for _, g, om, _ in chosen]
    return action_table(factors, alg), factors


def _proportional(g1, g2):
    return all(g1[i] * g2[j] == g1[j] * g2[i]
               for i in range(len(g1)) for j in range(len(g1)))


def first_divergence(t1, t2, alg: TorusAlgebra):
    """Lowest-height lattice point at which two action tables differ."""
    worst = None
    for k in range(alg.rank):
        keys = set(t1[k]) | set(t2[k])
        for e in keys:
            if t1[k].get(e, Fraction(0)) != t2[k].get(e, Fraction(0)):
                h = sum(e)
                if worst is None or h < worst[0]:
                    worst = (h, k, e,
                             t1[k].get(e, Fraction(0)), t2[k].get(e, Fraction(0)))
    return worst


def choose_positive_basis(charges, pairing_fn):
    """A unimodular pair of active charges in whose span every charge has
    nonnegative coordinates (rank-2 cone basis); deterministic choice."""
    cands = sorted(set(tuple(c) for c in charges))
    for b1, b2 in itertools.permutations(cands, 2):
        det = b1[0] * b2[1] - b1[1] * b2[0]
        if det not in (1, -1):
            continue
        if det == -1:
            b1, b2 = b2, b1
            det = 1
        ok = True
        coords = {}
        for c in cands:
            # solve c = x b1 + y b2
            x = c[0] * b2[1] - c[1] * b2[0]
            y = b1[0] * c[1] - b1[1] * c[0]
            if x < 0 or y < 0 or x + y == 0:
                ok = False
                break
            coords[c] = (x, y)
        if ok:
            return (b1, b2), coords
    raise ZeroCharge("no unimodular positive cone basis among active charges")


def wcf_check(spec_a, spec_b, pairing, order):
    """Chamber-independence certificate for two spectra on the same lattice.

    Each spectrum is a list of (gamma, omega, Z) in original lattice
    coordinates; CPT partners (gamma and -gamma) should both be present and
    one representative per pair is selected by the phase sector.  Charges are
    rewritten in a common positive basis chosen from the active cone, then
    the phase-ordered products over the default half-circle are compared.

    Returns (equal, divergence) with divergence = None or the lowest-order
    difference (height, generator, exponent, coeff_a, coeff_b).
    """
    def pair_fn(g1, g2):
        return sum(g1[i] * pairing[i][j] * g2[j]
                   for i in range(len(g1)) for j in range(len(g1)))

    # restrict to the default sector to pick one CPT representative each
    def sector_charges(spec):
        out = []
        a = -0.5 * math.pi + 1e-7
        for gamma, omega, z in spec:
            ph = cmath.phase(z)
            while ph < a:
                ph += 2 * math.pi
            if ph < a + math.pi:
                out.append((tuple(gamma), omega, z))
        return out

    sa, sb = sector_charges(spec_a), sector_charges(spec_b)
    active = [g for g, _, _ in sa] + [g for g, _, _ in sb]
    (b1, b2), coords = choose_positive_basis(active, pair_fn)
    new_pairing = ((0, pair_fn(b1, b2)), (pair_fn(b2, b1), 0))
    alg = TorusAlgebra(2, new_pairing, order)

    def rebase(spec):
        return [(coords[g], om, z) for g, om, z in spec]

    ta, _ = phase_ordered_product(rebase(sa), alg)
    tb, _ = phase_ordered_product(rebase(sb), alg)
    div = first_divergence(ta, tb, alg)
    return div is None, div
