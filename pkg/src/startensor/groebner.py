"""Buchberger's algorithm for ideals and submodules of free modules.

Everything here works on raw vectors (``dict`` from ``(pos, *exps)`` to a
coefficient, see :mod:`startensor.poly`).  Quotient rings ``S/J`` are
handled by passing a reduced Groebner basis of ``J`` as ``modulo``; its
elements act on every component of the free module (they stand for the
implicit generators ``g * e_i``).
"""

from __future__ import annotations

import heapq
from contextlib import contextmanager
from dataclasses import dataclass, field as dc_field

from .poly import (
    Poly,
    PolyRing,
    TermOrder,
    poly_to_vec,
    vec_restrict,
    vec_scale,
)

MAX_SATURATION_STEPS = 50


class DegreeCapExceeded(RuntimeError):
    """A Groebner computation hit the configured degree cap."""


class OrderMismatch(ValueError):
    pass


class SaturationDiverged(RuntimeError):
    pass


_degree_cap = [None]


@contextmanager
def degree_cap(cap):
    """Abort Buchberger runs whose S-pairs exceed weighted degree ``cap``."""
    old = _degree_cap[0]
    _degree_cap[0] = cap
    try:
        yield
    finally:
        _degree_cap[0] = old


def set_degree_cap(cap):
    _degree_cap[0] = cap


# ---------------------------------------------------------------- helpers


def _divides(a, b):
    # exps only; a, b are exponent tuples without position
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def lead(vec, order):
    return max(vec, key=order.key)


def make_monic(vec, order, F):
    lm = lead(vec, order)
    c = vec[lm]
    if c == 1:
        return vec
    return vec_scale(vec, F.inv(c), F)


class _Reducers:
    """Lookup of reducers by leading term; ring reducers act at every position."""

    def __init__(self, ring_basis=()):
        self.by_pos = {}
        self.ring = [(g_lead[1:], g) for g_lead, g in ring_basis]

    def add(self, lm, vec):
        self.by_pos.setdefault(lm[0], []).append((lm[1:], vec, lm[0]))

    def find(self, lm):
        e = lm[1:]
        for ge, g in self.ring:
            if _divides(ge, e):
                return ge, g, 0
        for ge, g, p in self.by_pos.get(lm[0], ()):
            if _divides(ge, e):
                return ge, g, p
        return None


def _reduce(f, reducers, order, F, full=True):
    key = order.key
    p = F.p
    f = dict(f)
    rem = {}
    while f:
        lm = max(f, key=key)
        red = reducers.find(lm)
        if red is None:
            if not full:
                f.update(rem)
                return f
            rem[lm] = f.pop(lm)
            continue
        ge, g, gpos = red
        c = f[lm]
        dpos = lm[0] - gpos
        q = tuple(a - b for a, b in zip(lm[1:], ge))
        for m, gc in g.items():
            mm = (m[0] + dpos,) + tuple(x + y for x, y in zip(q, m[1:]))
            v = f.get(mm, 0) - c * gc
            if p:
                v %= p
            if v:
                f[mm] = v
            else:
                f.pop(mm, None)
    return rem


def _ring_reducers(modulo, order):
    out = []
    for g in modulo:
        out.append((lead(g, order), g))
    return out


def _single_pos(vec):
    it = iter(vec)
    p = next(it)[0]
    return all(m[0] == p for m in it)


def _lcm(a, b):
    return (a[0],) + tuple(max(x, y) for x, y in zip(a[1:], b[1:]))


def _spoly(f, lf, g, lg, order, F, dpos_g=0):
    l = _lcm(lf, lg)
    qf = tuple(x - y for x, y in zip(l[1:], lf[1:]))
    qg = tuple(x - y for x, y in zip(l[1:], lg[1:]))
    r = {}
    p = F.p
    for m, c in f.items():
        mm = (m[0],) + tuple(x + y for x, y in zip(qf, m[1:]))
        r[mm] = c
    for m, c in g.items():
        mm = (m[0] + dpos_g,) + tuple(x + y for x, y in zip(qg, m[1:]))
        v = r.get(mm, 0) - c
        if p:
            v %= p
        if v:
            r[mm] = v
        else:
            r.pop(mm, None)
    return r


# ---------------------------------------------------------------- Buchberger


def groebner_basis(gens, order, F, modulo=(), degree_cap=None):
    """Reduced Groebner basis of ``span(gens) + J*free`` (J = ``modulo``).

    Only the elements not already accounted for by ``modulo`` are
    returned; ``modulo`` must itself be a reduced Groebner basis (of an
    ideal, vectors at position 0) for the same weights.  Output is sorted
    by leading term, descending, so it is reproducible.
    """
    cap = degree_cap if degree_cap is not None else _degree_cap[0]
    key = order.key
    ring_basis = _ring_reducers(modulo, order)
    reducers = _Reducers(ring_basis)
    G = []
    leads = []
    pending = set()
    heap = []

    def push_pairs(k):
        lk = leads[k]
        fk = G[k]
        for i in range(k):
            li = leads[i]
            if li[0] != lk[0]:
                continue
            l = _lcm(li, lk)
            if _single_pos(fk) and _single_pos(G[i]) and all(
                min(a, b) == 0 for a, b in zip(li[1:], lk[1:])
            ):
                continue
            pending.add((i, k))
            heapq.heappush(heap, (key(l), i, k))
        for r, (rl, rg) in enumerate(ring_basis):
            rl_here = (lk[0],) + rl[1:]
            if _single_pos(fk) and all(min(a, b) == 0 for a, b in zip(rl[1:], lk[1:])):
                continue
            l = _lcm(rl_here, lk)
            pending.add((-1 - r, k))
            heapq.heappush(heap, (key(l), -1 - r, k))

    def insert(h):
        h = make_monic(h, order, F)
        lm = lead(h, order)
        G.append(h)
        leads.append(lm)
        reducers.add(lm, h)
        push_pairs(len(G) - 1)

    for g in gens:
        if not g:
            continue
        h = _reduce(g, reducers, order, F)
        if h:
            insert(h)

    while heap:
        lkey, i, k = heapq.heappop(heap)
        if (i, k) not in pending:
            continue
        pending.discard((i, k))
        lk = leads[k]
        if i >= 0:
            li = leads[i]
            l = _lcm(li, lk)
            if _chain_skip(i, k, l, leads, pending):
                continue
            s = _spoly(G[i], li, G[k], lk, order, F)
        else:
            rl, rg = ring_basis[-1 - i]
            rl_here = (lk[0],) + rl[1:]
            l = _lcm(rl_here, lk)
            s = _spoly(G[k], lk, rg, rl, order, F, dpos_g=lk[0])
        if cap is not None and order.degree(l) > cap:
            raise DegreeCapExceeded(f"S-pair degree {order.degree(l)} exceeds cap {cap}")
        if not s:
            continue
        h = _reduce(s, reducers, order, F)
        if h:
            insert(h)

    return _interreduce(G, leads, ring_basis, order, F)


def _chain_skip(i, k, l, leads, pending):
    pos = l[0]
    e = l[1:]
    for j, lj in enumerate(leads):
        if j == i or j == k or lj[0] != pos:
            continue
        if not _divides(lj[1:], e):
            continue
        a, b = (i, j) if i < j else (j, i)
        c, d = (k, j) if k < j else (j, k)
        if (a, b) not in pending and (c, d) not in pending:
            return True
    return False


def _interreduce(G, leads, ring_basis, order, F):
    keep = []
    for idx, lm in enumerate(leads):
        dominated = False
        for jdx, lj in enumerate(leads):
            if jdx == idx or lj[0] != lm[0]:
                continue
            if _divides(lj[1:], lm[1:]) and (lj != lm or jdx < idx):
                dominated = True
                break
        if not dominated:
            keep.append(idx)
    out = []
    for idx in keep:
        others = _Reducers(ring_basis)
        for jdx in keep:
            if jdx != idx:
                others.add(leads[jdx], G[jdx])
        g = G[idx]
        lm = leads[idx]
        tail = dict(g)
        c = tail.pop(lm)
        tail = _reduce(tail, others, order, F)
        tail[lm] = c
        out.append(make_monic(tail, order, F))
    out.sort(key=lambda v: (order.key(lead(v, order)), sorted(order.key(m) for m in v)), reverse=True)
    return out


def normal_form_vec(f, basis, order, F, modulo=()):
    red = _Reducers(_ring_reducers(modulo, order))
    for g in basis:
        red.add(lead(g, order), g)
    return _reduce(f, red, order, F)


def spairs_reduce_to_zero(basis, order, F, modulo=()):
    """Direct check of Buchberger's criterion on every S-pair."""
    red = _Reducers(_ring_reducers(modulo, order))
    leads = [lead(g, order) for g in basis]
    for g, l in zip(basis, leads):
        red.add(l, g)
    for k, lk in enumerate(leads):
        for i in range(k):
            if leads[i][0] != lk[0]:
                continue
            s = _spoly(basis[i], leads[i], basis[k], lk, order, F)
            if s and _reduce(s, red, order, F):
                return False
        for rg in modulo:
            rl = lead(rg, order)
            s = _spoly(basis[k], lk, rg, rl, order, F, dpos_g=lk[0])
            if s and _reduce(s, red, order, F):
                return False
    return True


# ---------------------------------------------------------------- user-facing bases


@dataclass
class GroebnerBasis:
    """Reduced Groebner basis of an ideal or a submodule of ``R^rank``."""

    ring: PolyRing
    generators: list
    order: TermOrder
    rank: int = 1
    modulo: tuple = ()
    reduced: bool = True
    _red: object = dc_field(default=None, repr=False, compare=False)

    def _reducers(self):
        if self._red is None:
            red = _Reducers(_ring_reducers(self.modulo, self.order))
            for g in self.generators:
                red.add(lead(g, self.order), g)
            self._red = red
        return self._red

    def reduce_vec(self, vec):
        return _reduce(vec, self._reducers(), self.order, self.ring.field)

    def normal_form(self, f):
        if isinstance(f, Poly):
            if f.ring != self.ring:
                raise OrderMismatch("polynomial ring differs from the basis ring")
            r = self.reduce_vec(poly_to_vec(f.terms))
            return Poly(self.ring, {m[1:]: c for m, c in r.items()})
        return self.reduce_vec(f)

    def contains(self, f):
        return not self.normal_form(f)

    def polys(self):
        return [Poly(self.ring, {m[1:]: c for m, c in g.items()}) for g in self.generators]

    def leading_terms(self):
        return [lead(g, self.order) for g in self.generators]

    def is_groebner(self):
        return spairs_reduce_to_zero(self.generators, self.order, self.ring.field, self.modulo)

    def is_reduced(self):
        F = self.ring.field
        leads = self.leading_terms()
        mod_leads = [lead(g, self.order)[1:] for g in self.modulo]
        for g, l in zip(self.generators, leads):
            if g[l] != F.one:
                return False
            for m in g:
                for h, lh in zip(self.generators, leads):
                    if h is g:
                        continue
                    if lh[0] == m[0] and _divides(lh[1:], m[1:]):
                        return False
                if any(_divides(ml, m[1:]) for ml in mod_leads):
                    return False
        return True

    def __len__(self):
        return len(self.generators)


def _as_vecs(gens):
    out = []
    for g in gens:
        if isinstance(g, Poly):
            out.append(poly_to_vec(g.terms))
        else:
            out.append(dict(g))
    return out


def buchberger(gens, ring=None, order=None, modulo=(), rank=1, degree_cap=None):
    """Reduced Groebner basis of polynomials (or vectors) ``gens``.

    ``modulo`` holds ideal generators (Polys or pos-0 vectors) of a
    quotient; it is itself turned into a reduced basis first.
    """
    if ring is None:
        ring = next(g.ring for g in gens if isinstance(g, Poly))
    order = order or ring.order
    F = ring.field
    mod = ()
    if modulo:
        mod = tuple(groebner_basis(_as_vecs(modulo), ring.order, F, degree_cap=degree_cap))
    G = groebner_basis(_as_vecs(gens), order, F, modulo=mod, degree_cap=degree_cap)
    return GroebnerBasis(ring, G, order, rank=rank, modulo=mod)


def normal_form(f, G):
    return G.normal_form(f)


# ---------------------------------------------------------------- syzygies and lifting


def _shift_of(vec, order):
    return order.degree(lead(vec, order)) if vec else 0


class Lifter:
    """Elimination-order basis of ``(c_j ; e_j)`` for membership with witnesses.

    ``columns`` are vectors in ``S^rank``; the block order makes the
    first ``rank`` positions dominate so the tracking block records how
    each element is built from the columns.
    """

    def __init__(self, columns, rank, weights, F, modulo=(), shifts=None, track=None):
        self.rank = rank
        self.m = len(columns)
        self.F = F
        base_shifts = list(shifts) if shifts else [0] * rank
        base_shifts += [0] * (rank - len(base_shifts))
        base = TermOrder(weights, base_shifts)
        if track is None:
            track = [_shift_of(c, base) for c in columns]
        self.order = TermOrder(weights, base_shifts + track, elim=rank)
        gens = []
        for j, c in enumerate(columns):
            v = dict(c)
            v[(rank + j,) + (0,) * len(weights)] = F.one
            gens.append(v)
        self.modulo = tuple(modulo)
        self.basis = groebner_basis(gens, self.order, F, modulo=self.modulo)
        self._red = _Reducers(_ring_reducers(self.modulo, self.order))
        for g in self.basis:
            self._red.add(lead(g, self.order), g)

    def syzygies(self):
        """Generators (vectors in ``S^m``) of ``{u : sum u_j c_j in J*S^rank}``."""
        out = []
        for g in self.basis:
            if lead(g, self.order)[0] >= self.rank:
                out.append(vec_restrict(g, self.rank, self.rank + self.m, self.rank))
        return out

    def span_basis(self):
        """Projection of the block-one part: a Groebner basis of the span."""
        return [
            vec_restrict(g, 0, self.rank)
            for g in self.basis
            if lead(g, self.order)[0] < self.rank
        ]

    def lift(self, v):
        """Coefficients ``u`` (vector in ``S^m``) with ``v = sum u_j c_j`` mod J, else None."""
        r = _reduce(v, self._red, self.order, self.F)
        if any(m[0] < self.rank for m in r):
            return None
        return vec_scale(vec_restrict(r, self.rank, self.rank + self.m, self.rank), -1, self.F)


def syzygies(columns, rank, weights, F, modulo=(), shifts=None):
    """Module of relations among ``columns`` (vectors in ``S^rank``) modulo J."""
    return Lifter(columns, rank, weights, F, modulo, shifts).syzygies()


# ---------------------------------------------------------------- toric ideals


def toric_ideal(semigroup, field=None, names=None):
    """Kernel of ``x_i -> t^a_i`` by eliminating ``t``; returns (ring, reduced basis)."""
    from .poly import QQ

    a = [int(v) for v in semigroup]
    if not a or any(v <= 0 for v in a):
        raise ValueError("semigroup generators must be positive integers")
    F = field or QQ
    n = len(a)
    if names is None:
        names = ["x", "y", "z", "w"][:n] if n <= 4 else [f"x{i+1}" for i in range(n)]
    ring = PolyRing(names, a, F)
    big_order = TermOrder((1,) + tuple(a), elim_vars=1)
    gens = []
    for i, ai in enumerate(a):
        e = [0] * (n + 1)
        e[i + 1] = 1
        t = [0] * (n + 1)
        t[0] = ai
        gens.append({(0,) + tuple(e): F.one, (0,) + tuple(t): F(-1)})
    G = groebner_basis(gens, big_order, F)
    kept = [{(0,) + m[2:]: c for m, c in g.items()} for g in G if all(m[1] == 0 for m in g)]
    basis = groebner_basis(kept, ring.order, F)
    return ring, GroebnerBasis(ring, basis, ring.order)


# ---------------------------------------------------------------- colon and saturation


def colon(target, f, rank, weights, F, modulo=(), shifts=None):
    """``{v in S^rank : f*v in span(target) + J*S^rank}`` as generating vectors.

    ``f`` is a polynomial given as exps -> coeff.
    """
    if not f:
        raise ValueError("colon by the zero element")
    cols = []
    for i in range(rank):
        cols.append({(i,) + e: c for e, c in f.items()})
    cols.extend(target)
    sh = list(shifts) if shifts else [0] * rank
    L = Lifter(cols, rank, weights, F, modulo, sh)
    out = []
    for s in L.syzygies():
        v = vec_restrict(s, 0, rank)
        if v:
            out.append(v)
    return out


def same_span(a, b, rank, weights, F, modulo=(), shifts=None):
    order = TermOrder(weights, shifts)
    Ga = groebner_basis(a, order, F, modulo)
    Gb = groebner_basis(b, order, F, modulo)
    return Ga == Gb


def saturate(target, f, rank, weights, F, modulo=(), shifts=None, max_steps=MAX_SATURATION_STEPS):
    """Iterated colon by ``f`` until stable; returns (generators, exponent).

    The exponent is the first ``k`` with ``target : f^k = target : f^(k+1)``.
    """
    order = TermOrder(weights, shifts)
    cur = groebner_basis(target, order, F, modulo)
    for k in range(max_steps + 1):
        nxt = groebner_basis(colon(cur, f, rank, weights, F, modulo, shifts), order, F, modulo)
        if nxt == cur:
            return cur, k
        cur = nxt
    raise SaturationDiverged(f"saturation did not stabilize within {max_steps} steps")
