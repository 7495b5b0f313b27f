"""Independent checks that avoid module Groebner bases.

Membership of a homogeneous vector in a graded submodule is decided by
linear algebra in a single degree: the degree-d part of the submodule is
spanned by standard monomials times the generators.
"""

import sympy

from startensor.fpmod import vec_degree


def graded_rows(ring, gens, shifts, d):
    rows = []
    for g in gens:
        if not g:
            continue
        dg = vec_degree(g, shifts, ring)
        if dg > d:
            continue
        for e in ring.standard_monomials(d - dg):
            w = {}
            for m, c in g.items():
                k = (m[0],) + tuple(a + b for a, b in zip(e, m[1:]))
                w[k] = w.get(k, 0) + c
            w = ring.reduce_vec({k: v for k, v in w.items() if v})
            if w:
                rows.append(w)
    return rows


def _rank(rows, keys, p):
    idx = {k: i for i, k in enumerate(keys)}
    mat = sympy.zeros(len(rows), len(keys))
    for r, row in enumerate(rows):
        for k, v in row.items():
            mat[r, idx[k]] = sympy.Rational(int(v.numerator), int(v.denominator)) if hasattr(v, "numerator") else v
    if p:
        return _rank_mod_p(mat, p)
    return mat.rank()


def _rank_mod_p(mat, p):
    rows = [[int(x) % p for x in mat.row(i)] for i in range(mat.rows)]
    rank = 0
    ncols = mat.cols
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], p - 2, p)
        for r in range(len(rows)):
            if r != rank and rows[r][c]:
                f = rows[r][c] * inv % p
                rows[r] = [(x - f * y) % p for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def in_graded_span(ring, target, gens, shifts):
    """Whether homogeneous ``target`` lies in span(gens) + J-multiples."""
    target = ring.reduce_vec(target)
    if not target:
        return True
    d = vec_degree(target, shifts, ring)
    rows = graded_rows(ring, gens, shifts, d)
    keys = sorted({k for r in rows + [target] for k in r})
    p = ring.F.p
    return _rank(rows, keys, p) == _rank(rows + [target], keys, p)


# ---------------------------------------------------------------- semigroup-ring oracle
# k[x_1..x_n]/J embeds in k[t] via x_i -> t^a_i, so membership questions in
# free R-modules become linear algebra over k[t] with no Groebner basis at all.


def in_semigroup(d, semigroup):
    reach = {0}
    for v in range(1, d + 1):
        if any(v - a in reach for a in semigroup):
            reach.add(v)
    return d in reach


def t_image(vec, semigroup):
    out = {}
    for m, c in vec.items():
        k = (m[0], sum(a * e for a, e in zip(semigroup, m[1:])))
        out[k] = out.get(k, 0) + c
    return {k: v for k, v in out.items() if v}


def t_in_span(semigroup, target, gens, shifts, p=0):
    """Membership of homogeneous ``target`` in span(gens) inside R^n, via t-images."""
    tgt = t_image(target, semigroup)
    if p:
        tgt = {k: v % p for k, v in tgt.items() if v % p}
    if not tgt:
        return True
    degs = {k[1] + shifts[k[0]] for k in tgt}
    assert len(degs) == 1, "target must be homogeneous"
    d = degs.pop()
    rows = []
    for g in gens:
        img = t_image(g, semigroup)
        if not img:
            continue
        dg = {k[1] + shifts[k[0]] for k in img}
        assert len(dg) == 1, "generators must be homogeneous"
        s = d - dg.pop()
        if s >= 0 and in_semigroup(s, semigroup):
            rows.append({(k[0], k[1] + s): v for k, v in img.items()})
    keys = sorted({k for r in rows + [tgt] for k in r})
    return _rank(rows, keys, p) == _rank(rows + [tgt], keys, p)


def t_is_zero(f, semigroup, p=0):
    img = t_image({(0,) + e: c for e, c in f.items()}, semigroup)
    return all((v % p == 0) if p else v == 0 for v in img.values())


def t_generic_rank(rows, semigroup):
    """Rank over k(t) of a matrix of ring elements (poly dicts) after x_i -> t^a_i."""
    t = sympy.Symbol("t")
    mat = sympy.Matrix(
        [
            [sum(sympy.Rational(c) * t ** sum(a * e for a, e in zip(semigroup, ex)) for ex, c in entry.items()) for entry in row]
            for row in rows
        ]
    )
    return mat.rank(simplify=True)


def semigroup_rank_profile(ring, semigroup, top):
    """Per degree: (standard monomial count, 1 if the degree is in the semigroup)."""
    return [(len(ring.standard_monomials(d)), int(in_semigroup(d, semigroup))) for d in range(top)]
