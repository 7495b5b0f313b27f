"""Brute-force checks over tiny finite commutative rings.

Nothing here touches the Groebner machinery: involutions on ``M_n(R)``
are found by backtracking over images of matrix units, and the balanced
tensor product ``R^n_* (x)_{M_n(R)} R^n`` is built as a finite abelian
group from its symbols.
"""

from __future__ import annotations

import itertools
from math import gcd

import numpy as np

MAX_ORDER = 8
MAX_N = 2
MAX_SYMBOLS = 4096


class SizeBoundExceeded(ValueError):
    pass


class FiniteRing:
    """Finite commutative ring on ``0..q-1`` given by addition and multiplication tables."""

    def __init__(self, name, q, add, mul, char):
        self.name = name
        self.q = q
        self.add_t = add
        self.mul_t = mul
        self.char = char
        self.zero = 0
        self.one = 1
        self.neg_t = [next(b for b in range(q) if add[a][b] == 0) for a in range(q)]
        self.units = [a for a in range(q) if any(mul[a][b] == 1 for b in range(q))]
        self.inv_t = {a: next(b for b in range(q) if mul[a][b] == 1) for a in self.units}
        self.check_axioms()

    def __repr__(self):
        return f"FiniteRing({self.name})"

    def __len__(self):
        return self.q

    @classmethod
    def zmod(cls, m):
        if not 2 <= m <= MAX_ORDER:
            raise SizeBoundExceeded(f"Z/{m} exceeds the size bound")
        add = [[(a + b) % m for b in range(m)] for a in range(m)]
        mul = [[(a * b) % m for b in range(m)] for a in range(m)]
        return cls(f"Z/{m}", m, add, mul, m)

    @classmethod
    def dual_numbers_f2(cls):
        """``F2[e]/(e^2)`` with ``a + b e`` encoded as ``a + 2 b``."""

        def dec(v):
            return v & 1, v >> 1

        def enc(a, b):
            return (a % 2) + 2 * (b % 2)

        add = [[enc(dec(u)[0] + dec(v)[0], dec(u)[1] + dec(v)[1]) for v in range(4)] for u in range(4)]
        mul = [
            [enc(dec(u)[0] * dec(v)[0], dec(u)[0] * dec(v)[1] + dec(u)[1] * dec(v)[0]) for v in range(4)]
            for u in range(4)
        ]
        return cls("F2[e]/(e^2)", 4, add, mul, 2)

    @classmethod
    def from_name(cls, name):
        name = name.lower().replace(" ", "")
        if name in ("f2", "gf2", "z2"):
            return cls.zmod(2)
        if name.startswith("z") and name[1:].isdigit():
            return cls.zmod(int(name[1:]))
        if name.startswith("z/") and name[2:].isdigit():
            return cls.zmod(int(name[2:]))
        if name in ("f2eps", "f2[e]", "dual", "f2[e]/(e^2)"):
            return cls.dual_numbers_f2()
        raise ValueError(f"unknown finite ring {name!r}")

    def check_axioms(self):
        q, A, M = self.q, self.add_t, self.mul_t
        R = range(q)
        for a in R:
            if A[a][0] != a or M[a][1] != a:
                raise ValueError("identity law fails")
            for b in R:
                if A[a][b] != A[b][a] or M[a][b] != M[b][a]:
                    raise ValueError("commutativity fails")
                for c in R:
                    if A[A[a][b]][c] != A[a][A[b][c]]:
                        raise ValueError("additive associativity fails")
                    if M[M[a][b]][c] != M[a][M[b][c]]:
                        raise ValueError("multiplicative associativity fails")
                    if M[a][A[b][c]] != A[M[a][b]][M[a][c]]:
                        raise ValueError("distributivity fails")

    def add(self, a, b):
        return self.add_t[a][b]

    def mul(self, a, b):
        return self.mul_t[a][b]

    def neg(self, a):
        return self.neg_t[a]

    def sub(self, a, b):
        return self.add_t[a][self.neg_t[b]]

    def additive_generators(self):
        """A small generating set of the additive group."""
        gens, span = [], {0}
        for a in range(1, self.q):
            if a in span:
                continue
            gens.append(a)
            frontier = list(span)
            while frontier:
                b = frontier.pop()
                for g in gens:
                    c = self.add_t[b][g]
                    if c not in span:
                        span.add(c)
                        frontier.append(c)
        return gens

    def involutive_scalars(self):
        return [a for a in self.units if self.mul(a, a) == 1]


# ---------------------------------------------------------------- matrices


def all_matrices(R, n):
    for entries in itertools.product(range(R.q), repeat=n * n):
        yield tuple(tuple(entries[i * n : (i + 1) * n]) for i in range(n))


def mmul(R, A, B):
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            s = 0
            for k in range(n):
                s = R.add_t[s][R.mul_t[A[i][k]][B[k][j]]]
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def madd(R, A, B):
    return tuple(tuple(R.add_t[a][b] for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mscale(R, c, A):
    return tuple(tuple(R.mul_t[c][a] for a in r) for r in A)


def mT(A):
    return tuple(zip(*A))


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zero(n):
    return tuple(tuple(0 for _ in range(n)) for _ in range(n))


def unit(n, k, l):
    return tuple(tuple(1 if (i, j) == (k, l) else 0 for j in range(n)) for i in range(n))


def mdet(R, A):
    n = len(A)
    if n == 1:
        return A[0][0]
    if n == 2:
        return R.sub(R.mul(A[0][0], A[1][1]), R.mul(A[0][1], A[1][0]))
    raise SizeBoundExceeded("n > 2")


def minv(R, A):
    d = mdet(R, A)
    if d not in R.inv_t:
        return None
    di = R.inv_t[d]
    n = len(A)
    if n == 1:
        return ((di,),)
    adj = ((A[1][1], R.neg(A[0][1])), (R.neg(A[1][0]), A[0][0]))
    return mscale(R, di, adj)


def mvec(R, A, x):
    return tuple(
        _sum(R, (R.mul(A[i][k], x[k]) for k in range(len(x)))) for i in range(len(A))
    )


def _sum(R, it):
    s = 0
    for v in it:
        s = R.add_t[s][v]
    return s


# ---------------------------------------------------------------- involutions


class LinearMap:
    """R-linear map on ``M_n(R)`` given by the images of the matrix units."""

    def __init__(self, R, n, images):
        self.R = R
        self.n = n
        self.images = dict(images)

    def __call__(self, A):
        R, n = self.R, self.n
        out = zero(n)
        for k in range(n):
            for l in range(n):
                if A[k][l]:
                    out = madd(R, out, mscale(R, A[k][l], self.images[(k, l)]))
        return out

    def key(self):
        return tuple(self.images[(k, l)] for k in range(self.n) for l in range(self.n))


def _check_size(R, n):
    if n > MAX_N or n < 1:
        raise SizeBoundExceeded(f"n = {n} outside 1..{MAX_N}")
    if R.q > MAX_ORDER:
        raise SizeBoundExceeded(f"|R| = {R.q} exceeds {MAX_ORDER}")


def enumerate_involutions(n, R, exhaustive_pairs=True):
    """All R-linear anti-automorphisms of ``M_n(R)`` squaring to the identity.

    Backtracks over the images of matrix units with the constraints
    ``phi(E_kl) phi(E_ij) = delta_jk phi(E_il)`` and ``sum phi(E_ii) = 1``,
    then verifies the axioms on every pair of matrices.
    """
    _check_size(R, n)
    units = [(k, l) for k in range(n) for l in range(n)]
    order = [(i, i) for i in range(n)] + [u for u in units if u[0] != u[1]]
    mats = list(all_matrices(R, n))
    Z = zero(n)
    found = []

    def consistent(assign):
        for (i, j), Pij in assign.items():
            for (k, l), Pkl in assign.items():
                # E_ij E_kl = delta_jk E_il, so phi(E_kl) phi(E_ij) = delta_jk phi(E_il)
                lhs = mmul(R, Pkl, Pij)
                if j == k:
                    if (i, l) in assign and lhs != assign[(i, l)]:
                        return False
                elif lhs != Z:
                    return False
        if all((i, i) in assign for i in range(n)):
            s = Z
            for i in range(n):
                s = madd(R, s, assign[(i, i)])
            if s != identity(n):
                return False
        return True

    def rec(idx, assign):
        if idx == len(order):
            found.append(LinearMap(R, n, assign))
            return
        u = order[idx]
        for P in mats:
            assign[u] = P
            if consistent(assign):
                rec(idx + 1, assign)
            del assign[u]

    rec(0, {})
    out = []
    for phi in found:
        if all(phi(phi(unit(n, *u))) == unit(n, *u) for u in units) and _verify_involution(
            R, n, phi, mats if exhaustive_pairs else None
        ):
            out.append(phi)
    out.sort(key=lambda p: p.key())
    return out


class _MatrixTable:
    """All matrices of ``M_n(R)`` with a full product table, via ring lookup tables."""

    _cache = {}

    def __init__(self, R, n):
        self.R, self.n = R, n
        q = R.q
        self.add = np.array(R.add_t, dtype=np.int64)
        self.mul = np.array(R.mul_t, dtype=np.int64)
        self.mats = list(all_matrices(R, n))
        self.arr = np.array(self.mats, dtype=np.int64).reshape(-1, n, n)
        self.weights = q ** np.arange(n * n - 1, -1, -1, dtype=np.int64)
        A = self.arr[:, None]
        B = self.arr[None, :]
        self.prod = self.index(self._matmul(A, B))

    @classmethod
    def get(cls, R, n):
        key = (R.name, n)
        if key not in cls._cache:
            cls._cache[key] = cls(R, n)
        return cls._cache[key]

    def _matmul(self, A, B):
        n = self.n
        shape = np.broadcast_shapes(A.shape, B.shape)
        out = np.zeros(shape, dtype=np.int64)
        for i in range(n):
            for j in range(n):
                s = np.zeros(shape[:-2], dtype=np.int64)
                for k in range(n):
                    s = self.add[s, self.mul[A[..., i, k], B[..., k, j]]]
                out[..., i, j] = s
        return out

    def index(self, arr):
        flat = arr.reshape(arr.shape[:-2] + (self.n * self.n,))
        return flat @ self.weights

    def image_table(self, phi):
        """Index of ``phi(A)`` for every matrix A, by R-linearity on the units."""
        n = self.n
        out = np.zeros(self.arr.shape, dtype=np.int64)
        for k in range(n):
            for l in range(n):
                P = np.array(phi.images[(k, l)], dtype=np.int64)
                coef = self.arr[:, k, l][:, None, None]
                out = self.add[out, self.mul[coef, P[None]]]
        return self.index(out)


def _verify_involution(R, n, phi, mats):
    """Axioms on every pair of matrices (or on matrix units when ``mats`` is None)."""
    if mats is None:
        units = [unit(n, k, l) for k in range(n) for l in range(n)]
        if phi(identity(n)) != identity(n):
            return False
        for A in units:
            if phi(phi(A)) != A:
                return False
            for B in units:
                if phi(mmul(R, A, B)) != mmul(R, phi(B), phi(A)):
                    return False
        return True
    tab = _MatrixTable.get(R, n)
    ph = tab.image_table(phi)
    K = len(ph)
    ident = tab.mats.index(identity(n))
    if ph[ident] != ident:
        return False
    if not np.array_equal(ph[ph], np.arange(K)):
        return False
    lhs = ph[tab.prod]
    rhs = tab.prod[ph][:, ph].T
    return bool(np.array_equal(lhs, rhs))


def certificate_star(R, C):
    Ci = minv(R, C)
    n = len(C)

    def act(A):
        return mmul(R, mmul(R, Ci, mT(A)), C)

    return LinearMap(R, n, {(k, l): act(unit(n, k, l)) for k in range(n) for l in range(n)})


def enumerate_certificates(n, R):
    """All ``(C, a)`` with C invertible, ``C^T = a C`` and ``a^2 = 1``."""
    _check_size(R, n)
    out = []
    scalars = R.involutive_scalars()
    for C in all_matrices(R, n):
        if minv(R, C) is None:
            continue
        CT = mT(C)
        for a in scalars:
            if CT == mscale(R, a, C):
                out.append((C, a))
    return out


def compare_with_certificates(n, R):
    """Both directions of the correspondence between involutions and certificates."""
    invs = enumerate_involutions(n, R)
    inv_keys = {p.key() for p in invs}
    certs = enumerate_certificates(n, R)
    cert_keys = {}
    for C, a in certs:
        cert_keys.setdefault(certificate_star(R, C).key(), []).append((C, a))
    closed = True
    invertible = [P for P in all_matrices(R, n) if minv(R, P) is not None]
    for C, _ in certs[:8]:
        for P in invertible:
            C2 = mmul(R, mmul(R, mT(P), C), P)
            if certificate_star(R, C2).key() not in inv_keys:
                closed = False
    return {
        "ring": R.name,
        "n": n,
        "involutions": len(inv_keys),
        "certificates": len(certs),
        "every_involution_has_certificate": inv_keys <= set(cert_keys),
        "every_certificate_gives_involution": set(cert_keys) <= inv_keys,
        "closed_under_congruence": closed,
    }


# ---------------------------------------------------------------- dense tensor product


class _Lattice:
    """Subgroup of ``Z^N`` containing ``m Z^N``, as sparse triangular pivot rows.

    Columns are eliminated from the highest index down, so pivot rows
    express complicated symbols through simpler ones and stay sparse.
    """

    def __init__(self, N, m):
        self.N = N
        self.m = m
        self.rows = {}

    def _norm(self, v):
        m = self.m
        return {k: c % m for k, c in v.items() if c % m}

    @staticmethod
    def _combine(s, v, t, w, m):
        out = {}
        for k, c in v.items():
            out[k] = s * c
        for k, c in w.items():
            out[k] = out.get(k, 0) + t * c
        return {k: c % m for k, c in out.items() if c % m}

    def insert(self, v):
        m = self.m
        v = self._norm(v)
        while v:
            c = max(v)
            a = v[c]
            if c not in self.rows:
                g = gcd(a, m)
                if g != a:
                    # scale to the gcd using a unit multiple
                    u = next(u for u in range(1, m) if gcd(u, m) == 1 and (u * a) % m == g)
                    v = self._combine(u, v, 0, {}, m)
                self.rows[c] = v
                # (m/g) * v has no entry in column c but may carry later ones
                v = self._combine(m // g, v, 0, {}, m)
                continue
            P = self.rows[c]
            b = P[c]
            if a % b == 0:
                v = self._combine(1, v, -(a // b), P, m)
                continue
            g, s_, t_ = _xgcd(a, b)
            new = self._combine(s_, v, t_, P, m)
            rem = self._combine(b // g, v, -(a // g), P, m)
            self.rows[c] = new
            self.insert(self._combine(m // gcd(g, m), new, 0, {}, m))
            v = rem

    def contains(self, v):
        m = self.m
        v = self._norm(v)
        while v:
            c = max(v)
            if c not in self.rows:
                return False
            P = self.rows[c]
            b = P[c]
            if v[c] % b:
                return False
            v = self._combine(1, v, -(v[c] // b), P, m)
        return True

    def order(self):
        out = 1
        for c in range(self.N):
            out *= self.rows[c][c] if c in self.rows else self.m
        return out


def _xgcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def dense_tensor_check(n, C, a, R):
    """Build ``R^n_* (x)_{M_n(R)} R^n`` as a finite abelian group and test it."""
    _check_size(R, n)
    vecs = list(itertools.product(range(R.q), repeat=n))
    nsym = len(vecs) ** 2
    if nsym > MAX_SYMBOLS:
        raise SizeBoundExceeded(f"{nsym} symbols exceed {MAX_SYMBOLS}")
    if minv(R, C) is None:
        raise ValueError("C is not invertible")
    idx = {v: i for i, v in enumerate(vecs)}
    nv = len(vecs)

    def sym(x, y):
        return idx[x] * nv + idx[y]

    L = _Lattice(nsym, R.char)
    star = certificate_star(R, C)

    def vadd(x, y):
        return tuple(R.add(p, q) for p, q in zip(x, y))

    def rel(*terms):
        v = {}
        for coef, s in terms:
            v[s] = v.get(s, 0) + coef
        return v

    # the lattice is generated using additive generators only; by
    # biadditivity this spans the same subgroup as all relations
    add_gens = R.additive_generators()
    gvecs = [tuple(r if i == k else 0 for i in range(n)) for r in add_gens for k in range(n)]
    gmats = [tuple(tuple(r if (i, j) == (k, l) else 0 for j in range(n)) for i in range(n))
             for r in add_gens for k in range(n) for l in range(n)]
    for x, g, y in itertools.product(vecs, gvecs, vecs):
        L.insert(rel((1, sym(vadd(x, g), y)), (-1, sym(x, y)), (-1, sym(g, y))))
        L.insert(rel((1, sym(y, vadd(x, g))), (-1, sym(y, x)), (-1, sym(y, g))))
    for A in gmats:
        As = star(A)
        for x, y in itertools.product(vecs, repeat=2):
            L.insert(rel((1, sym(mvec(R, As, x), y)), (-1, sym(x, mvec(R, A, y)))))

    th = [[0] * nv for _ in range(nv)]
    for x in vecs:
        for y in vecs:
            Cy = mvec(R, C, y)
            th[idx[x]][idx[y]] = _sum(R, (R.mul(p, q) for p, q in zip(x, Cy)))

    def theta(x, y):
        return th[idx[x]][idx[y]]

    # theta is checked against every relation, not only the generating ones
    well_defined = True
    for x, x2, y in itertools.product(vecs, repeat=3):
        if theta(vadd(x, x2), y) != R.add(theta(x, y), theta(x2, y)) or theta(
            y, vadd(x, x2)
        ) != R.add(theta(y, x), theta(y, x2)):
            well_defined = False
            break
    if well_defined:
        for A in all_matrices(R, n):
            As = star(A)
            imgs = [mvec(R, As, x) for x in vecs]
            Ays = [mvec(R, A, y) for y in vecs]
            if any(th[idx[imgs[i]]][j] != th[i][idx[Ays[j]]] for i in range(nv) for j in range(nv)):
                well_defined = False
                break
    surjective = {theta(x, y) for x, y in itertools.product(vecs, repeat=2)} == set(range(R.q))
    order = L.order()
    anti = all(
        L.contains(rel((1, sym(x, y)), (-1, sym(tuple(R.mul(a, c) for c in y), x))))
        for x, y in itertools.product(vecs, repeat=2)
    )
    e1 = tuple(1 if i == 0 else 0 for i in range(n))
    Ci = minv(R, C)
    witness = theta(e1, mvec(R, Ci, e1)) == 1
    return {
        "ring": R.name,
        "n": n,
        "group_order": order,
        "ring_order": R.q,
        "order_matches": order == R.q,
        "theta_well_defined": well_defined,
        "theta_bijective": well_defined and surjective and order == R.q,
        "antisymmetry": anti,
        "witness_maps_to_one": witness,
        "ok": well_defined and surjective and order == R.q and anti and witness,
    }
