"""Exact coefficient fields, weighted monomial orders and polynomials.

Polynomials are sparse maps from exponent tuples to field coefficients.
Module elements (vectors in a free module) use the same representation
with the component index prepended to every exponent tuple, so a term of
a vector is keyed by ``(pos, e1, ..., en)``.  The Groebner engine works
on that vector form; :class:`Poly` is the user-facing wrapper for ring
elements.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering

EXP_LIMIT = 2**31


class FieldMismatch(ValueError):
    pass


class ExponentOverflow(OverflowError):
    pass


class PolySyntaxError(ValueError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


class UnknownVariable(ValueError):
    def __init__(self, name, pos=None):
        where = "" if pos is None else f" at position {pos}"
        super().__init__(f"unknown variable {name!r}{where}")
        self.name = name


# ---------------------------------------------------------------- fields


class RationalField:
    """The rationals, with :class:`fractions.Fraction` elements."""

    char = 0
    p = 0

    def __call__(self, v):
        if isinstance(v, Fraction):
            return v
        return Fraction(v)

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def norm(self, a):
        return a

    def elements(self):
        raise ValueError("the rationals are infinite")

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"

    def tag(self):
        return "Q"


def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class PrimeField:
    """Integers modulo a prime ``p < 2**31``; elements are ints in ``[0, p)``."""

    def __init__(self, p):
        p = int(p)
        if not (p < 2**31 and _is_prime(p)):
            raise ValueError(f"{p} is not a prime below 2^31")
        self.p = self.char = p

    def __call__(self, v):
        if isinstance(v, Fraction):
            return v.numerator * pow(v.denominator, -1, self.p) % self.p
        return int(v) % self.p

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def norm(self, a):
        return a % self.p

    def elements(self):
        return range(self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"GF({self.p})"

    def tag(self):
        return {"Fp": self.p}


QQ = RationalField()


def GF(p):
    return PrimeField(p)


def field_from_tag(tag):
    """``"Q"`` or ``{"Fp": p}`` (also accepts ``"q"``, ``"fp:7"``, ``"f2"``)."""
    if isinstance(tag, dict):
        if set(tag) != {"Fp"}:
            raise ValueError(f"bad field tag {tag!r}")
        return PrimeField(tag["Fp"])
    t = str(tag).strip().lower()
    if t in ("q", "qq"):
        return QQ
    m = re.fullmatch(r"(?:fp:?|f|gf)\(?(\d+)\)?", t)
    if m:
        return PrimeField(int(m.group(1)))
    raise ValueError(f"bad field tag {tag!r}")


# ---------------------------------------------------------------- orders


def revlex_key(exps):
    return tuple(-e for e in reversed(exps))


class TermOrder:
    """Weighted graded reverse-lexicographic order on (module) terms.

    A term ``(pos, e)`` is compared by ``wdeg(e) + shifts[pos]`` first,
    then by reverse lexicographic order on ``e``, then lower ``pos`` wins
    (term-over-position).  ``elim`` makes every term with ``pos < elim``
    larger than all terms with ``pos >= elim``; this is the block order
    used for syzygies and lifting.  With ``pot=True`` the position is
    compared first instead.  ``elim_vars`` puts the total exponent in the
    first ``elim_vars`` variables ahead of everything else (variable
    elimination).
    """

    def __init__(self, weights, shifts=None, elim=None, pot=False, elim_vars=0):
        self.weights = tuple(int(w) for w in weights)
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        self.shifts = tuple(shifts) if shifts else ()
        self.elim = elim
        self.pot = pot
        self.elim_vars = elim_vars
        self._cache = {}

    def shift(self, pos):
        return self.shifts[pos] if pos < len(self.shifts) else 0

    def mdeg(self, exps):
        return sum(w * e for w, e in zip(self.weights, exps))

    def degree(self, mon):
        return self.mdeg(mon[1:]) + self.shift(mon[0])

    def key(self, mon):
        k = self._cache.get(mon)
        if k is None:
            pos = mon[0]
            e = mon[1:]
            d = sum(w * x for w, x in zip(self.weights, e))
            if pos < len(self.shifts):
                d += self.shifts[pos]
            if self.pot:
                k = (-pos, d, revlex_key(e))
            else:
                k = (d, revlex_key(e), -pos)
            if self.elim_vars:
                k = (sum(e[: self.elim_vars]),) + k
            if self.elim is not None:
                k = (pos < self.elim,) + k
            self._cache[mon] = k
        return k

    def with_shifts(self, shifts, elim=None):
        return TermOrder(self.weights, shifts, elim=elim, pot=self.pot)

    def __eq__(self, other):
        return (
            isinstance(other, TermOrder)
            and self.weights == other.weights
            and self.shifts == other.shifts
            and self.elim == other.elim
            and self.pot == other.pot
            and self.elim_vars == other.elim_vars
        )

    def __hash__(self):
        return hash((self.weights, self.shifts, self.elim, self.pot, self.elim_vars))

    def __repr__(self):
        return f"TermOrder(weights={self.weights})"


WeightedOrder = TermOrder


# ---------------------------------------------------------------- raw vector arithmetic
# Vectors: dict mapping (pos, e1..en) -> nonzero coefficient.


def mono_mul(a, b):
    r = tuple(x + y for x, y in zip(a, b))
    for e in r:
        if e >= EXP_LIMIT:
            raise ExponentOverflow("exponent exceeds 32-bit bound")
    return r


def vec_add(a, b, F, sign=1):
    r = dict(a)
    p = F.p
    for m, c in b.items():
        v = r.get(m, 0) + (c if sign == 1 else -c)
        if p:
            v %= p
        if v:
            r[m] = v
        else:
            r.pop(m, None)
    return r


def vec_sub(a, b, F):
    return vec_add(a, b, F, -1)


def vec_scale(a, c, F):
    """Multiply by a field scalar."""
    c = F(c)
    if not c:
        return {}
    p = F.p
    if p:
        return {m: v * c % p for m, v in a.items()}
    return {m: v * c for m, v in a.items()}


def vec_mul_poly(poly, vec, F):
    """Multiply a vector by a ring polynomial given as exps -> coeff."""
    r = {}
    p = F.p
    for e, c in poly.items():
        for m, v in vec.items():
            mm = (m[0],) + tuple(x + y for x, y in zip(e, m[1:]))
            s = r.get(mm, 0) + c * v
            if p:
                s %= p
            if s:
                r[mm] = s
            else:
                r.pop(mm, None)
    return r


def vec_lincomb(coeffs, vecs, F):
    """sum_i coeffs[i] * vecs[i] with polynomial coefficients (exps -> c)."""
    r = {}
    for c, v in zip(coeffs, vecs):
        if c and v:
            r = vec_add(r, vec_mul_poly(c, v, F), F)
    return r


def poly_to_vec(poly, pos=0):
    return {(pos,) + e: c for e, c in poly.items()}


def vec_component(vec, pos):
    return {m[1:]: c for m, c in vec.items() if m[0] == pos}


def vec_from_components(comps, offset=0):
    """Column given as a list of polys (exps -> c) to a vector."""
    r = {}
    for i, p in enumerate(comps):
        for e, c in p.items():
            r[(i + offset,) + e] = c
    return r


def vec_to_components(vec, n, nvars):
    comps = [dict() for _ in range(n)]
    for m, c in vec.items():
        comps[m[0]][m[1:]] = c
    return comps


def vec_shift_pos(vec, offset):
    return {(m[0] + offset,) + m[1:]: c for m, c in vec.items()}


def vec_restrict(vec, lo, hi, offset=0):
    """Terms with lo <= pos < hi, positions moved down by ``offset``."""
    return {(m[0] - offset,) + m[1:]: c for m, c in vec.items() if lo <= m[0] < hi}


def poly_mul(a, b, F):
    r = {}
    p = F.p
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            s = r.get(e, 0) + c1 * c2
            if p:
                s %= p
            if s:
                r[e] = s
            else:
                r.pop(e, None)
    return r


def poly_add(a, b, F, sign=1):
    r = dict(a)
    p = F.p
    for e, c in b.items():
        s = r.get(e, 0) + (c if sign == 1 else -c)
        if p:
            s %= p
        if s:
            r[e] = s
        else:
            r.pop(e, None)
    return r


# ---------------------------------------------------------------- rings and polys


class PolyRing:
    """Polynomial ring k[v1..vn] with positive integer weights."""

    def __init__(self, names, weights=None, field=QQ):
        names = tuple(names)
        for n in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", n):
                raise ValueError(f"bad variable name {n!r}")
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.names = names
        self.nvars = len(names)
        self.weights = tuple(weights) if weights is not None else (1,) * self.nvars
        if len(self.weights) != self.nvars:
            raise ValueError("one weight per variable required")
        self.field = field
        self.order = TermOrder(self.weights)
        self.zero_exp = (0,) * self.nvars

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.names == other.names
            and self.weights == other.weights
            and self.field == other.field
        )

    def __hash__(self):
        return hash((self.names, self.weights, self.field))

    def __repr__(self):
        return f"PolyRing({','.join(self.names)}; weights={self.weights}; {self.field!r})"

    def __call__(self, v):
        if isinstance(v, Poly):
            if v.ring != self:
                raise FieldMismatch("polynomial from a different ring")
            return v
        if isinstance(v, str):
            return self.parse(v)
        if isinstance(v, dict):
            return Poly(self, v)
        c = self.field(v)
        return Poly(self, {self.zero_exp: c} if c else {})

    def gen(self, i):
        if isinstance(i, str):
            i = self.names.index(i)
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): self.field.one})

    def gens(self):
        return [self.gen(i) for i in range(self.nvars)]

    def parse(self, text):
        return _Parser(self, text).parse()

    def mkey(self, exps):
        return self.order.key((0,) + tuple(exps))

    def format_terms(self, terms):
        if not terms:
            return "0"
        order = sorted(terms, key=self.mkey, reverse=True)
        out = []
        for e in order:
            c = terms[e]
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(self.names, e) if k
            )
            neg = False
            if self.field.p:
                cs = str(c)
            else:
                neg = c < 0
                cs = str(abs(c))
            if mono:
                body = mono if cs == "1" else f"{cs}*{mono}"
            else:
                body = cs
            if not out:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)


@total_ordering
class Poly:
    """Immutable polynomial in a :class:`PolyRing`."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring, terms):
        F = ring.field
        clean = {}
        for e, c in terms.items():
            e = tuple(e)
            if len(e) != ring.nvars:
                raise ValueError("exponent length mismatch")
            if any(x < 0 for x in e):
                raise ValueError("negative exponent")
            if any(x >= EXP_LIMIT for x in e):
                raise ExponentOverflow("exponent exceeds 32-bit bound")
            c = F(c)
            if c:
                clean[e] = c
        self.ring = ring
        self.terms = clean
        self._hash = None

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise FieldMismatch("operands live in different rings")
            return other
        return self.ring(other)

    def __add__(self, other):
        o = self._coerce(other)
        return Poly(self.ring, poly_add(self.terms, o.terms, self.ring.field))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Poly(self.ring, poly_add(self.terms, o.terms, self.ring.field, -1))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        F = self.ring.field
        return Poly(self.ring, {e: F.norm(-c) for e, c in self.terms.items()})

    def __mul__(self, other):
        o = self._coerce(other)
        return Poly(self.ring, poly_mul(self.terms, o.terms, self.ring.field))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        r = self.ring(1)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        try:
            return self.terms == self.ring(other).terms
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other):
        return self._sort_key() < other._sort_key()

    def _sort_key(self):
        return sorted((self.ring.mkey(e) for e in self.terms), reverse=True)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_coeff(self):
        return self.terms.get(self.ring.zero_exp, self.ring.field.zero)

    def lead_exp(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms, key=self.ring.mkey)

    def term_list(self):
        return [(e, self.terms[e]) for e in sorted(self.terms, key=self.ring.mkey, reverse=True)]

    def subs_univariate(self, images):
        """Substitute v_i -> t^images[i]; returns {t-exponent: coeff}."""
        F = self.ring.field
        r = {}
        for e, c in self.terms.items():
            d = sum(a * b for a, b in zip(images, e))
            r[d] = F.norm(r.get(d, 0) + c)
            if not r[d]:
                del r[d]
        return r

    def __str__(self):
        return self.ring.format_terms(self.terms)

    def __repr__(self):
        return f"Poly({self})"


def weighted_degree(f, weights=None):
    """Common weighted degree of all terms, or ``"inhomogeneous"``."""
    if isinstance(f, Poly):
        w = weights if weights is not None else f.ring.weights
        terms = f.terms
    else:
        w, terms = weights, f
    if isinstance(w, TermOrder):
        w = w.weights
    if not terms:
        raise ValueError("weighted degree of the zero polynomial")
    degs = {sum(a * b for a, b in zip(w, e)) for e in terms}
    if len(degs) > 1:
        return "inhomogeneous"
    return degs.pop()


def is_homogeneous(f, weights=None):
    return not f or weighted_degree(f, weights) != "inhomogeneous"


# ---------------------------------------------------------------- parser

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*^/()]))")


class _Parser:
    def __init__(self, ring, text):
        self.ring = ring
        self.text = text
        self.toks = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                raise PolySyntaxError(f"unexpected character {text[pos]!r}", pos)
            start = m.start(m.lastindex)
            if m.group(1):
                self.toks.append(("num", int(m.group(1)), start))
            elif m.group(2):
                self.toks.append(("var", m.group(2), start))
            else:
                op = m.group(3)
                self.toks.append(("op", "^" if op == "**" else op, start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("end", None, len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse(self):
        if not self.toks:
            raise PolySyntaxError("empty expression", 0)
        r = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise PolySyntaxError(f"unexpected token {t[1]!r}", t[2])
        return r

    def expr(self):
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            r = self.term()
            if t[1] == "-":
                r = -r
        else:
            r = self.term()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term()
                r = r + rhs if t[1] == "+" else r - rhs
            else:
                return r

    def term(self):
        r = self.factor()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] == "*":
                self.take()
                r = r * self.factor()
            elif t[0] == "op" and t[1] == "/":
                self.take()
                d = self.factor()
                if not d.is_constant() or d.is_zero():
                    raise PolySyntaxError("division only by nonzero constants", t[2])
                r = r * self.ring(self.ring.field.inv(d.constant_coeff()))
            else:
                return r

    def factor(self):
        b = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            e = self.take()
            if e[0] != "num":
                raise PolySyntaxError("exponent must be a non-negative integer", e[2])
            return b ** e[1]
        return b

    def atom(self):
        t = self.take()
        if t[0] == "num":
            return self.ring(t[1])
        if t[0] == "var":
            if t[1] not in self.ring.names:
                raise UnknownVariable(t[1], t[2])
            return self.ring.gen(t[1])
        if t[0] == "op" and t[1] == "(":
            r = self.expr()
            c = self.take()
            if c[0] != "op" or c[1] != ")":
                raise PolySyntaxError("expected ')'", c[2])
            return r
        if t[0] == "op" and t[1] == "-":
            return -self.factor()
        if t[0] == "end":
            raise PolySyntaxError("unexpected end of input", t[2])
        raise PolySyntaxError(f"unexpected token {t[1]!r}", t[2])


def parse_poly(text, ring):
    """Parse ``text`` in ``ring``; ``ring`` may also be a list of variable names."""
    if not isinstance(ring, PolyRing):
        ring = PolyRing(ring)
    return ring.parse(text)
