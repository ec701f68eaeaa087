"""Buchberger's algorithm for submodules of free k[x, y]-modules.

Module elements are sparse dictionaries ``{(position, monomial): coeff}``.
The order is term-over-position with degree-lex on monomials, so leading
terms first compare total degree, then the monomial lexicographically, then
prefer the earlier position.

Syzygies are produced by Schreyer's construction: every S-pair of the
Groebner basis reduces to zero, and the recorded quotients give generators
of the syzygy module of the basis, which are pulled back to the original
generators through the tracked cofactor matrix.
"""

from dataclasses import dataclass, field

from .errors import CompositionNonzero, DegreeBoundExceeded, InvalidExpr
from .polynomials import Poly

DEFAULT_DEGREE_CAP = 24


def _key(term):
    pos, mono = term
    return (sum(mono), mono, -pos)


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


class Vec:
    """Element of k[x, y]^n."""

    __slots__ = ("field", "n", "terms")

    def __init__(self, fld, n, terms=None):
        self.field = fld
        self.n = n
        self.terms = {}
        if terms:
            for k, c in terms.items():
                c = fld.norm(c)
                if c != 0:
                    self.terms[k] = c

    @classmethod
    def from_polys(cls, fld, polys):
        terms = {}
        for pos, p in enumerate(polys):
            for m, c in p.terms.items():
                terms[(pos, m)] = c
        return cls(fld, len(polys), terms)

    @classmethod
    def unit(cls, fld, n, i, nvars=2):
        return cls(fld, n, {(i, (0,) * nvars): fld.coerce(1)})

    def to_polys(self, nvars=2):
        out = [dict() for _ in range(self.n)]
        for (pos, m), c in self.terms.items():
            out[pos][m] = c
        return [Poly(self.field, nvars, t) for t in out]

    def is_zero(self):
        return not self.terms

    def lead(self):
        k = max(self.terms, key=_key)
        return k[0], k[1], self.terms[k]

    def degree(self):
        return max((sum(m) for _, m in self.terms), default=-1)

    def add_scaled(self, other, coeff, mono):
        """self + coeff * mono * other."""
        t = dict(self.terms)
        for (pos, m), c in other.terms.items():
            k = (pos, tuple(a + b for a, b in zip(m, mono)))
            t[k] = t.get(k, 0) + coeff * c
        return Vec(self.field, self.n, t)

    def __add__(self, other):
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return Vec(self.field, self.n, t)

    def __neg__(self):
        return Vec(self.field, self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale_poly(self, p):
        out = Vec(self.field, self.n)
        for m, c in p.terms.items():
            out = out.add_scaled(self, c, m)
        return out

    def __eq__(self, other):
        return isinstance(other, Vec) and self.terms == other.terms and self.n == other.n

    def __repr__(self):
        return "Vec(" + ", ".join(str(p) for p in self.to_polys()) + ")"


def _zero_mono(nvars=2):
    return (0,) * nvars


def reduce(f, G, track=False):
    """Divide ``f`` by the list ``G``; return (quotients, remainder).

    Quotients are polynomials, one per element of G (only when ``track``).
    """
    fld = f.field
    quot = [dict() for _ in G] if track else None
    leads = [g.lead() for g in G]
    p = f
    rem = {}
    while p.terms:
        pos, m, c = p.lead()
        for k, (gp, gm, gc) in enumerate(leads):
            if gp == pos and _divides(gm, m):
                t = _sub(m, gm)
                coeff = fld.norm(c * fld.inv(gc))
                p = p.add_scaled(G[k], -coeff, t)
                if track:
                    quot[k][t] = quot[k].get(t, 0) + coeff
                break
        else:
            rem[(pos, m)] = c
            p = Vec(fld, p.n, {k: v for k, v in p.terms.items() if k != (pos, m)})
    remainder = Vec(fld, f.n, rem)
    if track:
        return [Poly(fld, 2, q) for q in quot], remainder
    return None, remainder


def s_vector(f, g):
    """S-vector of two elements with the same leading position (else None)."""
    fp, fm, fc = f.lead()
    gp, gm, gc = g.lead()
    if fp != gp:
        return None, None, None
    L = _lcm(fm, gm)
    fld = f.field
    a_mono, b_mono = _sub(L, fm), _sub(L, gm)
    a_coef, b_coef = fld.inv(fc), fld.inv(gc)
    s = Vec(fld, f.n).add_scaled(f, a_coef, a_mono).add_scaled(g, -b_coef, b_mono)
    return s, (a_coef, a_mono), (b_coef, b_mono)


@dataclass
class GroebnerBasis:
    basis: list
    cofactors: list  # cofactors[i] is a Vec in k[x,y]^s with basis[i] = sum cofactor_j * gens[j]
    gens: list
    degree_cap: int = DEFAULT_DEGREE_CAP

    def reduce(self, f):
        return reduce(f, self.basis)[1]

    def contains(self, f):
        return reduce(f, self.basis)[1].is_zero()

    def leading_terms(self):
        return [g.lead()[:2] for g in self.basis]


def groebner_basis(gens, degree_cap=DEFAULT_DEGREE_CAP):
    """Buchberger's algorithm with cofactor tracking."""
    gens = [g for g in gens]
    if not gens:
        return GroebnerBasis([], [], [], degree_cap)
    fld, s = gens[0].field, len(gens)
    G, reps = [], []
    for i, g in enumerate(gens):
        if g.is_zero():
            continue
        if g.degree() > degree_cap:
            raise DegreeBoundExceeded(f"generator degree {g.degree()} exceeds cap {degree_cap}")
        G.append(g)
        reps.append(Vec.unit(fld, s, i))
    pairs = [(i, j) for j in range(len(G)) for i in range(j)]
    while pairs:
        i, j = pairs.pop(0)
        sv, a, b = s_vector(G[i], G[j])
        if sv is None:
            continue
        (ac, am), (bc, bm) = a, b
        q, r = reduce(sv, G, track=True)
        if r.is_zero():
            continue
        if r.degree() > degree_cap:
            raise DegreeBoundExceeded(f"basis element of degree {r.degree()} exceeds cap {degree_cap}")
        rep = Vec(fld, s).add_scaled(reps[i], ac, am).add_scaled(reps[j], -bc, bm)
        for k, qk in enumerate(q):
            if not qk.is_zero():
                rep = rep - reps[k].scale_poly(qk)
        G.append(r)
        reps.append(rep)
        pairs.extend((k, len(G) - 1) for k in range(len(G) - 1))
    return GroebnerBasis(G, reps, gens, degree_cap)


def s_pairs_reduce_to_zero(gb):
    """Buchberger's criterion, checked directly."""
    for j in range(len(gb.basis)):
        for i in range(j):
            sv, _, _ = s_vector(gb.basis[i], gb.basis[j])
            if sv is not None and not reduce(sv, gb.basis)[1].is_zero():
                return False
    return True


def syzygies(gens, degree_cap=DEFAULT_DEGREE_CAP):
    """Generators of {c in k[x,y]^s : sum c_j gens_j = 0} via Schreyer."""
    if not gens:
        return []
    fld, s = gens[0].field, len(gens)
    gb = groebner_basis(gens, degree_cap)
    G, A = gb.basis, gb.cofactors
    out = []
    # syzygies of the basis, pulled back through the cofactors
    for j in range(len(G)):
        for i in range(j):
            sv, a, b = s_vector(G[i], G[j])
            if sv is None:
                continue
            (ac, am), (bc, bm) = a, b
            q, r = reduce(sv, G, track=True)
            assert r.is_zero()
            syz = Vec(fld, s).add_scaled(A[i], ac, am).add_scaled(A[j], -bc, bm)
            for k, qk in enumerate(q):
                if not qk.is_zero():
                    syz = syz - A[k].scale_poly(qk)
            if not syz.is_zero():
                out.append(syz)
    # each original generator rewritten through the basis
    for j, f in enumerate(gens):
        if f.is_zero():
            out.append(Vec.unit(fld, s, j))
            continue
        q, r = reduce(f, G, track=True)
        assert r.is_zero()
        v = Vec.unit(fld, s, j)
        for k, qk in enumerate(q):
            if not qk.is_zero():
                v = v - A[k].scale_poly(qk)
        if not v.is_zero():
            out.append(v)
    return _dedupe(out)


def _dedupe(vecs):
    seen, out = set(), []
    for v in vecs:
        key = frozenset(v.terms.items())
        if key not in seen:
            seen.add(key)
            out.append(v)
    return out


# --- matrices over k[x, y] ---------------------------------------------------

def columns_as_vecs(M):
    fld = M.core.field
    return [Vec.from_polys(fld, [M[i, j] for i in range(M.rows)]) for j in range(M.cols)]


def _apply(M, v):
    """Matrix (rows x s) applied to a Vec in k[x,y]^s."""
    polys = v.to_polys()
    out = []
    for i in range(M.rows):
        acc = Poly(M.core.field, 2)
        for j, p in enumerate(polys):
            if not p.is_zero():
                acc = acc + M[i, j] * p
        out.append(acc)
    return Vec.from_polys(M.core.field, out)


def standard_monomial_counts(gb, n, max_degree):
    """Cumulative counts of standard (position, monomial) pairs of k[x,y]^n / span."""
    leads = gb.leading_terms()
    counts, total = [], 0
    for d in range(max_degree + 1):
        for pos in range(n):
            for a in range(d + 1):
                m = (a, d - a)
                if not any(lp == pos and _divides(lm, m) for lp, lm in leads):
                    total += 1
        counts.append(total)
    return counts


@dataclass
class GroebnerHomology:
    """Zero flag and Hilbert fingerprint of ker(d_out)/im(d_in) over k[x, y]."""

    is_zero: bool
    hilbert: list = field(default_factory=list)
    kernel_generators: list = field(default_factory=list)
    image_basis: object = None
    n: int = 0

    def to_json(self):
        return {"zero": self.is_zero, "hilbert": [int(h) for h in self.hilbert]}


def groebner_homology(d_in, d_out, degree_cap=DEFAULT_DEGREE_CAP, hilbert_degree=6):
    """Homology of ``R^a -d_in-> R^n -d_out-> R^b`` for R = k[x, y]."""
    if d_in.rows != d_out.cols:
        raise InvalidExpr("d_in and d_out are not composable")
    if d_in.cols and d_out.rows and not (d_out @ d_in).is_zero():
        raise CompositionNonzero("d_out @ d_in is not zero")
    n = d_in.rows
    fld = d_in.core.field
    if n == 0:
        return GroebnerHomology(True, [0] * (hilbert_degree + 1), [], None, 0)
    if d_out.rows == 0 or d_out.is_zero():
        ker = [Vec.unit(fld, n, i) for i in range(n)]
    else:
        ker = syzygies(columns_as_vecs(d_out), degree_cap)
    im_gb = groebner_basis([v for v in columns_as_vecs(d_in) if not v.is_zero()], degree_cap)
    zero = all(im_gb.contains(k) for k in ker)
    ker_gb = groebner_basis(ker, degree_cap) if ker else GroebnerBasis([], [], [])
    sm_im = standard_monomial_counts(im_gb, n, hilbert_degree)
    sm_ker = standard_monomial_counts(ker_gb, n, hilbert_degree)
    cumulative = [a - b for a, b in zip(sm_im, sm_ker)]
    graded = [cumulative[0]] + [cumulative[i] - cumulative[i - 1]
                                for i in range(1, len(cumulative))]
    return GroebnerHomology(zero, graded, ker, im_gb, n)


def colon_generators(im_gens, g, degree_cap=DEFAULT_DEGREE_CAP):
    """Generators of the ideal (span(im_gens) : g)."""
    syz = syzygies([g] + list(im_gens), degree_cap)
    return [v.to_polys()[0] for v in syz if not v.to_polys()[0].is_zero()]


def locally_zero(hom, prime, degree_cap=DEFAULT_DEGREE_CAP):
    """Whether the homology module vanishes after localizing at ``prime``.

    ``prime`` must offer ``contains(poly)``.  A finitely generated module H
    has H_P = 0 iff each generator is killed by some element outside P.
    """
    if hom.is_zero:
        return True
    im_gens = hom.image_basis.basis if hom.image_basis is not None else []
    for g in hom.kernel_generators:
        if hom.image_basis is not None and hom.image_basis.contains(g):
            continue
        colon = colon_generators(im_gens, g, degree_cap)
        if not any(not prime.contains(c) for c in colon):
            return False
    return True


def ideal_basis(polys, degree_cap=DEFAULT_DEGREE_CAP):
    vecs = [Vec.from_polys(p.field, [p]) for p in polys if not p.is_zero()]
    return groebner_basis(vecs, degree_cap)


def ideal_contains(gb, p):
    if not gb.basis:
        return p.is_zero()
    return gb.contains(Vec.from_polys(p.field, [p]))
