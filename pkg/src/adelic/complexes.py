"""Bounded chain complexes of finite free modules over a computational core.

Grading is homological: ``d[n]`` maps degree n to degree n - 1.  A complex
may carry a :class:`~adelic.ring_core.RingExpr` naming the ring it really
lives over (for example a completion); the core is where arithmetic happens.
"""

from dataclasses import dataclass

from .errors import CarrierMismatch, CompositionNonzero, InvalidExpr, NotRepresentable
from .groebner import DEFAULT_DEGREE_CAP, groebner_homology, locally_zero
from .linalg import ExactMatrix, block_matrix, homology_invariants, subquotient_invariants
from .rings import BivariateCore, coerce_between


@dataclass
class Homology:
    """One homology module, with a zero verdict valid over the core."""

    degree: int
    zero: bool
    raw: object
    certified: bool = True

    def to_json(self):
        out = {"degree": self.degree, "zero": self.zero}
        if hasattr(self.raw, "free_rank"):
            out.update(self.raw.to_json())
        elif self.raw is not None:
            out["hilbert"] = self.raw.to_json()["hilbert"]
        if not self.certified:
            out["certified"] = False
        return out

    def __str__(self):
        return "0" if self.zero else str(self.raw)


class Complex:
    """A bounded complex ``... -> C_n -d_n-> C_{n-1} -> ...`` of free modules."""

    def __init__(self, core, ranks, diffs=None, carrier=None, name=""):
        self.core = core
        self.ranks = {int(n): int(r) for n, r in ranks.items() if r}
        self.diffs = {}
        for n, d in (diffs or {}).items():
            n = int(n)
            if d.rows != self.rank(n - 1) or d.cols != self.rank(n):
                raise InvalidExpr(f"d_{n} has shape {d.rows}x{d.cols}, expected "
                                  f"{self.rank(n - 1)}x{self.rank(n)}")
            if d.rows and d.cols and not d.is_zero():
                self.diffs[n] = d
        self.carrier = carrier
        self.name = name

    # shape
    def rank(self, n):
        return self.ranks.get(n, 0)

    @property
    def degrees(self):
        if not self.ranks:
            return range(0)
        return range(min(self.ranks), max(self.ranks) + 1)

    def d(self, n):
        if n in self.diffs:
            return self.diffs[n]
        return ExactMatrix.zeros(self.core, self.rank(n - 1), self.rank(n))

    def is_zero_complex(self):
        return not self.ranks

    def check(self):
        for n in self.degrees:
            a, b = self.d(n), self.d(n + 1)
            if a.rows and b.cols and a.cols and not (a @ b).is_zero():
                raise CompositionNonzero(f"d_{n} d_{n + 1} is not zero")
        return True

    # homology
    def homology(self, n, degree_cap=DEFAULT_DEGREE_CAP):
        d_in, d_out = self.d(n + 1), self.d(n)
        if isinstance(self.core, BivariateCore):
            if self.rank(n) == 0:
                return Homology(n, True, None)
            hom = groebner_homology(d_in, d_out, degree_cap)
            zero = hom.is_zero
            if not zero and self.core.local_at is not None:
                zero = locally_zero(hom, self.core.local_at, degree_cap)
            return Homology(n, zero, hom)
        inv = homology_invariants(d_in, d_out)
        return Homology(n, inv.is_zero(), inv)

    def homology_all(self, degree_cap=DEFAULT_DEGREE_CAP):
        return [self.homology(n, degree_cap) for n in self.degrees]

    def is_acyclic(self, degree_cap=DEFAULT_DEGREE_CAP):
        return all(h.zero for h in self.homology_all(degree_cap))

    # constructions
    def shift(self, k):
        """(C[k])_n = C_{n-k}, with differential multiplied by (-1)^k."""
        sign = -1 if k % 2 else 1
        return Complex(self.core, {n + k: r for n, r in self.ranks.items()},
                       {n + k: d.scale(self.core.coerce(sign)) for n, d in self.diffs.items()},
                       self.carrier, self.name)

    def direct_sum(self, other):
        _same_core(self, other)
        degs = set(self.ranks) | set(other.ranks)
        ranks = {n: self.rank(n) + other.rank(n) for n in degs}
        diffs = {}
        for n in degs | {n + 1 for n in degs}:
            diffs[n] = _blocks(self.core, [[self.d(n), None], [None, other.d(n)]],
                                    [self.rank(n - 1), other.rank(n - 1)],
                                    [self.rank(n), other.rank(n)])
        return Complex(self.core, ranks, diffs, self.carrier)

    def tensor(self, other):
        """Tensor product over the core with the Koszul sign rule."""
        _same_core(self, other)
        core = self.core
        index, ranks = {}, {}
        for p in self.ranks:
            for q in other.ranks:
                n = p + q
                index[(p, q)] = ranks.get(n, 0)
                ranks[n] = ranks.get(n, 0) + self.rank(p) * other.rank(q)
        diffs = {}
        for n in ranks:
            M = [[core.zero] * ranks[n] for _ in range(ranks.get(n - 1, 0))]
            for (p, q), off in index.items():
                if p + q != n:
                    continue
                a, b = self.rank(p), other.rank(q)
                if (p - 1, q) in index:
                    d = self.d(p)
                    o2 = index[(p - 1, q)]
                    for i in range(a):
                        for j in range(b):
                            for i2 in range(self.rank(p - 1)):
                                c = d[i2, i]
                                if not core.is_zero(c):
                                    M[o2 + i2 * b + j][off + i * b + j] += c
                if (p, q - 1) in index:
                    d = other.d(q)
                    o2 = index[(p, q - 1)]
                    b2 = other.rank(q - 1)
                    sign = -1 if p % 2 else 1
                    for i in range(a):
                        for j in range(b):
                            for j2 in range(b2):
                                c = d[j2, j]
                                if not core.is_zero(c):
                                    M[o2 + i * b2 + j2][off + i * b + j] += sign * c
            diffs[n] = ExactMatrix(core, ranks.get(n - 1, 0), ranks[n], M)
        return Complex(core, ranks, diffs, self.carrier)

    def base_change(self, core, carrier=None):
        """Extend scalars along the canonical map from self.core to ``core``."""
        src = self.core
        fn = lambda a: coerce_between(a, src, core)
        return Complex(core, self.ranks,
                       {n: d.map_entries(fn, core) for n, d in self.diffs.items()},
                       carrier if carrier is not None else self.carrier, self.name)

    def identity(self):
        return ComplexMap(self, self, {n: ExactMatrix.identity(self.core, r)
                                       for n, r in self.ranks.items()})

    def to_json(self):
        return {"core": repr(self.core),
                "carrier": self.carrier.key if self.carrier is not None else None,
                "ranks": {str(n): r for n, r in sorted(self.ranks.items())},
                "differentials": {str(n): d.to_json() for n, d in sorted(self.diffs.items())}}

    def __repr__(self):
        parts = " ".join(f"{n}:{r}" for n, r in sorted(self.ranks.items()))
        return f"Complex({self.core!r}; {parts})"


def _blocks(core, grid, row_sizes, col_sizes):
    blocks = {(i, j): b for i, row in enumerate(grid) for j, b in enumerate(row) if b is not None}
    return block_matrix(core, blocks, row_sizes, col_sizes)


def _same_core(a, b):
    if a.core != b.core:
        raise CarrierMismatch(f"complexes over {a.core!r} and {b.core!r}")


def zero_complex(core, carrier=None):
    return Complex(core, {}, {}, carrier)


def free_module(core, rank=1, degree=0, carrier=None):
    return Complex(core, {degree: rank}, {}, carrier)


def from_presentation(core, relations, n_gens=None, carrier=None):
    """coker(relations) as a complex with generators in degree 0."""
    if isinstance(relations, ExactMatrix):
        P = relations
    else:
        rows = [list(r) for r in relations]
        P = ExactMatrix.from_rows(core, rows) if rows else ExactMatrix.zeros(core, n_gens or 0, 0)
    n = P.rows if n_gens is None else n_gens
    return Complex(core, {0: n, 1: P.cols}, {1: P}, carrier)


def koszul_complex(core, gens, carrier=None):
    """Koszul complex on ``gens``: degree k is spanned by k-subsets."""
    from itertools import combinations
    gens = [core.coerce(g) for g in gens]
    r = len(gens)
    subsets = {k: list(combinations(range(r), k)) for k in range(r + 1)}
    pos = {k: {s: i for i, s in enumerate(subsets[k])} for k in subsets}
    diffs = {}
    for k in range(1, r + 1):
        M = [[core.zero] * len(subsets[k]) for _ in subsets[k - 1]]
        for j, s in enumerate(subsets[k]):
            for t, i in enumerate(s):
                face = s[:t] + s[t + 1:]
                sign = -1 if t % 2 else 1
                M[pos[k - 1][face]][j] = M[pos[k - 1][face]][j] + sign * gens[i]
        diffs[k] = ExactMatrix(core, len(subsets[k - 1]), len(subsets[k]), M)
    return Complex(core, {k: len(subsets[k]) for k in subsets}, diffs, carrier,
                   name="K(" + ", ".join(core.fmt(g) for g in gens) + ")")


class ComplexMap:
    """A chain map given by one matrix per degree (target rows, source columns)."""

    def __init__(self, src, tgt, comps=None):
        _same_core(src, tgt)
        self.src, self.tgt = src, tgt
        self.core = src.core
        self.comps = {}
        for n, f in (comps or {}).items():
            n = int(n)
            if f.rows != tgt.rank(n) or f.cols != src.rank(n):
                raise InvalidExpr(f"component {n} has the wrong shape")
            if f.rows and f.cols:
                self.comps[n] = f

    def at(self, n):
        if n in self.comps:
            return self.comps[n]
        return ExactMatrix.zeros(self.core, self.tgt.rank(n), self.src.rank(n))

    def degrees(self):
        return sorted(set(self.src.ranks) | set(self.tgt.ranks))

    def check(self):
        for n in self.degrees():
            lhs = self.tgt.d(n) @ self.at(n)
            rhs = self.at(n - 1) @ self.src.d(n)
            if not (lhs - rhs).is_zero():
                raise CompositionNonzero(f"not a chain map in degree {n}")
        return True

    def compose(self, other):
        """self after other."""
        comps = {n: self.at(n) @ other.at(n) for n in other.degrees()}
        return ComplexMap(other.src, self.tgt, comps)

    def scale(self, c):
        return ComplexMap(self.src, self.tgt,
                          {n: f.scale(self.core.coerce(c)) for n, f in self.comps.items()})

    def __add__(self, other):
        return ComplexMap(self.src, self.tgt,
                          {n: self.at(n) + other.at(n) for n in self.degrees()})

    def is_zero(self):
        return all(f.is_zero() for f in self.comps.values())

    def cone(self):
        """Cone_n = tgt_n + src_{n-1}, d = [[d_t, f], [0, -d_s]]."""
        s, t, core = self.src, self.tgt, self.core
        degs = set(t.ranks) | {n + 1 for n in s.ranks}
        ranks = {n: t.rank(n) + s.rank(n - 1) for n in degs}
        diffs = {}
        for n in degs:
            diffs[n] = _blocks(
                core, [[t.d(n), self.at(n - 1)], [None, s.d(n - 1).scale(core.coerce(-1))]],
                [t.rank(n - 1), s.rank(n - 2)], [t.rank(n), s.rank(n - 1)])
        return Complex(core, ranks, diffs, t.carrier)

    def fibre(self):
        """Fib = Cone[-1], so that Fib -> src -> tgt is a fibre sequence."""
        return self.cone().shift(-1)

    def is_quasi_isomorphism(self, degree_cap=DEFAULT_DEGREE_CAP):
        return self.cone().is_acyclic(degree_cap)

    def base_change(self, core):
        src = self.core
        fn = lambda a: coerce_between(a, src, core)
        return ComplexMap(self.src.base_change(core), self.tgt.base_change(core),
                          {n: f.map_entries(fn, core) for n, f in self.comps.items()})

    def to_json(self):
        return {str(n): f.to_json() for n, f in sorted(self.comps.items())}


def block_offset(C, D, p, q):
    """Offset of the C_p (x) D_q block inside (C (x) D)_{p+q}."""
    off = 0
    n = p + q
    for p2 in C.ranks:
        for q2 in D.ranks:
            if p2 + q2 != n:
                continue
            if (p2, q2) == (p, q):
                return off
            off += C.rank(p2) * D.rank(q2)
    raise KeyError((p, q))


def tensor_identity(K, f, src=None, tgt=None):
    """id_K (x) f for a degree-zero chain map f (no Koszul sign arises)."""
    src = src or K.tensor(f.src)
    tgt = tgt or K.tensor(f.tgt)
    core = f.core
    comps = {}
    for n in src.ranks:
        if not tgt.rank(n):
            continue
        rows = [[core.zero] * src.rank(n) for _ in range(tgt.rank(n))]
        for p in K.ranks:
            q = n - p
            if not f.src.rank(q) or not f.tgt.rank(q):
                continue
            F = f.at(q)
            os_, ot = block_offset(K, f.src, p, q), block_offset(K, f.tgt, p, q)
            for i in range(K.rank(p)):
                for r in range(F.rows):
                    for c in range(F.cols):
                        x = F[r, c]
                        if not core.is_zero(x):
                            rows[ot + i * F.rows + r][os_ + i * F.cols + c] += x
        comps[n] = ExactMatrix(core, tgt.rank(n), src.rank(n), rows)
    return ComplexMap(src, tgt, comps)


def hom_complex(C, D):
    """Internal Hom: degree n is the product of Hom(C_p, D_{p+n}).

    The differential is ``d(f) = d_D f - (-1)^n f d_C``.  Basis vectors are
    matrix units ordered by p, then row, then column.
    """
    _same_core(C, D)
    core = C.core
    index, ranks = {}, {}
    for p in C.ranks:
        for q in D.ranks:
            n = q - p
            index[(p, n)] = ranks.get(n, 0)
            ranks[n] = ranks.get(n, 0) + D.rank(q) * C.rank(p)
    diffs = {}
    for n in ranks:
        M = [[core.zero] * ranks[n] for _ in range(ranks.get(n - 1, 0))]
        sign = -1 if n % 2 else 1
        for (p, m), off in index.items():
            if m != n:
                continue
            a, b = D.rank(p + n), C.rank(p)
            dD = D.d(p + n)
            if (p, n - 1) in index:
                o2 = index[(p, n - 1)]
                for i in range(a):
                    for j in range(b):
                        for i2 in range(D.rank(p + n - 1)):
                            c = dD[i2, i]
                            if not core.is_zero(c):
                                M[o2 + i2 * b + j][off + i * b + j] += c
            if (p + 1, n - 1) in index:
                dC = C.d(p + 1)
                o2 = index[(p + 1, n - 1)]
                b2 = C.rank(p + 1)
                for i in range(a):
                    for j in range(b):
                        for j2 in range(b2):
                            c = dC[j, j2]
                            if not core.is_zero(c):
                                M[o2 + i * b2 + j2][off + i * b + j] -= sign * c
        diffs[n] = ExactMatrix(core, ranks.get(n - 1, 0), ranks[n], M)
    return Complex(core, ranks, diffs, C.carrier)


def face_sign(S, i):
    """Sign of the face adding i to S: (-1)^#{s in S : s < i}."""
    return -1 if sum(1 for s in S if s < i) % 2 else 1


def total_complex(vertices, faces, check=True):
    """Total complex of a (punctured or augmented) cube of complexes.

    ``vertices`` maps frozensets S to complexes over one core, ``faces`` maps
    (S, i) to a chain map X(S) -> X(S + {i}).  Degree n collects X(S)_{n+|S|},
    so an augmented cube is acyclic iff X(empty) is the homotopy limit of the
    rest.  For a purely punctured cube, shift by one to get the holim.
    """
    keys = sorted(vertices, key=lambda S: (len(S), sorted(S)))
    cores = {vertices[S].core for S in keys}
    if len(cores) > 1:
        raise CarrierMismatch(f"vertices over different cores: {sorted(map(repr, cores))}")
    if not keys:
        raise InvalidExpr("empty diagram")
    core = vertices[keys[0]].core
    if check:
        _check_commuting(vertices, faces)
    ranks, offs = {}, {}
    for S in keys:
        X = vertices[S]
        for m, r in X.ranks.items():
            n = m - len(S)
            offs[(S, n)] = ranks.get(n, 0)
            ranks[n] = ranks.get(n, 0) + r
    diffs = {}
    for n in ranks:
        M = [[core.zero] * ranks[n] for _ in range(ranks.get(n - 1, 0))]
        for S in keys:
            if (S, n) not in offs:
                continue
            X, off, m = vertices[S], offs[(S, n)], n + len(S)
            eps = -1 if len(S) % 2 else 1
            if (S, n - 1) in offs:
                d, o2 = X.d(m), offs[(S, n - 1)]
                for a in range(d.rows):
                    for b in range(d.cols):
                        if not core.is_zero(d[a, b]):
                            M[o2 + a][off + b] += eps * d[a, b]
            for (S0, i), f in faces.items():
                if S0 != S:
                    continue
                T = S | {i}
                if (T, n - 1) not in offs:
                    continue
                F, o2, sg = f.at(m), offs[(T, n - 1)], face_sign(S, i)
                for a in range(F.rows):
                    for b in range(F.cols):
                        if not core.is_zero(F[a, b]):
                            M[o2 + a][off + b] += sg * F[a, b]
        diffs[n] = ExactMatrix(core, ranks.get(n - 1, 0), ranks[n], M)
    return Complex(core, ranks, diffs)


def _check_commuting(vertices, faces):
    from .errors import NonCommuting
    for (S, i), f in faces.items():
        for (S2, j), g in faces.items():
            if S2 != S or j <= i:
                continue
            a, b = faces.get((S | {i}, j)), faces.get((S | {j}, i))
            if a is None or b is None:
                continue
            for n in sorted(set(vertices[S].ranks)):
                lhs = a.at(n) @ f.at(n)
                rhs = b.at(n) @ g.at(n)
                if not (lhs - rhs).is_zero():
                    raise NonCommuting(f"face square at {sorted(S)} with {i}, {j} fails in degree {n}")


# --- inverse towers -------------------------------------------------------------

@dataclass
class InverseTower:
    """Stages C_0 <- C_1 <- ... with ``maps[k]: stages[k+1] -> stages[k]``."""

    stages: list
    maps: list
    label: str = ""

    def _cycles(self, k, n):
        from .linalg import kernel_basis
        st = self.stages[k]
        if st.rank(n) == 0:
            return ExactMatrix.zeros(st.core, 0, 0)
        d = st.d(n)
        return kernel_basis(d) if d.rows else ExactMatrix.identity(st.core, st.rank(n))

    def image_in_stage(self, k, j, n):
        """Generators of the image of Z_n(stage k+j) in stage k, and B_n(stage k)."""
        st = self.stages[k]
        comp = ExactMatrix.identity(st.core, st.rank(n))
        for i in range(k, k + j):
            comp = comp @ self.maps[i].at(n)
        Z = self._cycles(k + j, n)
        U = comp @ Z if Z.cols else ExactMatrix.zeros(st.core, st.rank(n), 0)
        return U, st.d(n + 1)

    def image_invariants(self, k, j, n):
        """Invariants of the image of H_n(stage k+j) in H_n(stage k)."""
        U, B = self.image_in_stage(k, j, n)
        if U.rows == 0:
            return subquotient_invariants(U, B)
        return subquotient_invariants(U.hstack(B), B)

    def quotient_invariants(self, k, j, n):
        """Invariants of H_n(stage k) modulo the image of stage k+j."""
        U, B = self.image_in_stage(k, j, n)
        Z = self._cycles(k, n)
        if Z.cols == 0 or U.rows == 0:
            return subquotient_invariants(ExactMatrix.zeros(self.stages[k].core, 0, 0),
                                          ExactMatrix.zeros(self.stages[k].core, 0, 0))
        return subquotient_invariants(Z, U.hstack(B))

    def mittag_leffler(self, n, window=4):
        """Images of later stages in each early stage stop shrinking within the window.

        Images form a descending chain of submodules of a finitely generated
        module; two of them are equal iff the quotients have equal invariants.
        """
        depth = len(self.stages)
        if depth < window + 2:
            raise NotRepresentable(f"tower of depth {depth} is too short for window {window}")
        for k in range(depth - window - 1):
            seq = [self.quotient_invariants(k, j, n).key()
                   for j in range(1, depth - k)][-window:]
            if len(seq) < window or len(set(seq)) != 1:
                return False
        return True

    def stabilized(self, fingerprint, window=4):
        """First index from which ``fingerprint(stage)`` is constant for ``window`` stages."""
        prints = [fingerprint(s) for s in self.stages]
        for start in range(len(prints) - window + 1):
            if len(set(map(repr, prints[start:start + window]))) == 1:
                return start, prints[start]
        raise NotRepresentable(f"{self.label or 'tower'} did not stabilize within "
                               f"{len(prints)} stages (window {window})")
