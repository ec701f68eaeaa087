"""The adelic cube and its Beilinson-Parshin variant.

An entry at the flag d_0 > ... > d_s is the iterated product

    prod_{dim p_0 = d_0} L_{p_0} prod_{p_1 below p_0} L_{p_1} ... L_{p_s} Lambda_{p_s} M

where "below" is the Balmer order (p_1 contains p_0 as an ideal).  Products
over infinitely many primes stay symbolic (:class:`FamilyProduct`).  A vertex
is a list of factors, each a carrier expression tensored with a module
complex over the base core, so that the verifier can rewrite carriers and
still multiply honest matrices.

Vertices are indexed by sets of dimensions; the empty set is the augmented
initial vertex carrying M itself.  Face maps add one dimension.  Structural
faces are the identity of M tensored with a canonical ring map (unit of a
localization, projection onto the factors below a prime, or the coefficient
map Lambda_q -> Lambda_p), recorded as a tag.
"""

from dataclasses import dataclass, field

from .complexes import Complex, ComplexMap, face_sign, tensor_identity, zero_complex
from .errors import CarrierMismatch, FamilyProductRemains, InvalidExpr, LawViolation
from .groebner import DEFAULT_DEGREE_CAP
from .linalg import ExactMatrix, invert
from .ring_core import (AlgPrime, Base, Complete, FamilyProduct, FiniteProduct, Localize,
                        PrimeFamily, Var, ZeroRing, core_of, factors_of, rewrite,
                        surviving_families)
from .spectrum import Flag

ADELIC = "Adelic"
BP = "BeilinsonParshin"
EXPLICIT = "Explicit"


def flag_of(S):
    return Flag(tuple(sorted(S, reverse=True)))


def vertex_key(S):
    return ">".join(map(str, sorted(S, reverse=True))) or "init"


def _vsort(S):
    return (len(S), tuple(-d for d in sorted(S, reverse=True)))


# --- spectrum levels ----------------------------------------------------------------

def primes_of_dim(ring, d):
    """Every prime of ``ring`` of dimension d, or None when there are infinitely many."""
    if d == ring.krull_dim:
        return [AlgPrime(ring, [])]
    if ring.kind == "Integers" and ring.semilocal and d == 0:
        return [AlgPrime(ring, [p]) for p in ring.semilocal]
    if ring.finite_spectrum:
        return []
    return None


def _label(primes):
    return tuple(sorted(((p.dim, p.key) for p in primes if p is not None), reverse=True))


def labels_match(src, tgt):
    """Concrete slots shared by both labels must name the same prime."""
    a, b = dict(src), dict(tgt)
    return all(b[d] == k for d, k in a.items() if d in b)


def _entry_expr(ring, dims, variant, prev=None, level=0):
    d = dims[level]
    last = level == len(dims) - 1

    def inner(at, nxt):
        core = Base(ring) if last else _entry_expr(ring, dims, variant, nxt, level + 1)
        if variant == BP:
            return Complete(Localize(core, at), at)
        return Localize(Complete(core, at), at) if last else Localize(core, at)

    concrete = primes_of_dim(ring, d)
    if concrete is not None:
        if isinstance(prev, str):
            raise InvalidExpr("a finite level cannot sit inside a symbolic family")
        qs = [q for q in concrete if prev is None or q.contains_prime(prev)]
        if not qs:
            return ZeroRing(ring)
        return FiniteProduct(tuple(inner(q, q) for q in qs), tuple((q,) for q in qs))
    var = f"p{d}"
    if prev is None or (not isinstance(prev, str) and prev.is_generic):
        fam = PrimeFamily(ring, d)
    elif isinstance(prev, str):
        fam = PrimeFamily(ring, d, parent=prev)
    else:
        fam = PrimeFamily(ring, d, within=(prev,))
    return FamilyProduct(var, fam, inner(Var(var), var))


def entry_expr(ring, flag, variant=ADELIC):
    """The unrewritten carrier of the entry at ``flag``."""
    return _entry_expr(ring, tuple(flag), variant)


# --- data types ------------------------------------------------------------------------

@dataclass(frozen=True)
class Factor:
    """One product factor of a vertex: carrier (x) module."""

    label: tuple
    carrier: object
    module: Complex

    @property
    def symbolic(self):
        return bool(self.carrier.family_count)

    def label_text(self):
        return "/".join(k for _, k in self.label) or "-"

    def to_json(self):
        return {"label": [k for _, k in self.label], "carrier": self.carrier.key,
                "symbolic": self.symbolic}


@dataclass(frozen=True)
class FaceComponent:
    map: ComplexMap
    tag: str

    def scaled(self, c):
        return FaceComponent(self.map.scale(c), self.tag)


@dataclass
class CubeDiagram:
    """Vertices (including the augmented initial one) and structural faces."""

    ring: object
    r: int
    variant: str
    vertices: dict
    faces: dict
    poset: object = None
    module: Complex = None
    name: str = "cube"
    corrupted: list = field(default_factory=list)

    @property
    def dims(self):
        return tuple(range(self.r, -1, -1))

    @property
    def base_core(self):
        return self.ring.core

    def flags(self):
        return sorted((S for S in self.vertices if S), key=_vsort)

    def entry(self, flag):
        S = frozenset(flag.dims if isinstance(flag, Flag) else flag)
        return self.vertices[S]

    def face(self, S, e):
        return self.faces.get((frozenset(S), e), {})

    def corrupt(self, flag, position, sign=-1):
        """A copy whose face into ``flag`` at ``position`` is scaled by ``sign``."""
        T = frozenset(flag.dims if isinstance(flag, Flag) else flag)
        e = flag_of(T)[position]
        key = (T - {e}, e)
        if key not in self.faces:
            raise InvalidExpr(f"no face into {vertex_key(T)} at position {position}")
        faces = dict(self.faces)
        faces[key] = {ij: c.scaled(sign) for ij, c in faces[key].items()}
        return CubeDiagram(self.ring, self.r, self.variant, self.vertices, faces, self.poset,
                           self.module, self.name + "-corrupted",
                           self.corrupted + [(vertex_key(T), position, sign)])

    def to_json(self):
        verts = []
        for S in sorted(self.vertices, key=_vsort):
            verts.append({"flag": vertex_key(S),
                          "factors": [f.to_json() for f in self.vertices[S]]})
        faces = []
        for (S, e) in sorted(self.faces, key=lambda k: (_vsort(k[0] | {k[1]}), -k[1])):
            T = S | {e}
            comps = self.faces[(S, e)]
            faces.append({
                "source": vertex_key(S), "target": vertex_key(T),
                "position": flag_of(T).dims.index(e),
                "components": [{"from": i, "to": j, "tag": c.tag, "matrix": c.map.to_json()}
                               for (i, j), c in sorted(comps.items())]})
        out = {"name": self.name, "variant": self.variant, "ring": self.ring.to_json(),
               "r": self.r, "vertices": verts, "faces": faces}
        if self.corrupted:
            out["corrupted"] = [list(c) for c in self.corrupted]
        return out


# --- construction ---------------------------------------------------------------------------

def _face_tag(T, e, fb):
    flag = flag_of(T)
    k = flag.dims.index(e)
    s = len(flag) - 1
    slots = dict(fb.label)
    at = slots.get(e, f"p{e}")
    if len(T) == 1:
        return f"augmentation M -> factors at {at}"
    if k < s:
        return f"unit of L_{at} after projection"
    prev = slots.get(flag[s - 1], f"p{flag[s - 1]}")
    return f"coefficient map Lambda_{prev} -> Lambda_{at}"


def _structural_faces(vertices):
    faces = {}
    for T in vertices:
        for e in T:
            S = T - {e}
            comps = {}
            for i, fa in enumerate(vertices[S]):
                for j, fb in enumerate(vertices[T]):
                    if labels_match(fa.label, fb.label):
                        comps[(i, j)] = FaceComponent(ComplexMap(fa.module, fb.module,
                                                                 _identity_comps(fa.module, fb.module)),
                                                      _face_tag(T, e, fb))
            faces[(S, e)] = comps
    return faces


def _identity_comps(a, b):
    core = a.core
    return {n: ExactMatrix.identity(core, r) for n, r in a.ranks.items() if b.rank(n) == r}


def _build(M, poset, variant, ring=None):
    ring = ring or poset.ring
    r = poset.r if poset is not None else ring.krull_dim
    if r > ring.krull_dim:
        raise InvalidExpr(f"poset dimension {r} exceeds the Krull dimension of {ring.name}")
    if M.core != ring.core:
        raise CarrierMismatch(f"module over {M.core!r}, ring core {ring.core!r}")
    if poset is not None:
        from .local_functors import KoszulData
        for p in poset.primes:
            KoszulData(p)
    dims = tuple(range(r, -1, -1))
    vertices = {frozenset(): [Factor((), Base(ring), M)]}
    import itertools
    for k in range(1, len(dims) + 1):
        for combo in itertools.combinations(dims, k):
            N = rewrite(entry_expr(ring, combo, variant))
            vertices[frozenset(combo)] = [
                Factor(_label(lab), c, M) for lab, c in factors_of(N)]
    cube = CubeDiagram(ring, r, variant, vertices, _structural_faces(vertices), poset, M,
                       name=f"{variant.lower()}-{ring.name}")
    return cube


def build_adelic_cube(M, poset):
    """The augmented adelic cube of M over the declared poset."""
    return _build(M, poset, ADELIC)


def build_bp_cube(M, poset):
    """The Beilinson-Parshin variant: Lambda_p L_p at every level."""
    return _build(M, poset, BP)


def explicit_cube(ring, r, vertices, faces, name="explicit", poset=None):
    """A diagram with one factor per vertex and hand-given face maps.

    ``vertices`` maps dimension sets to (carrier, module); ``faces`` maps
    (S, e) to a chain map of modules over the base core.
    """
    verts = {}
    for S, (carrier, module) in vertices.items():
        verts[frozenset(S)] = [Factor((), carrier, module)]
    fc = {}
    for (S, e), f in faces.items():
        S = frozenset(S)
        if S not in verts or (S | {e}) not in verts:
            raise InvalidExpr(f"face {vertex_key(S)} -> {vertex_key(S | {e})} has no vertex")
        f.check()
        fc[(S, e)] = {(0, 0): FaceComponent(f, "explicit")}
    return CubeDiagram(ring, r, EXPLICIT, verts, fc, poset, None, name)


# --- cochain law --------------------------------------------------------------------------

def _compose(c1, c2):
    """Factor-level composite of two face component dicts (c2 after c1)."""
    out = {}
    for (i, j), f in c1.items():
        for (j2, k), g in c2.items():
            if j2 != j:
                continue
            h = g.map.compose(f.map)
            out.setdefault((i, k), []).append(h)
    return out


def _same(p1, p2):
    for key in set(p1) | set(p2):
        maps = p1.get(key, []) + p2.get(key, [])
        degs = sorted({n for m in maps for n in m.degrees()})
        for n in degs:
            a = _sum_at(p1.get(key, []), n, maps[0])
            b = _sum_at(p2.get(key, []), n, maps[0])
            if a != b:
                return False, key, n
    return True, None, None


def _sum_at(maps, n, ref):
    acc = ExactMatrix.zeros(ref.core, ref.tgt.rank(n), ref.src.rank(n))
    for m in maps:
        acc = acc + m.at(n)
    return acc


@dataclass
class LawReport:
    checks: list
    passed: bool

    def to_json(self):
        return {"passed": self.passed, "checks": self.checks}


def check_cochain_law(cube, raise_on_failure=True):
    """Check that the two ways around every square of faces agree exactly.

    For a flag d and positions a < b the composite inserting the dimension
    at a first and then b must equal the one inserting b first; this is the
    cosimplicial identity of the face maps, including squares out of the
    augmented vertex.
    """
    checks = []
    ok_all = True
    for T in sorted(cube.vertices, key=_vsort):
        if len(T) < 2:
            continue
        flag = flag_of(T)
        for a in range(len(flag)):
            for b in range(a + 1, len(flag)):
                e1, e2 = flag[a], flag[b]
                S = T - {e1, e2}
                p1 = _compose(cube.faces[(S, e1)], cube.faces[(S | {e1}, e2)])
                p2 = _compose(cube.faces[(S, e2)], cube.faces[(S | {e2}, e1)])
                ok, where, n = _same(p1, p2)
                entry = {"flag": flag.key, "a": a, "b": b, "source": vertex_key(S),
                         "composites": len(p1), "equal": ok}
                if not ok:
                    entry["witness"] = {"factors": list(where), "degree": n}
                checks.append(entry)
                if not ok:
                    ok_all = False
                    if raise_on_failure:
                        raise LawViolation(
                            f"delta composites differ at flag ({flag.key}), a={a}, b={b}",
                            flag.key, a, b)
    return LawReport(checks, ok_all)


# --- evaluation under a test object and reduced totalization ---------------------------

@dataclass(frozen=True)
class Block:
    vertex: frozenset
    index: int
    m: int
    degree: int
    rank: int
    carrier: object
    label: str

    @property
    def id(self):
        return (_vsort(self.vertex), self.index, self.m)

    @property
    def symbolic(self):
        return bool(self.carrier.family_count)


def evaluate(cube, wrap=None, T=None, trace=None):
    """Apply a test object to every factor.

    ``wrap`` turns a carrier into the tested carrier (for instance K_p(-));
    ``T`` is the test complex over the base core tensored onto modules.
    Returns (vertices, faces) of the same shape as the cube's.
    """
    verts, origin = {}, {}
    for S, factors in cube.vertices.items():
        out = []
        for i, f in enumerate(factors):
            expr = wrap(f.carrier) if wrap else f.carrier
            N = rewrite(expr, trace)
            mod = T.tensor(f.module) if T is not None else f.module
            for lab, c in factors_of(N):
                out.append(Factor(f.label + _label(lab), c, mod))
                origin[(S, len(out) - 1)] = i
        verts[S] = out
    faces = {}
    for (S, e), comps in cube.faces.items():
        Tv = S | {e}
        new = {}
        for a, fa in enumerate(verts[S]):
            for b, fb in enumerate(verts[Tv]):
                c = comps.get((origin[(S, a)], origin[(Tv, b)]))
                if c is None or not labels_match(fa.label, fb.label):
                    continue
                m = tensor_identity(T, c.map, fa.module, fb.module) if T is not None else c.map
                new[(a, b)] = FaceComponent(m, c.tag)
        faces[(S, e)] = new
    return verts, faces


class Reduction:
    """Gaussian elimination on the total complex of an evaluated cube.

    A face or differential component between blocks with the same carrier
    whose matrix is invertible over the base core is cancelled; the rest of
    the complex is corrected by the usual zig-zag term.  What survives must
    live over a single carrier to be computed.
    """

    def __init__(self, core, vertices, faces, augmented=True, cancel=True):
        self.core = core
        self.cancel = cancel
        self.blocks = {}
        self.out = {}
        self.into = {}
        self.cancelled = []
        shift = 0 if augmented else 1
        for S, factors in vertices.items():
            if not S and not augmented:
                continue
            for i, f in enumerate(factors):
                for m, rk in f.module.ranks.items():
                    b = Block(S, i, m, m - len(S) + shift, rk, f.carrier, f.label_text())
                    self.blocks[b.id] = b
        for S, factors in vertices.items():
            eps = -1 if len(S) % 2 else 1
            for i, f in enumerate(factors):
                for m in f.module.ranks:
                    src = (_vsort(S), i, m)
                    tgt = (_vsort(S), i, m - 1)
                    if src in self.blocks and tgt in self.blocks:
                        d = f.module.d(m)
                        if not d.is_zero():
                            self._add(src, tgt, d.scale(core.coerce(eps)))
        for (S, e), comps in faces.items():
            Tv = S | {e}
            sg = face_sign(S, e)
            for (a, b), c in comps.items():
                for m in c.map.comps:
                    src, tgt = (_vsort(S), a, m), (_vsort(Tv), b, m)
                    if src in self.blocks and tgt in self.blocks:
                        F = c.map.at(m)
                        if not F.is_zero():
                            self._add(src, tgt, F.scale(core.coerce(sg)))

    def _add(self, src, tgt, M):
        cur = self.out.setdefault(src, {}).get(tgt)
        M = M if cur is None else cur + M
        if M.is_zero():
            self.out[src].pop(tgt, None)
            self.into.get(tgt, set()).discard(src)
        else:
            self.out[src][tgt] = M
            self.into.setdefault(tgt, set()).add(src)

    def _candidates(self):
        for src in sorted(self.out, key=lambda b: (not self.blocks[b].symbolic, b)):
            for tgt in sorted(self.out[src]):
                A, B = self.blocks[src], self.blocks[tgt]
                if A.carrier.key != B.carrier.key or A.rank != B.rank:
                    continue
                inv = _safe_invert(self.out[src][tgt])
                if inv is not None:
                    return src, tgt, inv
        return None

    def _eliminate(self, a, b, inv):
        for x in sorted(self.into.get(b, set()) - {a}):
            xb = self.out[x][b]
            for y in sorted(set(self.out.get(a, {})) - {b}):
                self._add(x, y, -(self.out[a][y] @ inv @ xb))
        for blk in (a, b):
            for t in list(self.out.get(blk, {})):
                self.into.get(t, set()).discard(blk)
            self.out.pop(blk, None)
            for s in list(self.into.get(blk, set())):
                self.out.get(s, {}).pop(blk, None)
            self.into.pop(blk, None)
        A, B = self.blocks.pop(a), self.blocks.pop(b)
        self.cancelled.append(f"{vertex_key(A.vertex)}[{A.label}]_{A.m} ~ "
                              f"{vertex_key(B.vertex)}[{B.label}]_{B.m} over {A.carrier.key}")

    def run(self):
        while self.cancel:
            cand = self._candidates()
            if cand is None:
                break
            self._eliminate(*cand)
        return self

    def surviving_families(self):
        fams = []
        for b in self.blocks.values():
            for f in surviving_families(b.carrier):
                if f.key not in [g.key for g in fams]:
                    fams.append(f)
        return fams

    def residual(self):
        """The surviving complex over its carrier core."""
        if not self.blocks:
            return zero_complex(self.core), None
        if any(b.symbolic for b in self.blocks.values()):
            fams = ", ".join(f.describe() for f in self.surviving_families())
            raise FamilyProductRemains(f"symbolic factors survive the reduction: {fams}")
        carriers = sorted({b.carrier.key for b in self.blocks.values()})
        if len(carriers) > 1:
            raise CarrierMismatch("surviving blocks over different carriers: " + "; ".join(carriers))
        carrier = next(iter(self.blocks.values())).carrier
        info = core_of(carrier)
        order = sorted(self.blocks, key=lambda i: (self.blocks[i].degree, i))
        offs, ranks = {}, {}
        for i in order:
            b = self.blocks[i]
            offs[i] = ranks.get(b.degree, 0)
            ranks[b.degree] = offs[i] + b.rank
        core = self.core
        diffs = {}
        for n in ranks:
            rows = [[core.zero] * ranks[n] for _ in range(ranks.get(n - 1, 0))]
            for src in order:
                if self.blocks[src].degree != n:
                    continue
                for tgt, M in self.out.get(src, {}).items():
                    for r in range(M.rows):
                        for c in range(M.cols):
                            x = M[r, c]
                            if not core.is_zero(x):
                                rows[offs[tgt] + r][offs[src] + c] += x
            diffs[n] = ExactMatrix(core, ranks.get(n - 1, 0), ranks[n], rows)
        C = Complex(core, ranks, diffs, carrier)
        C.check()
        return C.base_change(info.core, carrier), info


def _safe_invert(M):
    try:
        return invert(M)
    except (ZeroDivisionError, ArithmeticError):
        return None


def reduce_total(cube, wrap=None, T=None, augmented=True, trace=None):
    verts, faces = evaluate(cube, wrap, T, trace)
    return Reduction(cube.base_core, verts, faces, augmented).run()


def totalize(cube, augmented=True, degree_cap=DEFAULT_DEGREE_CAP):
    """Reduced total complex (no test object) and its homology table."""
    red = reduce_total(cube, augmented=augmented)
    C, info = red.residual()
    return C, info, red
