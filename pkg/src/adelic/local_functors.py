"""The local functors K_p, Gamma_p, L_p, Lambda_p and V_p on finite complexes.

Objects that are not finitely generated (``M[1/x]``, Pruefer modules,
completions) are never given generators.  Gamma_p M is the two-term
complex ``M -> M[1/x]`` and its homology is reported structurally: the
x-power torsion of H_n(M), and ``(A[1/x]/A)^r`` as the cokernel of the
localization unit on the free part.  Lambda_p and V_p are Hom out of a
colimit, computed as inverse towers whose limits are accepted only after a
window of equal invariant tuples.
"""

from dataclasses import dataclass, field

from .complexes import Complex, ComplexMap, InverseTower, free_module, koszul_complex
from .errors import (AdelicError, InvalidPrime, MissingGenerators, NotRepresentable,
                     UnsupportedExpression)
from .groebner import ideal_basis, ideal_contains
from .linalg import (ExactMatrix, ModuleInvariants, block_matrix, homology_invariants,
                     kernel_basis, subquotient_invariants)
from .ring_core import AlgPrime, Base, Complete, Koszul, Localize
from .rings import BivariateCore, coerce_between

DEFAULT_WINDOW = 4


# --- Koszul objects ---------------------------------------------------------------

@dataclass(frozen=True)
class KoszulData:
    """A prime with explicit generators whose radical is the prime."""

    prime: AlgPrime
    generators: tuple = None

    def __post_init__(self):
        gens = self.generators
        if gens is None:
            gens = self.prime.generators
        gens = tuple(self.prime.ring.element(g) for g in gens)
        object.__setattr__(self, "generators", gens)
        if not self.prime.is_generic and not gens:
            raise MissingGenerators(f"no Koszul generators for {self.prime.key}")
        if not radical_equals(self.prime, gens):
            raise InvalidPrime(f"{[str(g) for g in gens]} do not generate {self.prime.key} "
                               "up to radical")


def radical_equals(prime, gens, max_power=8):
    """rad(gens) == prime for the supported prime classes."""
    ring = prime.ring
    if prime.is_generic:
        return all(ring.is_zero(g) for g in gens)
    if not all(prime.contains(g) for g in gens):
        return False
    if ring.kind == "Integers":
        from sympy import factorint
        from math import gcd
        g = 0
        for x in gens:
            g = gcd(g, int(x))
        return g != 0 and set(factorint(abs(g))) == {prime.generators[0]}
    if ring.kind == "UnivariatePoly":
        from .polynomials import upoly_gcdex
        g = gens[0]
        for x in gens[1:]:
            g = upoly_gcdex(g, x)[0]
        q = prime.generators[0]
        while not g.is_constant():
            if not (g % q).is_zero():
                return False
            g = g // q
        return True
    gb = ideal_basis(list(gens))
    for pg in prime.generators:
        power = pg
        for _ in range(max_power):
            if ideal_contains(gb, power):
                break
            power = power * pg
        else:
            return False
    return True


def _data(p, generators=None):
    if isinstance(p, KoszulData):
        return p
    return KoszulData(p, generators)


def koszul(p, core, generators=None, carrier=None):
    """K_p over ``core``; K_(0) is the unit complex."""
    data = _data(p, generators)
    if data.prime.is_generic:
        return free_module(core, 1, 0, carrier)
    gens = [core.coerce(g) for g in data.generators]
    C = koszul_complex(core, gens)
    C.carrier = carrier
    return C


def koszul_tensor(p, M, generators=None):
    """K_p tensored with M (carrier tagged)."""
    data = _data(p, generators)
    carrier = Koszul(data.prime, M.carrier) if M.carrier is not None else None
    if data.prime.is_generic:
        return M
    out = koszul(data, M.core).tensor(M)
    out.carrier = carrier
    return out


# --- localization -----------------------------------------------------------------------

def localized_core(core, p):
    if isinstance(core, BivariateCore):
        return BivariateCore(core.field, p)
    from .rings import localize_core
    if p.is_generic:
        return localize_core(core, None)
    if core.is_field:
        return core
    return localize_core(core, p.generators[0])


def localize(p, M):
    """L_p M = M_p, computed by base change to the localized core."""
    core = localized_core(M.core, p)
    carrier = Localize(M.carrier, p) if M.carrier is not None else None
    return M.base_change(core, carrier)


# --- structural local cohomology (PID cores) -----------------------------------------

def _s_part(core, t, s):
    """The largest divisor of t supported on the primes of s."""
    part = core.one
    for _ in range(256):
        g = core.gcdex(t, s)[0]
        if core.is_unit(g):
            return part
        part = part * g
        t = core.div(t, g)
    raise NotRepresentable("s-part did not terminate")


def _unit_part(core, t, s):
    return core.div(t, _s_part(core, t, s))


def _pid_homology(M):
    if isinstance(M.core, BivariateCore):
        raise UnsupportedExpression("structural local cohomology is implemented over PID cores")
    return {n: homology_invariants(M.d(n + 1), M.d(n)) for n in M.degrees}


def _nonunit(core, ts):
    return tuple(t for t in ts if not core.is_unit(t))


@dataclass
class GammaDegree:
    """H_n(Gamma_s M): s-power torsion of H_n M, extended by Pruefer copies from H_{n+1} M."""

    degree: int
    torsion: ModuleInvariants
    prufer_copies: int

    def is_zero(self):
        return self.torsion.is_zero() and self.prufer_copies == 0


@dataclass
class GammaReport:
    prime: AlgPrime
    generator: object
    core: object
    degrees: dict

    def is_acyclic(self):
        return all(g.is_zero() for g in self.degrees.values())

    def cohomology(self, i):
        """H^i = H_{-i}."""
        return self.degrees.get(-i)

    def describe(self, n):
        g = self.degrees.get(n)
        if g is None or g.is_zero():
            return "0"
        parts = []
        if not g.torsion.is_zero():
            parts.append(str(g.torsion))
        if g.prufer_copies:
            A = repr(self.core)
            unit = f"coker({A} -> {A}[1/{self.core.fmt(self.generator)}])"
            parts.append(unit if g.prufer_copies == 1 else f"{unit}^{g.prufer_copies}")
        return " + ".join(parts)

    def to_json(self):
        out = {"prime": self.prime.key, "generator": str(self.generator), "core": repr(self.core),
               "acyclic": self.is_acyclic(), "homology": {}}
        for n in sorted(self.degrees):
            g = self.degrees[n]
            out["homology"][str(n)] = {
                "torsion": g.torsion.to_json(),
                "localization_cokernel": {"copies": g.prufer_copies,
                                          "description": self.describe(n) if g.prufer_copies else "0"},
                "zero": g.is_zero()}
        return out


def gamma(p, M, generators=None):
    """Gamma_p M = fib(M -> M[1/s]) with s the product of the Koszul generators.

    Over a PID core (gens) is principal, so its generator s suffices.
    """
    data = _data(p, generators)
    core = M.core
    if data.prime.is_generic:
        H = _pid_homology(M)
        return GammaReport(data.prime, None, core,
                           {n: GammaDegree(n, h, 0) for n, h in H.items()})
    s = _ideal_generator(core, data.generators)
    if core.is_zero(s):
        raise InvalidPrime("zero generator")
    H = _pid_homology(M)
    out = {}
    degs = set(H) | {n - 1 for n in H}
    for n in sorted(degs):
        h = H.get(n)
        tors = ModuleInvariants(0, (), core)
        if h is not None:
            parts = _nonunit(core, [_s_part(core, t, s) for t in h.torsion])
            tors = ModuleInvariants(0, tuple(sorted(parts, key=lambda t: _order(core, t))), core)
        h1 = H.get(n + 1)
        # A[1/s]/A is zero when s is a unit of the core
        copies = h1.free_rank if h1 is not None and not core.is_unit(s) else 0
        out[n] = GammaDegree(n, tors, copies)
    return GammaReport(data.prime, s, core, out)


def _ideal_generator(core, gens):
    """A single generator of (gens) over a PID core: their gcd.

    The product would do for the radical only when every generator is a
    prime power; (125, 50) shows why not.
    """
    s = core.zero
    for g in gens:
        s = core.gcdex(s, core.coerce(g))[0]
    return s


def _order(core, t):
    return (len(core.fmt(t)), core.fmt(t))


def gamma_tower(p, M, depth=10, window=DEFAULT_WINDOW, generators=None):
    """Independent oracle for :func:`gamma` from the finite stages of its colimit.

    Stage k is the fibre of M -s^k-> M, so H_0 of the stage is M[s^k] and
    H_{-1} is M/s^k M.  The transition to stage k+1 is the identity on the
    source copy of M and multiplication by s on the target copy.  Only the
    image of stage k in stage k+window survives into the colimit; factors of
    that image with valuation exactly k grow into Pruefer copies.
    """
    data = _data(p, generators)
    core = M.core
    if data.prime.is_generic:
        return {n: (h.free_rank, tuple(h.torsion_strings()), 0)
                for n, h in _pid_homology(M).items()}
    s = _ideal_generator(core, data.generators)
    cones = [ComplexMap(M, M, {n: ExactMatrix.identity(core, r).scale(s ** k)
                               for n, r in M.ranks.items()}).cone()
             for k in range(depth + window + 1)]
    push = s ** window
    prints = []
    for k in range(1, depth + 1):
        lo, hi = cones[k], cones[k + window]
        fp = {}
        for m in lo.degrees:
            t, r = M.rank(m), M.rank(m - 1)
            T = block_matrix(core, {(0, 0): ExactMatrix.identity(core, t).scale(push),
                                    (1, 1): ExactMatrix.identity(core, r)}, [t, r], [t, r])
            d = lo.d(m)
            Z = kernel_basis(d) if d.rows else ExactMatrix.identity(core, lo.rank(m))
            B = hi.d(m + 1)
            U = T @ Z if Z.cols else ExactMatrix.zeros(core, hi.rank(m), 0)
            h = subquotient_invariants(U.hstack(B), B)
            sk = core.normalize(s ** k)[0]
            parts = [_s_part(core, x, s) for x in h.torsion]
            grow = sum(1 for x in parts if x == sk)
            rest = tuple(sorted(core.fmt(x) for x in parts if x != sk and not core.is_unit(x)))
            fp[m - 1] = (grow, rest)
        prints.append(fp)
    for start in range(len(prints) - window + 1):
        if all(prints[start] == q for q in prints[start:start + window]):
            return prints[start]
    raise NotRepresentable("Gamma tower did not stabilize")


# --- completion --------------------------------------------------------------------------

@dataclass
class CompletionReport:
    """Lambda_p M via the tower K(s^k) (x) M; ``limits[n] = (completed rank, torsion)``."""

    prime: AlgPrime
    complex: Complex
    limits: dict
    stabilized_from: dict
    mittag_leffler: dict
    window: int

    def is_acyclic(self):
        return all(r == 0 and not t for r, t in self.limits.values())

    def describe(self, n):
        r, t = self.limits.get(n, (0, ()))
        if r == 0 and not t:
            return "0"
        base = f"completion at {self.prime.key}"
        parts = [base] * min(r, 3) if r <= 3 else [f"{base}^{r}"]
        return " + ".join(parts + [f"R/{x}" for x in t])

    def to_json(self):
        return {"prime": self.prime.key, "window": self.window,
                "carrier": self.complex.carrier.key if self.complex.carrier is not None else None,
                "homology": {str(n): {"completed_rank": r, "torsion": list(t),
                                      "stabilized_from_stage": self.stabilized_from[n],
                                      "mittag_leffler": self.mittag_leffler[n]}
                             for n, (r, t) in sorted(self.limits.items())},
                "acyclic": self.is_acyclic()}


def completion_tower(p, M, depth, generators=None):
    """Stages K(s^k) (x) M for k = 1..depth with the maps K(s^{k+1}) -> K(s^k)."""
    data = _data(p, generators)
    core = M.core
    gens = [core.coerce(g) for g in data.generators]
    stages, maps = [], []
    for k in range(1, depth + 1):
        stages.append(koszul_complex(core, [g ** k for g in gens]).tensor(M))
    for k in range(1, depth):
        # K(s^{k+1}) -> K(s^k): identity on the top exterior power's complement,
        # multiplication by g on each exterior factor
        Kb = koszul_complex(core, [g ** (k + 1) for g in gens])
        Ks = koszul_complex(core, [g ** k for g in gens])
        from itertools import combinations
        comps = {}
        for deg in Kb.ranks:
            subsets = list(combinations(range(len(gens)), deg))
            rows = []
            for i, S in enumerate(subsets):
                row = [core.zero] * len(subsets)
                c = core.one
                for j in S:
                    c = c * gens[j]
                row[i] = c
                rows.append(row)
            comps[deg] = ExactMatrix(core, len(subsets), len(subsets), rows)
        f = ComplexMap(Kb, Ks, comps)
        maps.append(_tensor_map(f, M))
    return InverseTower(stages, maps, label=f"Lambda_{data.prime.key}")


def _tensor_map(f, M):
    """f (x) id_M for chain maps between Koszul complexes."""
    src, tgt = f.src.tensor(M), f.tgt.tensor(M)
    comps = {}
    core = f.core
    for n in src.ranks:
        rows = [[core.zero] * src.rank(n) for _ in range(tgt.rank(n))]
        for p in sorted(f.src.ranks):
            q = n - p
            if M.rank(q) == 0:
                continue
            b = M.rank(q)
            F = f.at(p)
            # tensor() orders blocks by insertion order of (p, q) pairs
            os_, ot_ = _block_offset(f.src, M, p, q), _block_offset(f.tgt, M, p, q)
            for i in range(F.rows):
                for j in range(F.cols):
                    c = F[i, j]
                    if core.is_zero(c):
                        continue
                    for m in range(b):
                        rows[ot_ + i * b + m][os_ + j * b + m] += c
        comps[n] = ExactMatrix(core, tgt.rank(n), src.rank(n), rows)
    return ComplexMap(src, tgt, comps)


def _block_offset(C, D, p, q):
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


def _complete_limits(data, M, depth, window):
    core = M.core
    tower = completion_tower(data, M, depth)
    s = _ideal_generator(core, data.generators)
    limits, since, ml = {}, {}, {}
    degrees = sorted(set().union(*[st.ranks for st in tower.stages]))
    for n in degrees:
        ml[n] = tower.mittag_leffler(n, window)
        if not ml[n]:
            raise NotRepresentable(f"Lambda tower is not Mittag-Leffler in degree {n}")

        def fingerprint(stage_index, n=n):
            k = stage_index + 1
            inv = tower.image_invariants(stage_index, window, n)
            target = core.normalize(s ** k)[0]
            grow = sum(1 for t in inv.torsion if core.normalize(t)[0] == target)
            rest = tuple(sorted(core.fmt(t) for t in inv.torsion
                                if core.normalize(t)[0] != target))
            return (inv.free_rank, grow, rest)

        prints = [fingerprint(i) for i in range(depth - window)]
        for start in range(len(prints) - window + 1):
            if len(set(prints[start:start + window])) == 1:
                free, grow, rest = prints[start]
                if free:
                    raise NotRepresentable("free summand in a completion stage")
                limits[n], since[n] = (grow, rest), start + 1
                break
        else:
            raise NotRepresentable(f"Lambda tower did not stabilize in degree {n} "
                                   f"within window {window}")
    return limits, since, ml


def complete(p, M, window=DEFAULT_WINDOW, depth=None, generators=None):
    """Lambda_p M = Hom(Gamma_p 1, M) for M over a PID core.

    H_n of the limit is read off the tower: torsion factors of valuation
    exactly k at stage k become copies of the completed ring, the rest must
    stabilize.  The returned complex is M over the local core, tagged Complete.
    """
    data = _data(p, generators)
    core = M.core
    if data.prime.is_generic:
        return CompletionReport(data.prime, M,
                                {n: (h.free_rank, tuple(h.torsion_strings()))
                                 for n, h in _pid_homology(M).items()},
                                {n: 0 for n in M.degrees}, {n: True for n in M.degrees}, window)
    if isinstance(core, BivariateCore):
        raise NotRepresentable("completion towers are implemented over PID cores")
    depths = [depth] if depth else [window + 5, 2 * window + 10, 4 * window + 20]
    last = None
    for dp in depths:
        try:
            limits, since, ml = _complete_limits(data, M, dp, window)
            break
        except NotRepresentable as exc:
            last = exc
    else:
        raise last
    limits = {n: v for n, v in limits.items() if v != (0, ())} or {0: (0, ())}
    since = {n: since.get(n, 1) for n in limits}
    ml = {n: ml.get(n, True) for n in limits}
    local = localized_core(core, data.prime)
    carrier = None
    if M.carrier is not None:
        carrier = Complete(Localize(M.carrier, data.prime), data.prime)
    out = M.base_change(local, carrier)
    return CompletionReport(data.prime, out, limits, since, ml, window)


# --- V_p = Hom(L_p R, -) -------------------------------------------------------------------

def _outside(p, count):
    """The first ``count`` integers > 1 outside p (all of them for p = (0))."""
    out, n = [], 2
    while len(out) < count:
        if p.is_generic or n % p.generators[0] != 0:
            out.append(n)
        n += 1
    return out


@dataclass
class VReport:
    prime: AlgPrime
    mittag_leffler: dict
    fingerprint: dict
    window: int

    def is_acyclic(self):
        return all(self.mittag_leffler.values()) and all(
            v == (0, ()) for v in self.fingerprint.values())

    def to_json(self):
        return {"prime": self.prime.key, "window": self.window,
                "homology": {str(n): {"mittag_leffler": self.mittag_leffler[n],
                                      "stable_image": {"free_rank": self.fingerprint[n][0],
                                                       "torsion": list(self.fingerprint[n][1])}
                                      if self.fingerprint[n] is not None else None}
                             for n in sorted(self.mittag_leffler)},
                "acyclic": self.is_acyclic()}


def v_functor(p, M, window=DEFAULT_WINDOW, depth=None):
    """V_p M = holim of M <-s_1- M <-s_2- ... over elements s_i outside p.

    Only integer cores are supported.  A failure of Mittag-Leffler means a
    nonzero lim^1 (countable tower of countable groups), so the object is
    nonzero; no closed form is claimed.
    """
    data = _data(p)
    core = M.core
    if data.prime.ring.kind != "Integers":
        raise NotRepresentable("V_p towers are implemented for Z and its semilocalizations")
    depth = depth or (window + 6)
    mults = [core.coerce(s) for s in _outside(data.prime, depth)]
    stages = [M] * depth
    maps = [ComplexMap(M, M, {n: ExactMatrix.identity(core, r).scale(s)
                              for n, r in M.ranks.items()}) for s in mults[:-1]]
    tower = InverseTower(stages, maps, label=f"V_{data.prime.key}")
    ml, fp = {}, {}
    for n in M.degrees:
        ml[n] = tower.mittag_leffler(n, window)
        inv = tower.image_invariants(0, depth - 1, n)
        fp[n] = (inv.free_rank, tuple(inv.torsion_strings())) if ml[n] else None
    return VReport(data.prime, ml, fp, window)


# --- support and cosupport --------------------------------------------------------------------

@dataclass
class SupportReport:
    object_id: str
    support: list
    cosupport: list
    witnesses: dict = field(default_factory=dict)

    def to_json(self):
        out = {"object": self.object_id}
        if self.support is not None:
            out["support"] = [p.key for p in self.support]
        if self.cosupport is not None:
            out["cosupport"] = [p.key for p in self.cosupport]
        out["witnesses"] = {k: self.witnesses[k] for k in sorted(self.witnesses)}
        return out


def support_at(p, M):
    """Whether Gamma_p L_p 1 (x) M is nonzero, with a witness string."""
    Mp = localize(p, M)
    rep = gamma(p, Mp)
    # cross-check against the Koszul test object: Gamma_p X = 0 iff K_p (x) X = 0
    kz = koszul_tensor(p, Mp).is_acyclic()
    if kz != rep.is_acyclic():
        raise AdelicError(f"Gamma and Koszul tests disagree at {p.key}")
    if rep.is_acyclic():
        return False, "acyclic"
    n = min(d for d, g in rep.degrees.items() if not g.is_zero())
    return True, f"H_{n} = {rep.describe(n)}"


def cosupport_at(p, M, window=DEFAULT_WINDOW):
    """Whether Hom(Gamma_p R_p, M) is nonzero.

    At a maximal p, Gamma_p R_p = Gamma_p R and the Hom is Lambda_p M; at
    the generic point Gamma_(0) R_(0) is the fraction field and the Hom is
    V_(0) M.  Intermediate primes do not occur in dimension one.
    """
    if p.is_generic:
        rep = v_functor(p, M, window)
        if rep.is_acyclic():
            return False, "acyclic"
        bad = [n for n in sorted(rep.mittag_leffler) if not rep.mittag_leffler[n]]
        if bad:
            return True, f"lim^1 nonzero in degree {bad[0]} (tower not Mittag-Leffler)"
        n = min(n for n, v in rep.fingerprint.items() if v != (0, ()))
        return True, f"lim nonzero in degree {n}"
    if not p.is_maximal:
        raise NotRepresentable(f"cosupport at the non-maximal prime {p.key} is not implemented")
    rep = complete(p, M, window)
    if rep.is_acyclic():
        return False, "acyclic"
    n = min(n for n, (r, t) in rep.limits.items() if r or t)
    return True, f"H_{n} = {rep.describe(n)}"


def support(M, poset, name="M"):
    sup, wit = [], {}
    for p in poset.primes:
        nz, why = support_at(p, M)
        wit[f"support {p.key}"] = why
        if nz:
            sup.append(p)
    return SupportReport(name, sup, None, wit)


def cosupport(M, poset, name="M", window=DEFAULT_WINDOW):
    cos, wit = [], {}
    for p in poset.primes:
        nz, why = cosupport_at(p, M, window)
        wit[f"cosupport {p.key}"] = why
        if nz:
            cos.append(p)
    return SupportReport(name, None, cos, wit)


def support_report(M, poset, name="M", window=DEFAULT_WINDOW):
    a, b = support(M, poset, name), cosupport(M, poset, name, window)
    return SupportReport(name, a.support, b.cosupport, {**a.witnesses, **b.witnesses})


# --- dimension filtration --------------------------------------------------------------------

@dataclass
class FiltrationReport:
    """M_{<=i} -> M -> M_{>=i+1} with M_{<=i} = Gamma_I M for I the intersection ideal."""

    index: int
    family: list
    generator: object
    lower: GammaReport
    upper: dict
    lower_support: list

    def to_json(self):
        return {"i": self.index, "family": [p.key for p in self.family],
                "generator": str(self.generator),
                "lower": self.lower.to_json(),
                "upper": {str(n): v for n, v in sorted(self.upper.items())},
                "lower_support": [p.key for p in self.lower_support],
                "cofibre_sequence": "M_{>=i+1} is the cone of M_{<=i} -> M by construction",
                "generators_note": "Gamma of the family uses the intersection ideal of its "
                                   "maximal members"}


def dim_filtration(M, i, poset):
    """The dimension filtration triangle over a PID core."""
    core = M.core
    family = [p for p in poset.primes if poset.dim(p) <= i]
    top = [p for p in family if not any(q != p and poset.balmer_le(p, q) for q in family)]
    if any(p.is_generic for p in top):
        # the whole spectrum: Gamma is the identity
        s = core.zero
    else:
        s = core.one
        for p in top:
            for g in p.generators:
                s = s * core.coerce(g)
    H = _pid_homology(M)
    if core.is_zero(s):
        lower = GammaReport(top[0], None, core, {n: GammaDegree(n, h, 0) for n, h in H.items()})
        upper = {n: {"free_rank": 0, "torsion": []} for n in H}
    else:
        lower = _gamma_element(_FamilyPrime(tuple(top)), s, M)
        upper = {}
        for n, h in H.items():
            tors = _nonunit(core, [_unit_part(core, t, s) for t in h.torsion])
            upper[n] = {"free_rank": h.free_rank,
                        "torsion": [core.fmt(t) for t in tors],
                        "over": f"{core!r}[1/{core.fmt(s)}]"}
    lower_support = []
    for p in poset.primes:
        loc_core = localized_core(core, p)
        if _gamma_localized_nonzero(lower, p, loc_core):
            lower_support.append(p)
    return FiltrationReport(i, family, s, lower, upper, lower_support)


@dataclass(frozen=True)
class _FamilyPrime:
    members: tuple

    @property
    def key(self):
        return "+".join(p.key for p in self.members)


def _gamma_element(label, s, M):
    core = M.core
    H = _pid_homology(M)
    out = {}
    for n in sorted(set(H) | {n - 1 for n in H}):
        h = H.get(n)
        tors = ModuleInvariants(0, (), core)
        if h is not None:
            tors = ModuleInvariants(0, _nonunit(core, [_s_part(core, t, s) for t in h.torsion]), core)
        h1 = H.get(n + 1)
        out[n] = GammaDegree(n, tors, h1.free_rank if h1 is not None and not core.is_unit(s) else 0)
    return GammaReport(label, s, core, out)


def _gamma_localized_nonzero(rep, p, loc_core):
    """Whether L_p of a structural Gamma report is nonzero."""
    if rep.generator is None:
        return not rep.is_acyclic()
    s = coerce_between(rep.generator, rep.core, loc_core)
    if loc_core.is_unit(s):
        return False
    for g in rep.degrees.values():
        if g.prufer_copies:
            return True
        for t in g.torsion.torsion:
            if not loc_core.is_unit(coerce_between(t, rep.core, loc_core)):
                return True
    return False


# --- generator independence ----------------------------------------------------------------------

@dataclass
class IndependenceCertificate:
    prime: AlgPrime
    first: tuple
    second: tuple
    exponents: dict
    invariants_agree: bool

    @property
    def ok(self):
        return self.invariants_agree and all(v is not None for v in self.exponents.values())

    def to_json(self):
        return {"prime": self.prime.key, "first": [str(g) for g in self.first],
                "second": [str(g) for g in self.second],
                "cofinality_exponents": {k: v for k, v in sorted(self.exponents.items())},
                "invariants_agree": self.invariants_agree, "ok": self.ok}


def generator_independence(p, gens1, gens2, M=None, max_power=8):
    """Certify Gamma_p built from two generating sets gives equivalent objects.

    Each generator of one set has a power in the ideal of the other, which
    gives maps of the Koszul towers both ways and hence an equivalence of the
    stable Koszul complexes.  Over PID cores the structural invariants of
    Gamma on M are compared as well; over k[x,y] the two Koszul complexes
    must vanish at the same primes among a fixed probe set.
    """
    d1, d2 = KoszulData(p, gens1), KoszulData(p, gens2)
    exps = {}
    for src, dst in ((d1, d2), (d2, d1)):
        for g in src.generators:
            exps[f"{g} in ({', '.join(map(str, dst.generators))})"] = _power_in(g, dst.generators,
                                                                               p.ring, max_power)
    ring = p.ring
    if ring.kind == "BivariatePoly":
        core = BivariateCore(ring.field)
        a = koszul_complex(core, list(d1.generators))
        b = koszul_complex(core, list(d2.generators))
        agree = True
        for q in _probe_primes(ring, p):
            la = a.base_change(localized_core(core, q)).is_acyclic()
            lb = b.base_change(localized_core(core, q)).is_acyclic()
            agree = agree and la == lb
    else:
        core = ring.core
        M = M if M is not None else free_module(core, 1, 0, Base(ring))
        agree = _gamma_key(gamma(d1, M)) == _gamma_key(gamma(d2, M))
    return IndependenceCertificate(p, d1.generators, d2.generators, exps, agree)


def _probe_primes(ring, p):
    probes = [p, AlgPrime(ring, [])]
    for gens in (["x"], ["y"], ["x", "y"], ["x - 1", "y"], ["x", "y - 1"], ["x - y"]):
        q = AlgPrime(ring, gens)
        if q not in probes:
            probes.append(q)
    return probes


def _gamma_key(rep):
    return {n: (g.torsion.key(), g.prufer_copies) for n, g in rep.degrees.items()}


def _power_in(g, gens, ring, max_power):
    if ring.kind == "BivariatePoly":
        gb = ideal_basis(list(gens))
        power = g
        for k in range(1, max_power + 1):
            if ideal_contains(gb, power):
                return k
            power = power * g
        return None
    core = ring.core
    ideal = core.zero
    for x in gens:
        ideal = core.gcdex(ideal, core.coerce(x))[0]
    power = core.coerce(g)
    for k in range(1, max_power + 1):
        if core.divides(ideal, power):
            return k
        power = power * core.coerce(g)
    return None
