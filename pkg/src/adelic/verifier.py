"""Homotopy-pullback verification by the small-object test strategy.

A cube is a homotopy pullback iff it stays one after tensoring with K_p for
every p (Koszul objects detect zero).  K_p is small, so it passes inside
the products and kills every factor outside the closure of p; what is left
is finite and its augmented total complex is computed exactly.

For a non-maximal, non-generic prime in dimension >= 2 infinitely many
closed points above p survive K_p.  We test the local part K_p L_p
exactly; the closed points above p are covered by their own K_m tests only
when declared, so the remaining family is reported and the verdict is
relative.
"""

from dataclasses import dataclass, field

from .cube import Reduction, build_adelic_cube, build_bp_cube, evaluate, flag_of
from .complexes import free_module
from .errors import AdelicError, CarrierMismatch, FamilyProductRemains
from .groebner import DEFAULT_DEGREE_CAP
from .local_functors import KoszulData, koszul
from .ring_core import AlgPrime, Koszul, Localize, PrimeFamily, relevant_primes

PULLBACK = "Pullback"
NOT_PULLBACK = "NotPullback"
RELATIVE = "RelativePullback"

TENSOR_KOSZUL = "TensorKoszul"
LOCALIZE_GENERIC = "LocalizeGeneric"


@dataclass(frozen=True)
class ReductionTest:
    prime: AlgPrime
    kind: str
    local: bool = False

    @property
    def key(self):
        if self.kind == LOCALIZE_GENERIC:
            return f"L{self.prime.key}"
        return f"K{self.prime.key}" + (f" L{self.prime.key}" if self.local else "")

    def wrap(self, E):
        if self.kind == LOCALIZE_GENERIC:
            return Localize(E, self.prime)
        if self.local:
            return Koszul(self.prime, Localize(E, self.prime))
        return Koszul(self.prime, E)

    def complex(self, core):
        if self.kind == LOCALIZE_GENERIC:
            return None
        return koszul(self.prime, core)

    def to_json(self):
        return {"test": self.key, "kind": self.kind, "prime": self.prime.key,
                "local": self.local}


@dataclass
class ReductionPlan:
    tests: list
    survivors: dict
    omitted: dict
    justification: list

    def to_json(self):
        return {"tests": [t.to_json() for t in self.tests],
                "survivors": {t.key: [p.key for p in self.survivors[t.key]] for t in self.tests},
                "omitted": {k: v.describe() for k, v in sorted(self.omitted.items())},
                "justification": self.justification}


def _closed_points_above(ring, p):
    """Closed points containing p form an infinite family (dim >= 2 rings)."""
    return p.dim >= 1 and ring.krull_dim >= 2 and not ring.finite_spectrum


def plan_reductions(cube):
    """One K_p test per declared prime below the top dimension, one L_(0) per generic point.

    Order: closed points first, ascending dimension, generic points last.
    """
    poset = cube.poset
    if poset is None:
        raise AdelicError("the cube has no declared poset to plan tests from")
    r = poset.r
    tests, survivors, omitted, just = [], {}, {}, []
    lower = sorted((p for p in poset.primes if poset.dim(p) < r or r == 0),
                   key=lambda p: (poset.dim(p), p.key))
    for p in lower:
        KoszulData(p)
        if p.is_generic:
            continue
        local = not p.is_maximal
        t = ReductionTest(p, TENSOR_KOSZUL, local)
        tests.append(t)
        if local and _closed_points_above(cube.ring, p):
            covered = tuple(q for q in poset.closed_points if q.contains_prime(p))
            omitted[t.key] = PrimeFamily(cube.ring, 0, (p,), None, covered)
    if r > 0:
        for g in poset.of_dim(r):
            tests.append(ReductionTest(g, LOCALIZE_GENERIC))
    for t in tests:
        exprs = [f.carrier for fs in cube.vertices.values() for f in fs]
        found = set()
        for E in exprs:
            found |= set(relevant_primes(Localize(E, t.prime) if t.local else E,
                                         [t.prime], poset.primes))
        survivors[t.key] = sorted(found, key=AlgPrime.sort_key)
    for t in tests:
        if t.kind == TENSOR_KOSZUL:
            gens = ", ".join(str(g) for g in KoszulData(t.prime).generators)
            just.append(f"K{t.prime.key} built on ({gens}), radical certified")
    return ReductionPlan(tests, survivors, omitted, just)


@dataclass
class TestResult:
    test: ReductionTest
    acyclic: bool
    method: str
    homology: list
    cancelled: list
    kills: list
    certified: bool = True
    omitted: object = None
    core: str = ""

    def witness(self):
        for h in self.homology:
            if not h.zero:
                return {"test": self.test.key, **h.to_json()}
        return None

    def to_json(self):
        out = {"test": self.test.key, "acyclic": self.acyclic, "method": self.method,
               "core": self.core, "homology": [h.to_json() for h in self.homology],
               "cancelled": self.cancelled, "kills": self.kills}
        if not self.certified:
            out["certified"] = False
        if self.omitted is not None:
            out["omitted"] = self.omitted.describe()
        return out


@dataclass
class VerificationReport:
    cube: str
    verdict: str
    plan: ReductionPlan
    results: list
    omitted: list = field(default_factory=list)

    @property
    def exit_code(self):
        return {PULLBACK: 0, NOT_PULLBACK: 2, RELATIVE: 3}[self.verdict]

    def witness(self):
        for r in self.results:
            w = r.witness()
            if w is not None:
                return w
        return None

    def to_json(self):
        out = {"cube": self.cube, "verdict": self.verdict, "plan": self.plan.to_json(),
               "tests": [r.to_json() for r in self.results]}
        if self.omitted:
            out["omitted_primes"] = self.omitted
        w = self.witness()
        if w is not None:
            out["witness"] = w
        return out


def run_test(cube, test, degree_cap=DEFAULT_DEGREE_CAP, augmented=True):
    trace = []
    T = test.complex(cube.base_core)
    verts, faces = evaluate(cube, test.wrap, T, trace)
    kills = sorted({f"{s.before} = 0: {s.certificate}" for s in trace
                    if s.rule == "RW2" and s.certificate})
    method, C, info, cancelled = "direct", None, None, []
    try:
        C, info = Reduction(cube.base_core, verts, faces, augmented, cancel=False).residual()
    except (FamilyProductRemains, CarrierMismatch):
        red = Reduction(cube.base_core, verts, faces, augmented).run()
        cancelled = red.cancelled
        method = "cancellation"
        C, info = red.residual()
    homology = C.homology_all(degree_cap) if C.ranks else []
    acyclic = all(h.zero for h in homology)
    certified = acyclic or info is None or info.faithful
    return TestResult(test, acyclic, method, homology, cancelled, kills, certified,
                      core=repr(C.core) if C.ranks else "0")


def verify_pullback(cube, degree_cap=DEFAULT_DEGREE_CAP, plan=None):
    """Run every planned test on the augmented cube and combine the verdicts."""
    plan = plan or plan_reductions(cube)
    results = []
    for t in plan.tests:
        res = run_test(cube, t, degree_cap)
        res.omitted = plan.omitted.get(t.key)
        results.append(res)
    bad = [r for r in results if not r.acyclic]
    for r in bad:
        if not r.certified:
            raise AdelicError(f"test {r.test.key} is nonzero only over a flat, non-faithful core")
    omitted = [plan.omitted[k].describe() for k in sorted(plan.omitted)]
    if bad:
        verdict = NOT_PULLBACK
    elif omitted:
        verdict = RELATIVE
    else:
        verdict = PULLBACK
    return VerificationReport(cube.name, verdict, plan, results, omitted)


# --- Beilinson-Parshin comparison ----------------------------------------------------------

@dataclass
class BPReport:
    entries: list
    front_face: list
    equivalent: bool
    front_face_equal: bool
    r: int

    @property
    def passed(self):
        return self.equivalent if self.r <= 1 else self.front_face_equal

    def to_json(self):
        return {"r": self.r, "equivalent": self.equivalent,
                "front_face": self.front_face, "front_face_equal": self.front_face_equal,
                "entries": self.entries, "passed": self.passed}


def verify_bp_equivalence(poset, M=None, degree_cap=DEFAULT_DEGREE_CAP):
    """Entrywise comparison of the adelic and Beilinson-Parshin cubes.

    Entries are compared through their normal forms (Lambda L collapses at
    maximal and generic primes); under each planned test the identity comparison map of
    a concrete entry is checked by an exact cone computation.
    """
    ring = poset.ring
    M = M if M is not None else free_module(ring.core)
    A, B = build_adelic_cube(M, poset), build_bp_cube(M, poset)
    plan = plan_reductions(A)
    entries = []
    for S in A.flags():
        ka = [f.carrier.key for f in A.vertices[S]]
        kb = [f.carrier.key for f in B.vertices[S]]
        same = ka == kb
        cones = []
        for t in plan.tests:
            ta = [_tested(t, f, ring) for f in A.vertices[S]]
            tb = [_tested(t, f, ring) for f in B.vertices[S]]
            ok = ta == tb
            cone = None
            if ok and ta and all(k is not None and not any(fam for _, fam in k) for k in ta):
                cone = _identity_cone_acyclic(t, A.vertices[S], ring, M, degree_cap)
            cones.append({"test": t.key, "normal_forms_agree": ok, "cone_acyclic": cone})
        entries.append({"flag": flag_of(S).key, "adelic": ka, "bp": kb, "equal": same,
                        "tests": cones})
    r = A.r
    front = [e for e in entries if set(map(int, e["flag"].split(">"))) <= {r, 0}]
    equivalent = all(e["equal"] for e in entries)
    front_ok = all(e["equal"] for e in front)
    return BPReport(entries, [e["flag"] for e in front], equivalent, front_ok, r)


def _tested(t, f, ring):
    from .ring_core import factors_of, rewrite
    N = rewrite(t.wrap(f.carrier))
    return tuple((c.key, bool(c.family_count)) for _, c in factors_of(N)) or None


def _identity_cone_acyclic(t, factors, ring, M, degree_cap):
    from .ring_core import core_of, factors_of, rewrite
    T = t.complex(ring.core)
    mod = T.tensor(M) if T is not None else M
    for f in factors:
        for _, c in factors_of(rewrite(t.wrap(f.carrier))):
            core = core_of(c).core
            X = mod.base_change(core, c)
            if not X.identity().is_quasi_isomorphism(degree_cap):
                return False
    return True


__all__ = ["PULLBACK", "NOT_PULLBACK", "RELATIVE", "ReductionTest", "ReductionPlan",
           "TestResult", "VerificationReport", "plan_reductions", "verify_pullback",
           "run_test", "verify_bp_equivalence", "BPReport"]
