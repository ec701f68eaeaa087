"""Randomized property suites with fixed seeds.

Each suite returns (cases, failures); a failure is a short description of
the offending case.  Oracles are independent of the code under test: sympy
determinants for Smith forms, a hand-built comparison of cones for totalization.
"""

import math
import random
from fractions import Fraction
from itertools import combinations

import sympy

from adelic.complexes import Complex, ComplexMap, free_module, from_presentation, total_complex
from adelic.linalg import ExactMatrix, smith_normal_form
from adelic.local_functors import gamma, generator_independence, localize, support
from adelic.ring_core import AlgPrime, BaseRing
from adelic.rings import ZZ
from adelic.spectrum import SpectrumPoset

SMALL_PRIMES = [2, 3, 5, 7]


def random_int_matrix(rng, rows, cols, lo=-6, hi=6):
    return [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]


def random_unimodular(rng, n, steps=6):
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-2, 2)
        U[i] = [a + c * b for a, b in zip(U[i], U[j])]
    return U


def matmul(A, B):
    return [[sum(a * b for a, b in zip(r, c)) for c in zip(*B)] for r in A]


# --- SNF against the minor-gcd oracle ---------------------------------------------------

def minor_gcd_factors(rows):
    """d_k = g_k / g_{k-1} with g_k the gcd of all k x k minors."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    M = sympy.Matrix(rows)
    out, prev = [], 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for ri in combinations(range(m), k):
            for ci in combinations(range(n), k):
                g = math.gcd(g, int(M.extract(list(ri), list(ci)).det()))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def snf_suite(cases=200, seed=20240601):
    rng = random.Random(seed)
    failures = []
    for case in range(cases):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        rows = random_int_matrix(rng, m, n)
        if rng.random() < 0.3:
            # force a nontrivial divisibility chain
            k = rng.choice([2, 3, 4])
            rows = [[k * x for x in r] for r in rows]
        A = ExactMatrix.from_rows(ZZ, rows)
        S = smith_normal_form(A)
        got = [abs(int(d)) for d in S.invariant_factors()]
        want = minor_gcd_factors(rows)
        ok = got == want and (S.left @ A @ S.right).tolist() == S.diagonal.tolist()
        ok = ok and all(got[i + 1] % got[i] == 0 for i in range(len(got) - 1))
        if not ok:
            failures.append(f"case {case}: {rows} -> {got}, oracle {want}")
    return cases, failures


# --- Koszul generator independence ------------------------------------------------------

def random_module(rng, core, max_gens=3):
    """coker of a random integer presentation, at most ``max_gens`` generators."""
    g = rng.randint(1, max_gens)
    r = rng.randint(0, g)
    if r == 0:
        return free_module(core, g)
    rows = random_int_matrix(rng, g, r, -12, 12)
    return from_presentation(core, rows)


def koszul_independence_suite(cases=200, seed=20240602):
    """Every fifth case is over k[x,y] at (x, y) or (x); the rest over Z."""
    rng = random.Random(seed)
    R, K = BaseRing.integers(), BaseRing.bivariate()
    failures = []
    for case in range(cases):
        if case % 5 == 4:
            a, b, c = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 2)
            if rng.random() < 0.5:
                prime = AlgPrime(K, ["x", "y"])
                gens1 = ["x", "y"]
                gens2 = [f"x^{a}", f"x*y^{c}", f"y^{b}"]
            else:
                prime = AlgPrime(K, ["x"])
                gens1 = [f"x^{a}"]
                gens2 = [f"x^{b}*(y + 1)^{c}", f"x^{a + b}"] if rng.random() < 0.5 else [f"x^{b}"]
            M = None
        else:
            p = rng.choice(SMALL_PRIMES)
            prime = AlgPrime(R, [p])
            a, b, c = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)
            v = rng.choice([u for u in range(1, 12) if u % p])
            gens1 = [p ** a]
            gens2 = [p ** b, p ** c * v]
            M = random_module(rng, R.core)
        cert = generator_independence(prime, gens1, gens2, M)
        if not cert.ok:
            failures.append(f"case {case}: {prime.key} {gens1} vs {gens2}")
    return cases, failures


# --- Gamma_p L_p = L_p Gamma_p ----------------------------------------------------------

def _gamma_signature(rep, p):
    """Per degree: p-adic valuations of the torsion and the number of localization cokernels."""
    out = {}
    for n, g in rep.degrees.items():
        vals = []
        for t in g.torsion.torsion:
            x = Fraction(t)
            v, num = 0, abs(x.numerator)
            while num % p == 0:
                num //= p
                v += 1
            if v:
                vals.append(v)
        sig = (tuple(sorted(vals)), g.prufer_copies)
        if sig != ((), 0):
            out[n] = sig
    return out


def gamma_localize_suite(cases=200, seed=20240603):
    rng = random.Random(seed)
    R = BaseRing.integers()
    failures = []
    for case in range(cases):
        p = rng.choice(SMALL_PRIMES)
        prime = AlgPrime(R, [p])
        M = random_complex(rng, R.core)
        a = _gamma_signature(gamma(prime, localize(prime, M)), p)
        b = _gamma_signature(gamma(prime, M), p)
        if a != b:
            failures.append(f"case {case}: {prime.key}: Gamma L = {a}, L Gamma = {b}")
    return cases, failures


def random_complex(rng, core, max_rank=3):
    """A two- or three-term complex of free modules with integer differentials."""
    if rng.random() < 0.5:
        return random_module(rng, core, max_rank)
    # three terms: d1 d2 = 0 by building d2 from a kernel vector of d1
    n0, n1 = rng.randint(1, max_rank), rng.randint(1, max_rank)
    d1 = random_int_matrix(rng, n0, n1, -8, 8)
    K = sympy.Matrix(d1).nullspace()
    if not K:
        return from_presentation(core, d1)
    cols = []
    for v in K[:2]:
        den = math.lcm(*[int(sympy.fraction(x)[1]) for x in v])
        w = [int(x * den) for x in v]
        m = rng.choice([1, 2, 3, 5])
        cols.append([x * m for x in w])
    d2 = [list(r) for r in zip(*cols)]
    ranks = {0: n0, 1: n1, 2: len(cols)}
    C = Complex(core, ranks, {1: ExactMatrix.from_rows(core, d1),
                              2: ExactMatrix.from_rows(core, d2)})
    C.check()
    return C


# --- totalization against iterated fibres ----------------------------------------------

def _pullback_square(rng):
    """The pullback of k: C -> D and h = [1 | w]: D + E -> D, in random bases.

    A = C + E maps to B by (c, e) -> (kc - we, e) and to C by projection.
    """
    c, e = rng.randint(0, 2), rng.randint(0, 1)
    d = rng.randint(0, 3 - e)
    k = random_int_matrix(rng, d, c, -3, 3)
    w = random_int_matrix(rng, d, e, -3, 3)
    na, nb = c + e, d + e
    f = [[k[i][j] if j < c else -w[i][j - c] for j in range(na)] for i in range(d)]
    f += [[1 if j == c + i else 0 for j in range(na)] for i in range(e)]
    g = [[1 if i == j else 0 for j in range(na)] for i in range(c)]
    h = [[1 if i == j else 0 for j in range(d)] + w[i] for i in range(d)]
    # change bases of A and B
    UA, UB = random_unimodular(rng, na), random_unimodular(rng, nb)
    UAi = _inv(UA)
    f = _mul3(UB, f, UAi, nb, na)
    g = _mul3(None, g, UAi, c, na)
    h = _mul3(None, h, _inv(UB), d, nb)
    return (na, nb, c, d), f, g, h, k


def _inv(U):
    return [[int(x) for x in r] for r in sympy.Matrix(U).inv().tolist()] if U else []


def _mul3(L, M, R, rows, cols):
    if not rows or not cols:
        return [[0] * cols for _ in range(rows)]
    out = matmul(M, R)
    return matmul(L, out) if L is not None else out


def _commuting_square(rng):
    """B = A + B' with f the inclusion after a unimodular change of basis, so
    h = [k g | w] U^-1 makes h f = k g."""
    a = rng.randint(0, 2)
    b_extra = rng.randint(0, 3 - a)
    c, d = rng.randint(0, 3), rng.randint(0, 3)
    g = random_int_matrix(rng, c, a, -3, 3)
    k = random_int_matrix(rng, d, c, -3, 3)
    w = random_int_matrix(rng, d, b_extra, -3, 3)
    nb = a + b_extra
    U = random_unimodular(rng, nb)
    inc = [[1 if i == j else 0 for j in range(a)] for i in range(nb)]
    f = matmul(U, inc) if nb and a else [[0] * a for _ in range(nb)]
    kg = matmul(k, g) if d and a and c else [[0] * a for _ in range(d)]
    hw = [kg[i] + w[i] for i in range(d)]
    h = matmul(hw, _inv(U)) if d and nb else [[0] * nb for _ in range(d)]
    return (a, nb, c, d), f, g, h, k


def random_commuting_square(rng, core):
    """A -> B, A -> C, B -> D, C -> D of free modules in degree 0, commuting by construction.

    Half the cases start from a genuine pullback; some of those are then
    spoiled by doubling h and k, which keeps the square commuting.
    """
    if rng.random() < 0.5:
        ranks, f, g, h, k = _pullback_square(rng)
    else:
        ranks, f, g, h, k = _commuting_square(rng)
    if rng.random() < 0.3 and ranks[3] and ranks[1]:
        h = [[2 * x for x in r] for r in h]
        k = [[2 * x for x in r] for r in k]
    A, B, C, D = [free_module(core, n) for n in ranks]

    def cmap(src, tgt, rows):
        if not src.ranks or not tgt.ranks:
            return ComplexMap(src, tgt)
        return ComplexMap(src, tgt, {0: ExactMatrix(core, tgt.rank(0), src.rank(0), rows)})

    return A, B, C, D, cmap(A, B, f), cmap(A, C, g), cmap(B, D, h), cmap(C, D, k)


def _cone_square_map(f, k, g, h):
    """cone(f) -> cone(k) induced by (g on A, h on B) for the square A->B, C->D."""
    src, tgt = f.cone(), k.cone()
    core = f.core
    comps = {}
    for n in src.ranks:
        rows = [[core.zero] * src.rank(n) for _ in range(tgt.rank(n))]
        hb = h.at(n)
        for i in range(hb.rows):
            for j in range(hb.cols):
                rows[i][j] = hb[i, j]
        ga = g.at(n - 1)
        ro, co = k.tgt.rank(n), f.tgt.rank(n)
        for i in range(ga.rows):
            for j in range(ga.cols):
                rows[ro + i][co + j] = ga[i, j]
        comps[n] = ExactMatrix(core, tgt.rank(n), src.rank(n), rows)
    m = ComplexMap(src, tgt, comps)
    m.check()
    return m


def totalization_suite(cases=200, seed=20240604):
    rng = random.Random(seed)
    failures = []
    for case in range(cases):
        A, B, C, D, f, g, h, k = random_commuting_square(rng, ZZ)
        e = frozenset()
        vertices = {e: A, frozenset({1}): B, frozenset({0}): C, frozenset({0, 1}): D}
        faces = {(e, 1): f, (e, 0): g, (frozenset({1}), 0): h, (frozenset({0}), 1): k}
        tot = total_complex(vertices, faces).is_acyclic()
        # the square is a pullback iff cone(f) -> cone(k) is a quasi-isomorphism
        fib = _cone_square_map(f, k, g, h).is_quasi_isomorphism()
        if tot != fib:
            failures.append(f"case {case}: total {tot}, iterated fibres {fib}")
    return cases, failures


# --- empty support implies acyclic over Z_S ------------------------------------------------

def empty_support_suite(cases=200, seed=20240605):
    rng = random.Random(seed)
    failures = []
    nonempty = 0
    for case in range(cases):
        S = sorted(rng.sample(SMALL_PRIMES, rng.randint(1, 2)))
        R = BaseRing.integers(S)
        poset = SpectrumPoset(R, ["(0)"] + [f"({p})" for p in S])
        X = random_complex(rng, R.core)
        if rng.random() < 0.4:
            # units of Z_S: multiply a presentation by primes outside S
            u = rng.choice([q for q in [1, 11, 13, 17] if q not in S])
            X = from_presentation(R.core, [[u]])
        sup = support(X, poset).support
        acyclic = X.is_acyclic()
        nonempty += bool(sup)
        if (not sup) != acyclic:
            failures.append(f"case {case}: Z_{S} support {[p.key for p in sup]}, acyclic {acyclic}")
    return cases, failures


SUITES = {
    "SNF vs minor-gcd oracle": snf_suite,
    "Koszul generator independence": koszul_independence_suite,
    "Gamma_p L_p = L_p Gamma_p": gamma_localize_suite,
    "totalization vs iterated fibres": totalization_suite,
    "empty support => acyclic over Z_S": empty_support_suite,
}
