"""
Local cohomology, completion and support
========================================

Gamma_(2) Z is the fibre of Z -> Z[1/2]: nothing in degree 0 and the
Pruefer group Z[1/2]/Z one step down.  Completion is read off the tower
Z/2^k, which stabilizes to the 2-adic integers.
"""

from adelic.complexes import free_module, from_presentation
from adelic.local_functors import complete, cosupport, gamma, gamma_tower, support
from adelic.ring_core import AlgPrime, BaseRing
from adelic.spectrum import SpectrumPoset

Z = BaseRing.integers()
two = AlgPrime(Z, [2])
one = free_module(Z.core)

g = gamma(two, one)
for n in sorted(g.degrees, reverse=True):
    print(f"H^{-n}(Gamma_(2) Z) =", g.describe(n))

lam = complete(two, one)
print("Lambda_(2) Z:", lam.describe(0), "stable from stage", lam.stabilized_from[0])

# the colimit oracle agrees with the direct computation on a mixed module
M = from_presentation(Z.core, [[0], [12]])
print("Gamma_(2)(Z + Z/12):", {n: gamma(two, M).describe(n) for n in gamma(two, M).degrees})
print("tower oracle:       ", gamma_tower(two, M))

P = SpectrumPoset(Z, ["(0)", "(2)", "(3)", "(5)"])
print("supp Z/6   =", [p.key for p in support(from_presentation(Z.core, [[6]]), P).support])
print("cosupp Z/2 =", [p.key for p in cosupport(from_presentation(Z.core, [[2]]), P).cosupport])
