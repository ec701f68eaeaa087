"""
A chain of primes in the affine plane
=====================================

Over k[x,y] with (0) < (x) < (x,y) the cube is three-dimensional and its
entries contain infinite products over closed points.  The test at the
closed point finitizes completely; the test at the line (x) only sees the
local part, and the other closed points on the line are reported.
"""

from adelic.complexes import free_module
from adelic.cube import build_adelic_cube, check_cochain_law
from adelic.ring_core import BaseRing
from adelic.spectrum import SpectrumPoset
from adelic.verifier import verify_bp_equivalence, verify_pullback

R = BaseRing.bivariate()
chain = SpectrumPoset(R, ["(0)", "(x)", "(x, y)"])
cube = build_adelic_cube(free_module(R.core), chain)

law = check_cochain_law(cube)
print(len(law.checks), "squares checked, all equal:", law.passed)

# a sign flip on the top flag breaks exactly the squares through it
broken = check_cochain_law(cube.corrupt(frozenset({2, 1, 0}), 1), raise_on_failure=False)
print("corrupted:", [c["flag"] for c in broken.checks if not c["equal"]])

rep = verify_pullback(cube)
for r in rep.results:
    print(r.test.key, "acyclic" if r.acyclic else "NOT acyclic", r.omitted.describe() if r.omitted else "")
print("verdict:", rep.verdict)

bp = verify_bp_equivalence(chain)
print("BP front face", bp.front_face, "agrees:", bp.front_face_equal)
