"""
Modules over the adelic cube
============================

Tensoring up a module gives a cocartesian diagram whose homotopy limit is
the module again.  The converse fails: the cospan Z -> Q <- Z carrying
(Z/5, 0, 0) is cocartesian, since both faces land in zero after
rationalizing, but its homotopy limit is Z/5 and tensoring back up puts
Z/5 on both ends.
"""

from adelic.adelic_modules import (f_d_reconstruct, holim_module, is_cocartesian,
                                   module_roundtrip, reconstruction_start, roundtrip_check,
                                   tensor_up)
from adelic.cli import load_scenario
from adelic.complexes import from_presentation
from adelic.ring_core import BaseRing
from adelic.spectrum import SpectrumPoset

R = BaseRing.integers([2, 3])
P = SpectrumPoset(R, ["(0)", "(2)", "(3)"])

for pres in ([[0]], [[4]], [[0], [2]]):
    M = from_presentation(R.core, pres)
    print(pres, "round trip:", roundtrip_check(M, P).verdict)

X = tensor_up(from_presentation(R.core, [[4]]), P)
d = reconstruction_start(X)
print("Z/4 starts in dimension", d, "stage passes:", f_d_reconstruct(X, d).passed)

cospan = load_scenario("scenarios/remark85.json").adelic_module()
print("cocartesian:", is_cocartesian(cospan).cocartesian)
print("holim:", holim_module(cospan).method)
rt = module_roundtrip(cospan)
print("original", "(" + ", ".join(rt.original) + ")", "-> round trip", rt.witness_text())
