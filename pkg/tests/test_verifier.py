from pathlib import Path

import pytest

from adelic.cli import load_scenario
from adelic.complexes import free_module
from adelic.cube import build_adelic_cube
from adelic.ring_core import BaseRing
from adelic.spectrum import SpectrumPoset
from adelic.verifier import (NOT_PULLBACK, PULLBACK, RELATIVE, plan_reductions,
                             verify_bp_equivalence, verify_pullback)

SCEN = Path(__file__).resolve().parent.parent / "scenarios"


def test_hasse_plan(Z, hasse_poset):
    plan = plan_reductions(build_adelic_cube(free_module(Z.core), hasse_poset))
    assert [t.key for t in plan.tests] == ["K(2)", "K(3)", "K(5)", "L(0)"]
    assert plan.to_json()["survivors"]["L(0)"] == ["(2)", "(3)", "(5)"]
    assert not plan.omitted


def test_hasse_is_pullback(Z, hasse_poset):
    rep = verify_pullback(build_adelic_cube(free_module(Z.core), hasse_poset))
    assert rep.verdict == PULLBACK and rep.exit_code == 0
    assert all(r.acyclic for r in rep.results)
    assert rep.witness() is None


@pytest.mark.parametrize("primes", [["(0)", "(2)"], ["(0)", "(7)", "(11)"]])
def test_other_hasse_posets(Z, primes):
    rep = verify_pullback(build_adelic_cube(free_module(Z.core), SpectrumPoset(Z, primes)))
    assert rep.verdict == PULLBACK


def test_corrupted_hasse_has_witness():
    rep = verify_pullback(load_scenario(SCEN / "corrupted-hasse.json").cube())
    assert rep.verdict == NOT_PULLBACK and rep.exit_code == 2
    w = rep.witness()
    assert w["test"] == "K(5)" and w["torsion"] == ["5"]


def test_kxy_chain_relative(kxy, chain_poset):
    rep = verify_pullback(build_adelic_cube(free_module(kxy.core), chain_poset))
    assert rep.verdict == RELATIVE and rep.exit_code == 3
    assert rep.omitted == ["closed points containing (x) other than (x, y)"]
    keys = {r.test.key: r for r in rep.results}
    assert keys["K(x, y)"].acyclic and keys["K(x) L(x)"].acyclic
    assert keys["K(x) L(x)"].test.local


def test_bp_equivalence_local():
    R = BaseRing.integers([5])
    rep = verify_bp_equivalence(SpectrumPoset(R, ["(0)", "(5)"]))
    assert rep.r == 1 and rep.passed and rep.equivalent
    for e in rep.entries:
        assert all(t["normal_forms_agree"] for t in e["tests"])


def test_bp_front_face_kxy(chain_poset):
    rep = verify_bp_equivalence(chain_poset)
    assert rep.r == 2 and rep.front_face == ["2", "0", "2>0"]
    assert rep.front_face_equal and rep.passed
