import pytest

from adelic.complexes import free_module
from adelic.cube import (ADELIC, BP, LawViolation, build_adelic_cube, build_bp_cube,
                         check_cochain_law, flag_of, totalize, vertex_key)
from adelic.errors import CarrierMismatch
from adelic.spectrum import SpectrumPoset
from adelic.ring_core import BaseRing


def test_hasse_cube_shape(Z, hasse_poset):
    C = build_adelic_cube(free_module(Z.core), hasse_poset)
    assert C.r == 1 and C.variant == ADELIC
    assert len(C.vertices) == 4
    assert [vertex_key(S) for S in C.flags()] == ["1", "0", "1>0"]


def test_hasse_law_single_square(Z, hasse_poset):
    rep = check_cochain_law(build_adelic_cube(free_module(Z.core), hasse_poset))
    assert rep.passed and len(rep.checks) == 1


def test_kxy_law_counts(kxy, chain_poset):
    rep = check_cochain_law(build_adelic_cube(free_module(kxy.core), chain_poset))
    assert rep.passed
    flags = [c["flag"] for c in rep.checks]
    assert len(flags) == 6 and flags.count("2>1>0") == 3


@pytest.mark.parametrize("position", [0, 1, 2])
def test_corruption_detected(kxy, chain_poset, position):
    C = build_adelic_cube(free_module(kxy.core), chain_poset).corrupt(frozenset({2, 1, 0}), position)
    with pytest.raises(LawViolation):
        check_cochain_law(C)
    rep = check_cochain_law(C, raise_on_failure=False)
    assert not rep.passed
    bad = [c for c in rep.checks if not c["equal"]]
    assert bad and all(c["flag"] == "2>1>0" for c in bad) and "witness" in bad[0]


def test_flag_of_orders_descending():
    assert flag_of(frozenset({0, 2})).key == "2>0"


def test_bp_cube_and_json_stable():
    R = BaseRing.integers([5])
    P = SpectrumPoset(R, ["(0)", "(5)"])
    B = build_bp_cube(free_module(R.core), P)
    assert B.variant == BP
    assert B.to_json() == build_bp_cube(free_module(R.core), P).to_json()


def test_untested_totalization_mixes_carriers():
    # without a test object the surviving blocks live over different rings
    R = BaseRing.integers([5])
    P = SpectrumPoset(R, ["(0)", "(5)"])
    with pytest.raises(CarrierMismatch):
        totalize(build_adelic_cube(free_module(R.core), P))
