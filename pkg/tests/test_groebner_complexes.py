import pytest

from adelic.complexes import (Complex, ComplexMap, free_module, hom_complex,
                              koszul_complex, tensor_identity, total_complex, zero_complex)
from adelic.errors import CompositionNonzero, NonCommuting
from adelic.groebner import groebner_homology, ideal_basis, ideal_contains
from adelic.linalg import ExactMatrix
from adelic.local_functors import koszul, localized_core
from adelic.polynomials import QQ, parse_poly
from adelic.ring_core import AlgPrime
from adelic.rings import QQ_CORE, ZZ, BivariateCore, SemilocalCore

from conftest import cyclic


def P(s):
    return parse_poly(s, QQ, 2)


def test_ideal_membership():
    gb = ideal_basis([P("x"), P("y")])
    assert ideal_contains(gb, P("x*y + y^2"))
    assert not ideal_contains(gb, P("x + 1"))


def test_koszul_x_regular():
    core = BivariateCore(QQ)
    K = koszul_complex(core, [P("x")])
    assert K.homology(1).zero
    assert not K.homology(0).zero


def test_koszul_xy_residue_field():
    core = BivariateCore(QQ)
    K = koszul_complex(core, [P("x"), P("y")])
    h0 = K.homology(0)
    assert not h0.zero
    assert h0.raw.hilbert[0] == 1 and sum(h0.raw.hilbert) == 1
    assert K.homology(1).zero and K.homology(2).zero


def test_local_koszul_middle_homology_zero(kxy):
    m = AlgPrime(kxy, ["x", "y"])
    core = localized_core(kxy.core, m)
    K = koszul_complex(core, [P("x"), P("y")])
    assert K.homology(1).zero


def test_quotient_by_xy_nonzero():
    core = BivariateCore(QQ)
    d_in = ExactMatrix.from_rows(core, [[P("x*y")]])
    h = groebner_homology(d_in, ExactMatrix.zeros(core, 0, 1))
    assert not h.is_zero


def test_cone_of_identity_and_doubling():
    Zm = free_module(ZZ)
    assert Zm.identity().cone().is_acyclic()
    two = ComplexMap(Zm, Zm, {0: ExactMatrix.scalar(ZZ, 2)})
    h = two.cone().homology(0).raw
    assert h.torsion_strings() == ["2"]


def test_cone_unit_map_after_koszul():
    # Z_(2) -> completion, after K_2: both sides Z/2 in degree 0
    core = SemilocalCore(ZZ, [2])
    K = koszul_complex(core, [2])
    assert K.identity().is_quasi_isomorphism()
    assert K.homology(0).raw.torsion_strings() == ["2"]


def test_koszul_2_tensor_koszul_3_acyclic():
    K = koszul_complex(ZZ, [2]).tensor(koszul_complex(ZZ, [3]))
    assert K.is_acyclic()


def test_tensor_unit_law():
    C = cyclic(ZZ, 4)
    T = C.tensor(free_module(ZZ))
    assert [h.to_json() for h in T.homology_all()] == [h.to_json() for h in C.homology_all()]


def test_hom_koszul_dual():
    H = hom_complex(koszul_complex(ZZ, [2]), free_module(ZZ))
    nz = [h for h in H.homology_all() if not h.zero]
    assert len(nz) == 1 and nz[0].degree == -1 and nz[0].raw.torsion_strings() == ["2"]


def test_hom_unit():
    D = cyclic(ZZ, 3)
    H = hom_complex(free_module(ZZ), D)
    assert [str(h) for h in H.homology_all()] == [str(h) for h in D.homology_all()]


def test_check_rejects_nonzero_composite():
    d1 = ExactMatrix.from_rows(ZZ, [[1]])
    with pytest.raises(CompositionNonzero):
        Complex(ZZ, {0: 1, 1: 1, 2: 1}, {1: d1, 2: d1}).check()


def test_koszul_over_field_is_acyclic():
    assert koszul_complex(QQ_CORE, [2]).is_acyclic()
    assert not koszul_complex(ZZ, [2]).is_acyclic()


def test_total_complex_zero_square():
    e = frozenset()
    Zc = zero_complex(ZZ)
    verts = {frozenset({1}): Zc, frozenset({0}): Zc, frozenset({0, 1}): Zc, e: Zc}
    faces = {(e, 1): ComplexMap(Zc, Zc), (e, 0): ComplexMap(Zc, Zc),
             (frozenset({1}), 0): ComplexMap(Zc, Zc), (frozenset({0}), 1): ComplexMap(Zc, Zc)}
    assert not total_complex(verts, faces).ranks


def test_total_complex_punctured_cospan_holim():
    # Z/p -> 0 <- 0: the punctured total complex, shifted, has H_0 = Z/p
    Zp, Zc = cyclic(ZZ, 5), zero_complex(ZZ)
    verts = {frozenset({1}): Zp, frozenset({0}): Zc, frozenset({0, 1}): Zc}
    faces = {(frozenset({1}), 0): ComplexMap(Zp, Zc), (frozenset({0}), 1): ComplexMap(Zc, Zc)}
    T = total_complex(verts, faces).shift(1)
    nz = [h for h in T.homology_all() if not h.zero]
    assert [(h.degree, h.raw.torsion_strings()) for h in nz] == [(0, ["5"])]


def test_total_complex_rejects_noncommuting():
    Zm = free_module(ZZ)
    e = frozenset()
    one = ExactMatrix.scalar(ZZ, 1)
    two = ExactMatrix.scalar(ZZ, 2)
    verts = {e: Zm, frozenset({1}): Zm, frozenset({0}): Zm, frozenset({0, 1}): Zm}
    faces = {(e, 1): ComplexMap(Zm, Zm, {0: one}), (e, 0): ComplexMap(Zm, Zm, {0: one}),
             (frozenset({1}), 0): ComplexMap(Zm, Zm, {0: one}),
             (frozenset({0}), 1): ComplexMap(Zm, Zm, {0: two})}
    with pytest.raises(NonCommuting):
        total_complex(verts, faces)


def test_tensor_identity_is_chain_map():
    K = koszul_complex(ZZ, [2])
    f = ComplexMap(cyclic(ZZ, 4), cyclic(ZZ, 2), {0: ExactMatrix.scalar(ZZ, 1),
                                                  1: ExactMatrix.scalar(ZZ, 2)})
    f.check()
    tensor_identity(K, f).check()


def test_koszul_generic_is_unit(Z):
    K = koszul(AlgPrime(Z, []), Z.core)
    assert K.ranks == {0: 1}
