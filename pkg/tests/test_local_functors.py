import pytest

from adelic.complexes import free_module, from_presentation
from adelic.errors import InvalidPrime, NotRepresentable
from adelic.local_functors import (KoszulData, complete, cosupport, dim_filtration, gamma,
                                   gamma_tower, generator_independence, koszul, localize,
                                   support, v_functor)
from adelic.ring_core import AlgPrime
from adelic.spectrum import SpectrumPoset

from conftest import cyclic


@pytest.fixture
def primes(Z):
    return AlgPrime(Z, []), AlgPrime(Z, [2]), AlgPrime(Z, [3])


def test_koszul_data_checks_radical(Z, kxy):
    KoszulData(AlgPrime(Z, [2]), [8])
    with pytest.raises(InvalidPrime):
        KoszulData(AlgPrime(Z, [2]), [6])
    KoszulData(AlgPrime(kxy, ["x", "y"]), ["x^2", "y"])
    with pytest.raises(InvalidPrime):
        KoszulData(AlgPrime(kxy, ["x", "y"]), ["x"])


def test_koszul_complexes(Z, kxy):
    K2 = koszul(AlgPrime(Z, [2]), Z.core)
    assert K2.homology(0).raw.torsion_strings() == ["2"]
    Kxy = koszul(AlgPrime(kxy, ["x", "y"]), kxy.core)
    assert Kxy.ranks == {0: 1, 1: 2, 2: 1}
    assert not Kxy.homology(0).zero


def test_gamma_of_Z_at_2(Z, primes):
    rep = gamma(primes[1], free_module(Z.core))
    assert rep.cohomology(0).is_zero()
    assert rep.cohomology(1).prufer_copies == 1
    assert rep.describe(-1) == "coker(ZZ -> ZZ[1/2])"


def test_gamma_torsion_and_rational(Z, primes):
    g, two, _ = primes
    assert gamma(two, cyclic(Z.core, 2)).describe(0) == "ZZ/2"
    Q = localize(g, free_module(Z.core))
    assert gamma(two, Q).is_acyclic()


@pytest.mark.parametrize("pres", [[[0], [12]], [[8]], [[0], [0], [6]], [[2], [9]]])
def test_gamma_against_tower_oracle(Z, primes, pres):
    two = primes[1]
    M = from_presentation(Z.core, pres)
    rep = gamma(two, M)
    tower = gamma_tower(two, M)
    for n in set(rep.degrees) | set(tower):
        grow, rest = tower.get(n, (0, ()))
        g = rep.degrees.get(n)
        assert (g.prufer_copies if g else 0) == grow
        assert (tuple(g.torsion.torsion_strings()) if g else ()) == rest


def test_gamma_uses_ideal_generator(Z, primes):
    # (125, 50) generates (25): no 2-torsion may leak into Gamma_(5)
    rep = gamma(KoszulData(AlgPrime(Z, [5]), [125, 50]), cyclic(Z.core, 2))
    assert rep.is_acyclic()


def test_localize(Z, primes):
    g, two, three = primes
    assert localize(two, free_module(Z.core)).core.primes == (2,)
    assert localize(g, cyclic(Z.core, 2)).is_acyclic()
    assert localize(two, koszul(three, Z.core)).is_acyclic()


def test_complete(Z, primes):
    g, two, _ = primes
    rep = complete(two, free_module(Z.core))
    assert rep.limits[0] == (1, ()) and rep.window == 4 and rep.mittag_leffler[0]
    assert complete(two, localize(g, free_module(Z.core))).is_acyclic()
    M = cyclic(Z.core, 6)
    assert complete(g, M).limits[0] == (0, ("6",))


def test_complete_refuses_kxy(kxy):
    with pytest.raises(NotRepresentable):
        complete(AlgPrime(kxy, ["x", "y"]), free_module(kxy.core))


def test_v_functor(Z, primes):
    g, two, _ = primes
    rep = v_functor(two, localize(two, cyclic(Z.core, 2)))
    assert rep.fingerprint[0] == (0, ("2",))
    Q = localize(g, free_module(Z.core))
    assert v_functor(g, Q).fingerprint[0] == (1, ())
    assert not v_functor(g, free_module(Z.core)).mittag_leffler[0]


def test_support_and_cosupport(Z):
    P = SpectrumPoset(Z, ["(0)", "(2)", "(3)"])
    assert [p.key for p in support(cyclic(Z.core, 6), P).support] == ["(2)", "(3)"]
    assert [p.key for p in support(free_module(Z.core), P).support] == ["(0)", "(2)", "(3)"]
    assert [p.key for p in cosupport(cyclic(Z.core, 2), P).cosupport] == ["(2)"]


def test_filtration(Z, primes):
    g = primes[0]
    P = SpectrumPoset(Z, ["(0)", "(2)"])
    rep = dim_filtration(free_module(Z.core), 0, P)
    assert rep.lower.describe(-1) == "coker(ZZ -> ZZ[1/2])"
    assert rep.upper[0]["free_rank"] == 1 and rep.upper[0]["over"] == "ZZ[1/2]"
    t = dim_filtration(cyclic(Z.core, 2), 0, P)
    assert t.lower.describe(0) == "ZZ/2"
    assert all(v["free_rank"] == 0 and not v["torsion"] for v in t.upper.values())
    q = dim_filtration(localize(g, free_module(Z.core)), 0, P)
    assert q.lower.is_acyclic()


def test_generator_independence_kxy(kxy):
    m = AlgPrime(kxy, ["x", "y"])
    assert generator_independence(m, ["x", "y"], ["x^2", "y^3"]).ok
    assert generator_independence(AlgPrime(kxy, ["x"]), ["x"], ["x^3"]).ok
