import warnings

import pytest

from adelic.errors import InvalidPrime, UnknownPrime
from adelic.ring_core import (AlgPrime, Base, BaseRing, Complete, FamilyProduct, FiniteProduct,
                              Koszul, Localize, PrimeFamily, Var, expr_from_json, is_unit,
                              relevant_primes, rewrite)
from adelic.spectrum import Flag, SpectrumPoset, all_flags


def test_lambda_and_v_sets(Z):
    P = SpectrumPoset(Z, ["(0)", "(2)", "(3)"])
    assert [p.key for p in P.lambda_set("(0)")] == ["(0)", "(2)", "(3)"]
    assert [p.key for p in P.lambda_set("(2)")] == ["(2)"]
    assert sorted(p.key for p in P.v_set("(2)")) == ["(0)", "(2)"]
    assert P.r == 1 and P.generic.key == "(0)"
    assert P.is_family(P.lambda_set("(2)"))


def test_flags_and_chains(Z, chain_poset):
    P = SpectrumPoset(Z, ["(0)", "(2)", "(3)"])
    assert [str(f) for f in all_flags(1)] == ["(1)", "(0)", "(1>0)"]
    assert len(P.chains(Flag((1, 0)))) == 2
    assert len(all_flags(2)) == 7
    assert all(len(chain_poset.chains(f)) == 1 for f in all_flags(2))
    single = SpectrumPoset(BaseRing.integers([5]), ["(5)"])
    assert single.r == 0 and len(single.chains(Flag((0,)))) == 1


def test_unknown_prime(Z):
    P = SpectrumPoset(Z, ["(0)", "(2)"])
    with pytest.raises(UnknownPrime):
        P.dim("(3)")


def test_bad_dims_and_containments(Z):
    with pytest.raises(InvalidPrime):
        SpectrumPoset(Z, ["(0)", "(2)"], containments=[("(2)", "(0)")])
    with pytest.raises(InvalidPrime):
        SpectrumPoset(Z, ["(0)", "(2)"], dims={"(2)": 1})
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        P = SpectrumPoset(Z, ["(2)"], dims={"(2)": 0})
        assert not w and P.r == 0


def test_unit_certificates(Z, kxy):
    two = AlgPrime(Z, [2])
    c = is_unit(3, Localize(Base(Z), two))
    assert c.verdict == "Unit" and "3 not in (2)" in c.witness
    assert is_unit(2, Complete(Localize(Base(Z), two), two)).verdict == "NonUnit"
    m = AlgPrime(kxy, ["x", "y"])
    assert is_unit(kxy.element("x + 1"), Localize(Base(kxy), m)).verdict == "Unit"


def test_rewrite_examples(Z):
    two, g = AlgPrime(Z, [2]), AlgPrime(Z, [])
    assert rewrite(Complete(Base(Z), g)).key == "Z"
    E = Complete(Localize(Base(Z), two), two)
    assert rewrite(Localize(E, two)).key == rewrite(E).key
    fam = FamilyProduct("p", PrimeFamily(Z, 0, (), None, ()),
                        Complete(Localize(Base(Z), Var("p")), Var("p")))
    N = rewrite(Koszul(two, fam))
    assert not N.family_count
    assert "(2)" in N.key


def test_rewrite_trace_records_kills(Z):
    two, three = AlgPrime(Z, [2]), AlgPrime(Z, [3])
    trace = []
    E = Koszul(two, Complete(Localize(Base(Z), three), three))
    assert rewrite(E, trace).key == "0"
    assert any(s.rule == "RW2" for s in trace)


def test_relevant_primes(Z):
    two, three = AlgPrime(Z, [2]), AlgPrime(Z, [3])
    fam = FamilyProduct("p", PrimeFamily(Z, 0, (), None, ()),
                        Complete(Localize(Base(Z), Var("p")), Var("p")))
    assert relevant_primes(fam, [two]) == [two]
    Q = BaseRing.rationals()
    assert relevant_primes(Base(Q), [AlgPrime(Q, [])]) == []
    fin = FiniteProduct((Complete(Localize(Base(Z), two), two),
                         Complete(Localize(Base(Z), three), three)))
    assert sorted(p.key for p in relevant_primes(fin, [two, three])) == ["(2)", "(3)"]


def test_expr_json_roundtrip(Z):
    two = AlgPrime(Z, [2])
    E = Localize(Complete(Localize(Base(Z), two), two), AlgPrime(Z, []))
    assert expr_from_json(E.to_json(), Z).key == E.key
