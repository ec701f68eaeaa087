from fractions import Fraction

import pytest

from adelic.errors import InvalidExpr, InvalidPrime, UnsupportedRing
from adelic.polynomials import QQ, GFp, parse_poly, is_irreducible_bivariate
from adelic.ring_core import AlgPrime, BaseRing
from adelic.rings import ZZ, SemilocalCore, coerce_between


def test_parse_and_arithmetic():
    x = parse_poly("x", QQ, 2)
    y = parse_poly("y", QQ, 2)
    f = parse_poly("x^2 - y^2", QQ, 2)
    assert (x + y) * (x - y) == f
    assert str(parse_poly("x*y + 1", QQ, 2)) in ("x*y + 1", "xy + 1")


def test_gfp_requires_prime():
    with pytest.raises(Exception):
        GFp(6)
    assert GFp(7).inv(3) * 3 % 7 == 1


def test_irreducibility():
    assert is_irreducible_bivariate(parse_poly("x^2 + y^2 + 1", QQ, 2))
    assert not is_irreducible_bivariate(parse_poly("x^2 - y^2", QQ, 2))


def test_semilocal_units():
    core = SemilocalCore(ZZ, [2, 3])
    assert core.is_unit(core.coerce(5))
    assert not core.is_unit(core.coerce(6))
    assert core.is_unit(core.coerce(Fraction(1, 7)))


def test_coerce_into_localization():
    core = SemilocalCore(ZZ, [5])
    assert coerce_between(3, ZZ, core) == core.coerce(3)


def test_ring_validation():
    with pytest.raises(InvalidPrime):
        BaseRing.integers([4])
    with pytest.raises(UnsupportedRing):
        BaseRing.prime_field(9)


def test_prime_validation(Z, kxy):
    assert AlgPrime(Z, [7]).key == "(7)"
    with pytest.raises(InvalidPrime):
        AlgPrime(Z, [6])
    assert AlgPrime(kxy, ["x", "y"]).is_maximal
    with pytest.raises(InvalidPrime):
        AlgPrime(kxy, ["x^2 - y^2"])


def test_prime_order(Z, kxy):
    g = AlgPrime(Z, [])
    assert AlgPrime(Z, [2]).contains_prime(g)
    assert AlgPrime(kxy, ["x", "y"]).contains_prime(AlgPrime(kxy, ["x"]))
    assert not AlgPrime(kxy, ["x"]).contains_prime(AlgPrime(kxy, ["y"]))


def test_semilocal_element_rejects_fractions_over_Z(Z):
    with pytest.raises(InvalidExpr):
        Z.element("1/2")
    assert BaseRing.integers([2]).element("1/3") == Fraction(1, 3)
