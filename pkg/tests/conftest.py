import pytest

from adelic.complexes import free_module, from_presentation
from adelic.ring_core import AlgPrime, BaseRing
from adelic.spectrum import SpectrumPoset


@pytest.fixture
def Z():
    return BaseRing.integers()


@pytest.fixture
def kxy():
    return BaseRing.bivariate()


@pytest.fixture
def hasse_poset(Z):
    return SpectrumPoset(Z, ["(0)", "(2)", "(3)", "(5)"])


@pytest.fixture
def chain_poset(kxy):
    return SpectrumPoset(kxy, ["(0)", "(x)", "(x, y)"])


@pytest.fixture
def semilocal23():
    R = BaseRing.integers([2, 3])
    return R, SpectrumPoset(R, ["(0)", "(2)", "(3)"])


def cyclic(core, n):
    return from_presentation(core, [[n]])


def unit_module(ring):
    return free_module(ring.core)


def prime(ring, *gens):
    return AlgPrime(ring, list(gens))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
