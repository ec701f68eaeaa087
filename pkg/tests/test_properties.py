import pytest

from property_suites import SUITES


@pytest.mark.parametrize("name", sorted(SUITES))
def test_property_suite(name):
    cases, failures = SUITES[name]()
    assert cases >= 200
    assert failures == [], failures[:5]
