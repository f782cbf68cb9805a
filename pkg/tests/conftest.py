import pytest

from kepler_alpha import lookup


@pytest.fixture(scope="session")
def table_half():
    return lookup.build_table(0.5)


@pytest.fixture(scope="session")
def table_corner():
    # just below 1 - cos(pi/7), so corner queries have a fallback
    return lookup.build_table(0.09)
