import pytest

from qilab import default_plan, geometric_plan


@pytest.fixture(scope="session")
def plan3():
    """Default desk-scale plan: n=3, 8 annuli from 1e2 to 1e9, 64 directions."""
    return default_plan(dimension=3)


@pytest.fixture(scope="session")
def plan2():
    return default_plan(dimension=2)


@pytest.fixture(scope="session")
def plan1():
    return default_plan(dimension=1)


@pytest.fixture(scope="session")
def desk_plan3():
    """Small-radius plan for searches that walk the source space."""
    return geometric_plan(r_min=10.0, annuli=4, dimension=3)
