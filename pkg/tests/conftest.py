import pytest

from wpcnrelay import Geometry, SystemParams, gains_from_geometry


@pytest.fixture(scope="session")
def params():
    """Default physics constants used throughout the experiments."""
    return SystemParams()


@pytest.fixture(scope="session")
def gains_9_3(params):
    """Collinear reference instance: far user at 9 m, relay at 3 m."""
    return gains_from_geometry(Geometry.collinear(9.0, 3.0), params)
