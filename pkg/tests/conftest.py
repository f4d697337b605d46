import pytest

from dronemfp.energy_model import DroneParams


@pytest.fixture
def params():
    return DroneParams()
