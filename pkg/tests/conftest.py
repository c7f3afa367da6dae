import pytest

from heatvqe.config import CAP_ENV_VAR, make_rng, random_b
from heatvqe.modules.heat import FourierSystem


@pytest.fixture(autouse=True)
def default_cap(monkeypatch):
    monkeypatch.delenv(CAP_ENV_VAR, raising=False)


@pytest.fixture
def rng():
    return make_rng(1234)


@pytest.fixture
def system3(rng):
    """Substituted 3-qubit system with a random complex rhs."""
    return FourierSystem.heat(3, 1.0, random_b(3, rng), substituted=True)

