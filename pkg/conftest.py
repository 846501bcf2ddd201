"""Общие фикстуры тестов."""
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.mesh.triangulation import build_structured
from src.utils.config import Config


@pytest.fixture
def unit_square():
    """Единичный квадрат из двух треугольников."""
    return build_structured(1, 1)


@pytest.fixture
def mesh2():
    return build_structured(2, 2)


@pytest.fixture
def mesh4():
    return build_structured(4, 4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_config():
    """Фабрика конфигураций: секции поверх значений по умолчанию."""
    return lambda **sections: Config.model_validate(sections)


@pytest.fixture
def equilibrium_config(make_config):
    return make_config(
        physics={"a": 1.0, "gamma": 1.4, "rho0": 1.0, "force": [0, 0]},
        mesh={"nx": 2},
        time={"T": 1.0, "dt": 0.25},
        scheme={"name": "cr", "bc": "navier"},
    )
