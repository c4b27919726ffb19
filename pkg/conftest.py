"""
Общие фикстуры тестов fusemot.
"""

import numpy as np
import pytest

from src.config import reset_config
from src.synth import default_scenario, render_scenario


@pytest.fixture(autouse=True)
def fresh_config():
    """Каждый тест читает конфигурацию заново."""
    reset_config()
    yield
    reset_config()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def default_sequence():
    """Отрендеренная типовая сцена: 4 агента, 20 кадров."""
    return render_scenario(default_scenario(seed=0, agent_count=4, frame_count=20))
