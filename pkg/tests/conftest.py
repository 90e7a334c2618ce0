import pytest

from cwlo.model import ModelParams


@pytest.fixture
def high_temp():
    return ModelParams(1, 0.3, 0.0)


@pytest.fixture
def critical():
    return ModelParams(1, 0.5, 0.0)


@pytest.fixture
def low_temp():
    return ModelParams(1, 1.0, 0.0)


@pytest.fixture
def field():
    return ModelParams(1, 0.3, 0.2)
