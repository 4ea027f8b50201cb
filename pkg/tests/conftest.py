"""
Shared fixtures: settings, wired controllers and a seeded generator.
"""
import numpy as np
import pytest

from controllers.experiment_controller import ExperimentController
from utils.settings import Settings


@pytest.fixture
def settings():
    return Settings()


@pytest.fixture
def lab(settings):
    return ExperimentController(settings)


@pytest.fixture
def operators(lab):
    return lab.operators


@pytest.fixture
def hamiltonians(lab):
    return lab.hamiltonians


@pytest.fixture
def rotations(lab):
    return lab.rotations


@pytest.fixture
def gadgets(lab):
    return lab.gadgets


@pytest.fixture
def booleans(lab):
    return lab.booleans


@pytest.fixture
def zeno(lab):
    return lab.zeno


@pytest.fixture
def lightcone(lab):
    return lab.lightcone


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
