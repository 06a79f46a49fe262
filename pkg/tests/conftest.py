"""Pytest configuration and shared fixtures."""

import math
from pathlib import Path

import numpy as np
import pytest

from arcutoff.adapters.secondary.persistence.in_memory_adapter import InMemoryResultSink
from arcutoff.domain.model import ModelParams, Network, SphereState
from arcutoff.domain.value_object import ScanPolicy
from arcutoff.infrastructure.config import ExperimentConfig, set_config

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

LN_1000 = math.log(1000.0)


# ============================================================================
# Reference Models
# ============================================================================

@pytest.fixture
def swap():
    """Two coordinates averaging each other."""
    return Network.swap()


@pytest.fixture
def d2_params():
    """e = 0.55, sigma = 1, standard Gaussian noise."""
    return ModelParams.uniform(2, 0.55, 1.0)


@pytest.fixture
def cycle():
    return ScanPolicy.cycle()


@pytest.fixture
def random_scan():
    return ScanPolicy.random()


@pytest.fixture
def complete3():
    return Network.complete(3)


@pytest.fixture
def d3_params():
    return ModelParams.uniform(3, 0.5, 1.0)


@pytest.fixture
def path3():
    return Network.path(3)


@pytest.fixture
def uniform2():
    return SphereState.uniform(2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ============================================================================
# Config and Adapter Fixtures
# ============================================================================

@pytest.fixture
def config_dir():
    return CONFIG_DIR


@pytest.fixture
def cycle_model():
    return ExperimentConfig.from_file(CONFIG_DIR / "d2_cycle.json").model


@pytest.fixture
def memory_sink():
    return InMemoryResultSink()


@pytest.fixture
def experiment(tmp_path):
    """Small experiment on the d=2 cyclic model."""
    config = ExperimentConfig.from_file(CONFIG_DIR / "d2_cycle.json")
    config.apply({"seed": 7, "replicas": 1000, "k_max": 12, "ln_n_list": [LN_1000],
                  "n_steps": 20_000, "burn_in": 200, "samples": 10_000})
    config.out_dir = str(tmp_path / "out")
    config.validate()
    return config


@pytest.fixture(autouse=True)
def reset_global_config():
    yield
    set_config(None)


# ============================================================================
# Pytest Configuration
# ============================================================================

def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line("markers", "unit: Fast tests of single services")
    config.addinivalue_line("markers", "integration: Cross-module oracles and the CLI")
    config.addinivalue_line("markers", "e2e: End-to-end command runs on reference configs")
    config.addinivalue_line("markers", "slow: Acceptance-scale runs")
