import numpy as np
import pytest

from spheregas import ChargeConfig, build_map


@pytest.fixture(scope="session")
def cfg421():
    return ChargeConfig(Q0=4.0, Q1=2.0, w=1.0)


@pytest.fixture(scope="session")
def map421(cfg421):
    return build_map(cfg421)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
