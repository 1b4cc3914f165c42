import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from semjd import SimConfig, TruncationRule, simulate_observations, truncation_stats
from semjd.presets import model_1, model_2, model_3
from semjd.simulate import reference_true_model


@pytest.fixture(scope="session")
def model1():
    return model_1()


@pytest.fixture(scope="session")
def model2():
    return model_2()


@pytest.fixture(scope="session")
def model3():
    return model_3()


@pytest.fixture(scope="session")
def true_model():
    return reference_true_model()


@pytest.fixture(scope="session")
def rule():
    return TruncationRule(d=10.0, rho=0.4)


@pytest.fixture(scope="session")
def path_5e4(true_model):
    """One reference path at the experiment's smaller sample size."""
    return simulate_observations(true_model, SimConfig(n=50_000, t_end=1.0, seed=424242))


@pytest.fixture(scope="session")
def stats_5e4(path_5e4, rule):
    return truncation_stats(path_5e4, rule)
