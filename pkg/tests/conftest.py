import numpy as np
import pytest

from smcm.core import EnvParams, TimescaleTable, transition_matrix, transition_rates

# Reference operating point used across the suite.
CAPE = 0.25
DRYNESS = 0.75
DT = 0.1


@pytest.fixture(scope="session")
def reference_rates():
    return transition_rates(EnvParams(CAPE, DRYNESS), TimescaleTable())


@pytest.fixture(scope="session")
def reference_matrix(reference_rates):
    return transition_matrix(reference_rates, DT)


def random_simplex(rng, zeros_ok: bool = True) -> np.ndarray:
    """Random fraction vector; occasionally with hard zeros to probe edges."""
    sigma = rng.dirichlet(np.ones(4))
    if zeros_ok and rng.random() < 0.2:
        knocked = sigma.copy()
        knocked[rng.integers(4)] = 0.0
        sigma = knocked / knocked.sum()
    return sigma


def random_column_stochastic(rng) -> np.ndarray:
    """Random column-stochastic matrix (columns drawn from a Dirichlet)."""
    return rng.dirichlet(np.ones(4), size=4).T


def random_rate_matrix(rng) -> np.ndarray:
    """Random rates with the model's sparsity pattern and random timescales."""
    taus = TimescaleTable(*rng.uniform(0.5, 10.0, size=7))
    env = EnvParams(rng.uniform(0.05, 3.0), rng.uniform(0.05, 3.0))
    return transition_rates(env, taus)
