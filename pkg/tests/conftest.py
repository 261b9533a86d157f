import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def nig_sample(rng, alpha, beta, delta, mu, n):
    """Normal-inverse-Gaussian draw via a normal variance-mean mixture with
    inverse-Gaussian mixing."""
    gamma = np.sqrt(alpha**2 - beta**2)
    v = rng.wald(delta / gamma, delta**2, size=n)
    return mu + beta * v + np.sqrt(v) * rng.normal(size=n)
