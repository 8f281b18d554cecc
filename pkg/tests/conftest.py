"""Shared fixtures: seeded corpus generators and the finite-difference oracle."""

import numpy as np
import pytest

from harmonia import (
    MassVector,
    PlanarConfiguration,
    corpus_seed,
    random_configuration,
    random_masses,
)


@pytest.fixture(scope="session")
def seed():
    return corpus_seed()


@pytest.fixture
def rng(seed):
    return np.random.default_rng(seed)


@pytest.fixture
def draw_system(rng):
    """Factory for a random (configuration, masses) pair with n in {2..6}."""

    def draw(n=None, min_separation=0.0):
        size = int(rng.integers(2, 7)) if n is None else n
        config = random_configuration(rng, size, box=10.0, min_separation=min_separation)
        masses = random_masses(rng, size)
        return config, masses

    return draw


def central_difference_gradient(f, q, h=1e-6):
    """Central finite differences of a scalar function of an (n, 2) array."""
    q = np.asarray(q, dtype=float)
    grad = np.zeros_like(q)
    for idx in np.ndindex(q.shape):
        plus = q.copy()
        plus[idx] += h
        minus = q.copy()
        minus[idx] -= h
        grad[idx] = (f(plus) - f(minus)) / (2.0 * h)
    return grad


def unit_masses(n):
    return MassVector(np.ones(n))


def equilateral(side=1.0):
    return PlanarConfiguration(
        np.array([[0.0, 0.0], [side, 0.0], [0.5 * side, side * np.sqrt(3.0) / 2.0]]))
