"""Shared helpers for the test suite."""

import numpy as np
import pytest

from jacobi_scatter import Potential


def random_potential(seed, dim=2, lo=-3, hi=3, scale=1.0):
    """Hermitian random potential with real and imaginary parts in scale * [-1, 1].

    Draws an arbitrary complex matrix per site and symmetrizes it, so every
    entry stays inside the stated box and the result is exactly Hermitian.
    """
    rng = np.random.default_rng(seed)
    mats = []
    for _ in range(lo, hi + 1):
        a = rng.uniform(-1.0, 1.0, (dim, dim)) + 1j * rng.uniform(-1.0, 1.0, (dim, dim))
        mats.append(0.5 * scale * (a + a.conj().T))
    return Potential(dim, tuple(range(lo, hi + 1)), np.array(mats))


@pytest.fixture
def free_pot():
    """The zero potential with 2x2 blocks."""
    return Potential.zero(2)


@pytest.fixture
def two_site_pot():
    """A small fixed L=2 potential used where any nonzero input will do."""
    v0 = np.array([[0.5, 0.2 - 0.1j], [0.2 + 0.1j, -0.3]])
    v1 = np.array([[-0.4, 0.0], [0.0, 0.6]])
    return Potential(2, (0, 1), np.array([v0, v1]))
