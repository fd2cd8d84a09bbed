import numpy as np
import pytest

from gsprecode import ChannelSpec, correlated_channel, gram


def channel(N=256, K=16, seed=1, trial=0, xi=0.0):
    H = correlated_channel(ChannelSpec(N, K, xi, seed, trial))
    return H, gram(H)


def random_hpd(K, rng, cond_shift=1.0):
    A = rng.standard_normal((K, K)) + 1j * rng.standard_normal((K, K))
    return A @ A.conj().T + cond_shift * np.eye(K)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def massive():
    """Seeded 256 x 16 Rayleigh instance."""
    return channel()


@pytest.fixture
def toy():
    from gsprecode import GramDecomposition
    return GramDecomposition.from_matrix(np.array([[2, 1], [1, 2]], dtype=complex))
