"""Seeded downlink channel generation.

Every random quantity in a trial is drawn from its own Philox
(counter-based) stream keyed by ``(seed, trial_index, stream)``, so a
trial can be regenerated in isolation and in any order.

Complex Gaussians come from uniforms through the polar Box-Muller map

    h = sqrt(-ln(1 - u1)) * exp(2j*pi*u2),   u1, u2 ~ U[0, 1)

which yields CN(0, 1): ``|h|^2`` is unit-mean exponential and the phase is
uniform, so real and imaginary parts each have variance 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import InvalidArgumentError


class Stream(IntEnum):
    CHANNEL = 0
    BITS = 1
    NOISE = 2


def trial_rng(seed: int, trial_index: int, stream: int = Stream.CHANNEL) -> np.random.Generator:
    """Independent generator for one (seed, trial, purpose) triple."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(trial_index), int(stream)])
    return np.random.Generator(np.random.Philox(ss))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """CN(0, 1) samples via the polar Box-Muller map (see module docstring)."""
    u1 = rng.random(shape)
    u2 = rng.random(shape)
    return np.sqrt(-np.log1p(-u1)) * np.exp(2j * np.pi * u2)


@dataclass(frozen=True)
class ChannelSpec:
    n_bs: int
    n_users: int
    correlation: float = 0.0
    seed: int = 0
    trial_index: int = 0

    def __post_init__(self):
        if not (self.n_bs >= self.n_users >= 1):
            raise InvalidArgumentError(
                f"need n_bs >= n_users >= 1, got n_bs={self.n_bs}, n_users={self.n_users}")
        if not (0.0 <= self.correlation < 1.0):
            raise InvalidArgumentError(f"correlation must lie in [0, 1), got {self.correlation}")


def rayleigh_channel(spec: ChannelSpec) -> np.ndarray:
    """``K x N`` matrix of i.i.d. CN(0, 1) entries (correlation is ignored)."""
    rng = trial_rng(spec.seed, spec.trial_index, Stream.CHANNEL)
    return complex_gaussian(rng, (spec.n_users, spec.n_bs))


def correlation_root(n: int, xi: float) -> np.ndarray:
    """Lower Cholesky factor ``C`` of ``R[m, k] = xi**|m - k|``, so ``C C^H = R``."""
    if not (0.0 <= xi < 1.0):
        raise InvalidArgumentError(f"correlation must lie in [0, 1), got {xi}")
    if n < 1:
        raise InvalidArgumentError("n must be positive")
    if xi == 0.0:
        return np.eye(n, dtype=complex)
    idx = np.arange(n)
    R = xi ** np.abs(idx[:, None] - idx[None, :])
    return np.linalg.cholesky(R).astype(complex)


def correlated_channel(spec: ChannelSpec) -> np.ndarray:
    """Channel with exponential correlation across the BS antennas.

    Each user's row is ``h_iid @ C^H`` where ``C C^H = R``; the row
    covariance ``E[h^H h]`` is then ``R``, so adjacent antennas correlate by
    ``xi``.  Users stay mutually independent.  With ``xi == 0`` the result is
    exactly :func:`rayleigh_channel` for the same seed and trial.
    """
    H = rayleigh_channel(spec)
    if spec.correlation == 0.0:
        return H
    C = correlation_root(spec.n_bs, spec.correlation)
    return H @ C.conj().T
