"""Square Gray-mapped QAM, the downlink link model and link metrics.

Bit map
-------
A symbol of ``log2(M)`` bits splits into an in-phase half (leading bits)
and a quadrature half (trailing bits).  Each half is a Gray code word; its
binary value ``l`` selects the amplitude ``2 l - (sqrt(M) - 1)``.  Points are
scaled by ``1 / sqrt(2 (M - 1) / 3)`` to unit average energy.  For 64-QAM,
bits ``000000`` map to ``(-7 - 7j) / sqrt(42)`` and ``100100`` to
``(+7 + 7j) / sqrt(42)``.

Link convention
---------------
Symbols carry energy ``1/K`` per user, so ``y = sqrt(rho) H t + n`` has
per-user signal power ``rho / K`` for exact ZF with ``G = H P = beta I``.
Each receiver divides by the known scalar ``sqrt(rho / K) * beta`` and
makes hard nearest-point decisions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Sequence

import numpy as np

from .channel import ChannelSpec, Stream, complex_gaussian, correlated_channel, trial_rng
from .errors import InvalidArgumentError
from .linalg import gram
from .precoders import SchemeSpec, beta_asymptotic, beta_zf, precode
from .zone import zone_spec_for


QAM_ORDERS = (4, 16, 64)


def _gray(n):
    return n ^ (n >> 1)


def _gray_inverse(g):
    g = np.asarray(g).copy()
    shift = g >> 1
    while np.any(shift):
        g ^= shift
        shift >>= 1
    return g


@dataclass(frozen=True)
class ConstellationSpec:
    order: int = 64

    def __post_init__(self):
        if self.order not in QAM_ORDERS:
            raise InvalidArgumentError(f"QAM order must be one of {QAM_ORDERS}, got {self.order}")

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(self.order))

    @property
    def side(self) -> int:
        """Real amplitude levels per axis, ``|Q|``."""
        return math.isqrt(self.order)

    @property
    def scale(self) -> float:
        return 1.0 / math.sqrt(2.0 * (self.order - 1) / 3.0)

    def points(self) -> np.ndarray:
        """All points indexed by the integer value of their bit pattern."""
        half = self.bits_per_symbol // 2
        idx = np.arange(self.order)
        gi, gq = idx >> half, idx & (self.side - 1)
        li, lq = _gray_inverse(gi), _gray_inverse(gq)
        return self._amp(li) + 1j * self._amp(lq)

    def _amp(self, level):
        return (2 * np.asarray(level) - (self.side - 1)) * self.scale


def _bits_to_ints(bits: np.ndarray, width: int) -> np.ndarray:
    weights = 1 << np.arange(width - 1, -1, -1)
    return bits.reshape(-1, width) @ weights


def _ints_to_bits(vals: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1)
    return ((vals[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def qam_modulate(bits, spec: ConstellationSpec) -> np.ndarray:
    """Map a flat 0/1 array to unit-energy Gray-coded QAM symbols."""
    bits = np.asarray(bits, dtype=np.int64).ravel()
    b = spec.bits_per_symbol
    if bits.size % b:
        raise InvalidArgumentError(f"bit count {bits.size} is not a multiple of {b}")
    if np.any((bits != 0) & (bits != 1)):
        raise InvalidArgumentError("bits must be 0 or 1")
    half = b // 2
    vals = _bits_to_ints(bits, b)
    gi, gq = vals >> half, vals & (spec.side - 1)
    return spec._amp(_gray_inverse(gi)) + 1j * spec._amp(_gray_inverse(gq))


def _axis_level(x: np.ndarray, spec: ConstellationSpec) -> np.ndarray:
    # nearest level index; a sample exactly between two levels goes to the lower one
    u = x / spec.scale + spec.side
    level = np.ceil(u / 2.0) - 1
    return np.clip(level, 0, spec.side - 1).astype(np.int64)


def qam_demodulate(y, spec: ConstellationSpec) -> np.ndarray:
    """Hard minimum-distance decisions, returned as a flat bit array.

    Square QAM decisions separate per axis, which is the same as a full
    nearest-point search.  Ties resolve to the lower amplitude level.
    """
    y = np.asarray(y, dtype=complex).ravel()
    half = spec.bits_per_symbol // 2
    gi = _gray(_axis_level(y.real, spec))
    gq = _gray(_axis_level(y.imag, spec))
    return _ints_to_bits((gi << half) | gq, spec.bits_per_symbol)


# --------------------------------------------------------------------------
# link metrics
# --------------------------------------------------------------------------

@dataclass
class LinkMetrics:
    sinr_per_user: np.ndarray
    sum_rate: float
    ber: float = 0.0
    bit_count: int = 0
    error_count: int = 0


def equivalent_channel(H, precoder) -> np.ndarray:
    """``G = H P`` with ``P`` either an ``N x K`` matrix or a callable ``s -> t``.

    A callable is applied to the K unit vectors to materialize ``P``; this is
    exact for linear precoders.
    """
    H = np.asarray(H, dtype=complex)
    if callable(precoder):
        K = H.shape[0]
        P = np.column_stack([np.asarray(precoder(e)) for e in np.eye(K, dtype=complex)])
    else:
        P = np.asarray(precoder, dtype=complex)
    return H @ P


def sinr(G, rho_f: float, K: int | None = None) -> np.ndarray:
    """Per-user SINR; interference at user ``k`` is row ``k`` of ``G`` off the diagonal."""
    G = np.asarray(G)
    K = G.shape[0] if K is None else K
    power = np.abs(G) ** 2
    signal = np.diag(power)
    interference = power.sum(axis=1) - signal
    a = rho_f / K
    return a * signal / (a * interference + 1.0)


def sum_rate(sinr_list: Sequence[float]) -> float:
    g = np.asarray(sinr_list, dtype=float)
    if np.any(g < 0):
        raise InvalidArgumentError("SINR values must be non-negative")
    return float(np.sum(np.log2(1.0 + g)))


def zf_rate_approx(N: int, K: int, rho_f: float) -> float:
    """``K log2(1 + rho (N/K - 1))``."""
    if N <= K:
        raise InvalidArgumentError(f"need N > K, got N={N}, K={K}")
    return K * math.log2(1.0 + rho_f * (N / K - 1.0))


def noise_rng(noise_seed) -> np.random.Generator:
    if isinstance(noise_seed, np.random.Generator):
        return noise_seed
    if isinstance(noise_seed, (tuple, list)):
        seed, trial_index = noise_seed
        return trial_rng(seed, trial_index, Stream.NOISE)
    return trial_rng(int(noise_seed), 0, Stream.NOISE)


def transmit(H, t, rho_f: float, noise_seed) -> np.ndarray:
    """``y = sqrt(rho_f) H t + n`` with ``n`` i.i.d. CN(0, 1).

    ``noise_seed`` is an int, a ``(seed, trial_index)`` pair (the trial's
    noise stream), or a ``numpy.random.Generator``.
    """
    H = np.asarray(H, dtype=complex)
    t = np.asarray(t, dtype=complex)
    shape = (H.shape[0],) + t.shape[1:]
    n = complex_gaussian(noise_rng(noise_seed), shape)
    return math.sqrt(rho_f) * (H @ t) + n


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class LinkConfig:
    """Everything a BER trial needs apart from the seed.

    ``symbols_per_trial`` symbol vectors share one channel realization.
    """

    n_bs: int
    n_users: int
    snr_db: float
    scheme: SchemeSpec = field(default_factory=lambda: SchemeSpec("zf"))
    qam_order: int = 64
    correlation: float = 0.0
    symbols_per_trial: int = 1
    beta_mode: str = "exact"


def ber_trial(cfg: LinkConfig, seed: int, trial_index: int = 0) -> tuple[int, int]:
    """Run one channel realization end to end and count bit errors.

    The channel, bit and noise streams depend only on ``(seed,
    trial_index)``, so different schemes evaluated with the same seed see
    identical channels, data and noise.
    """
    K, N = cfg.n_users, cfg.n_bs
    const = ConstellationSpec(cfg.qam_order)
    H = correlated_channel(ChannelSpec(N, K, cfg.correlation, seed, trial_index))
    G = gram(H)
    T = cfg.symbols_per_trial
    nbits = K * T * const.bits_per_symbol
    bits = trial_rng(seed, trial_index, Stream.BITS).integers(0, 2, nbits, dtype=np.int64)
    # row k of `unit` holds user k's T symbols
    unit = qam_modulate(bits, const).reshape(K, T)
    s = unit / math.sqrt(K)
    beta = beta_asymptotic(N, K) if cfg.beta_mode == "asymptotic" else beta_zf(G)
    zspec = None
    if cfg.scheme.init == "zone":
        zspec = zone_spec_for(N, cfg.qam_order, cfg.scheme.zones, symbol_scale=1.0 / math.sqrt(K))
    out = precode(cfg.scheme, H, G, s, zone_spec=zspec, beta=beta)
    # G = H P is close to gain * I: beta for ZF-like schemes, beta_MF * N for MF
    gain = out.beta * float(np.mean(G.D)) if cfg.scheme.name == "mf" else out.beta
    rho = db_to_linear(cfg.snr_db)
    y = transmit(H, out.t, rho, (seed, trial_index))
    r = y / (math.sqrt(rho / K) * gain)
    decided = qam_demodulate(r.ravel(), const)
    errors = int(np.count_nonzero(decided != bits.astype(np.uint8)))
    return errors, nbits
