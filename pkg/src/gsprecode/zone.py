"""Zone-based initial solution for the Gauss-Seidel precoder.

In the massive-antenna regime ``W ~ N I``, so the real-valued solution
``W_R^{-1} s_R`` keeps the sign of ``s_R`` and sits near ``s_R / N``.  The
initial guess therefore takes each real component's sign from ``s_R`` and
its magnitude from the centre of one of ``Z/2`` amplitude zones, the zone
being picked by the sign of ``g = s_R - W_R (z, ..., z)^T`` for each
boundary ``z``.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .counting import MultCounter
from .errors import InvalidArgumentError


@dataclass(frozen=True)
class RealExpansion:
    W_R: np.ndarray
    s_R: np.ndarray

    @property
    def K(self) -> int:
        return self.W_R.shape[0] // 2


@dataclass(frozen=True)
class ZoneSpec:
    """Zone layout.

    Attributes
    ----------
    zones : int
        Number of zones ``Z`` across the full real axis; must be even.
    levels : int
        Number of real amplitude levels ``|Q|`` of the constellation
        (8 for 64-QAM).
    gamma : float
        Normalization mapping integer levels ``{±1, ±3, ...}`` to solution
        units, ``N * sqrt(42)`` for unit-energy 64-QAM.
    """

    zones: int
    levels: int
    gamma: float

    def __post_init__(self):
        if self.zones < 2 or self.zones % 2:
            raise InvalidArgumentError(f"zones must be an even count >= 2, got {self.zones}")
        if self.levels < 2 or self.levels & (self.levels - 1):
            raise InvalidArgumentError(f"levels must be a power of two >= 2, got {self.levels}")
        if not self.gamma > 0:
            raise InvalidArgumentError(f"gamma must be positive, got {self.gamma}")

    @property
    def width(self) -> float:
        return 2.0 * self.levels / (self.gamma * self.zones)


def default_zones(qam_order: int) -> int:
    return 4 if qam_order >= 64 else 2


def zone_spec_for(n_bs: int, qam_order: int, zones: int | None = None,
                  symbol_scale: float = 1.0) -> ZoneSpec:
    """Zone layout for square QAM symbols of energy ``symbol_scale**2``.

    ``symbol_scale`` is the factor applied to unit-energy symbols before
    precoding (``1/sqrt(K)`` in the link simulation), so ``gamma`` tracks the
    actual amplitude of ``s``.
    """
    levels = math.isqrt(qam_order)
    if levels * levels != qam_order:
        raise InvalidArgumentError(f"qam_order must be a square, got {qam_order}")
    if zones is None:
        zones = default_zones(qam_order)
    gamma = n_bs * math.sqrt(2.0 * (qam_order - 1) / 3.0) / symbol_scale
    return ZoneSpec(zones=zones, levels=levels, gamma=gamma)


def realify(W, s) -> RealExpansion:
    """Real-valued equivalent ``W_R x_R = s_R`` of the complex system ``W x = s``."""
    W = np.asarray(W, dtype=complex)
    s = np.asarray(s, dtype=complex)
    W_R = np.block([[W.real, -W.imag], [W.imag, W.real]])
    s_R = np.concatenate([s.real, s.imag], axis=0)
    return RealExpansion(W_R=W_R, s_R=s_R)


def zone_boundaries(spec: ZoneSpec) -> np.ndarray:
    """Positive-side boundaries ``2 n |Q| / (gamma Z)`` for ``n = 1 .. Z/2 - 1``."""
    if spec.zones % 2:
        raise InvalidArgumentError(f"zones must be even, got {spec.zones}")
    n = np.arange(1, spec.zones // 2)
    return n * spec.width


def zone_initial(exp: RealExpansion, spec: ZoneSpec,
                 counter: MultCounter | None = None) -> np.ndarray:
    """Complex initial solution from the zone test.

    Rows of ``W_R`` are summed once, then scaled by each boundary, which
    costs ``(Z - 2) K`` real multiplications per symbol vector.  A component
    landing exactly on a boundary (``g == 0``) goes to the inner zone.
    """
    W_R, s_R = exp.W_R, exp.s_R
    K = exp.K
    z = zone_boundaries(spec)
    row_sums = W_R.sum(axis=1)
    # (n_boundaries, 2K): W_R @ (z, ..., z)^T for every boundary
    shifted = z[:, None] * row_sums[None, :]
    if counter is not None:
        ncols = 1 if s_R.ndim == 1 else s_R.shape[1]
        counter.add_real(shifted.size * ncols)
    if s_R.ndim == 2:
        shifted = shifted[:, :, None]
    above = np.sum(s_R[None, ...] - shifted > 0, axis=0)
    below = np.sum(s_R[None, ...] + shifted < 0, axis=0)
    centre_pos = (2 * above + 1) * spec.width / 2
    centre_neg = -(2 * below + 1) * spec.width / 2
    init_R = np.where(s_R > 0, centre_pos, np.where(s_R < 0, centre_neg, 0.0))
    return init_R[:K] + 1j * init_R[K:]


def corollary1_check(exp: RealExpansion) -> float:
    """Fraction of components where the exact solution keeps the sign of ``s_R``.

    Components with ``s_R == 0`` are excluded; returns 1.0 when none remain.
    """
    x = np.linalg.solve(exp.W_R, exp.s_R)
    mask = exp.s_R != 0
    if not np.any(mask):
        return 1.0
    return float(np.mean((x * exp.s_R)[mask] > 0))
