"""Named experiment presets, one per reproduced figure."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .precoders import SchemeSpec


def _schemes(*labels: str) -> tuple:
    return tuple(SchemeSpec.parse(s) for s in labels)


_ITERATIVE_CMP = _schemes("zf", "neumann:2", "neumann:3", "neumann:4", "gs:2", "gs:3", "gs:4")
_CAPACITY_SNR = tuple(float(v) for v in range(0, 31, 5))
_BER_SNR = tuple(float(v) for v in range(0, 17, 2))


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    values: dict

    def config_values(self) -> dict[str, Any]:
        return dict(self.values)


_PRESETS = (
    Preset("fig2", "transmit power of GS and ZF against N, K = 16",
           dict(experiment="power_vs_n", n_users=16, n_bs_grid=(32, 64, 128, 256),
                schemes=_schemes("zf", "gs:2"))),
    Preset("fig3", "mean ||B_GS||_F against its bound, K = 16",
           dict(experiment="frobenius_vs_alpha", n_users=16, alpha_grid=(2.0, 4.0, 8.0, 16.0))),
    Preset("fig5", "exact ZF normalization against its large-system limit, K = 16",
           dict(experiment="beta_vs_alpha", n_users=16,
                alpha_grid=(1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0))),
    Preset("fig6", "multiplications per symbol vector against K, N = 256",
           dict(experiment="mult_count_vs_k", n_bs=256,
                n_users_grid=(8, 16, 24, 32, 40, 48, 56, 64),
                schemes=_schemes("zf", "neumann:2", "neumann:3", "neumann:4", "neumann:5",
                                 "gs:2:zone:4", "gs:3:zone:4", "gs:4:zone:4"))),
    Preset("fig7", "sum rate against SNR, 256 x 16",
           dict(experiment="capacity_vs_snr", n_bs=256, n_users=16,
                snr_db_grid=_CAPACITY_SNR, schemes=_ITERATIVE_CMP)),
    Preset("fig8", "sum rate against SNR, 256 x 32",
           dict(experiment="capacity_vs_snr", n_bs=256, n_users=32,
                snr_db_grid=_CAPACITY_SNR, schemes=_ITERATIVE_CMP)),
    Preset("fig9", "BER against SNR, 256 x 16, 64-QAM, zero initial solution",
           dict(experiment="ber_vs_snr", n_bs=256, n_users=16, snr_db_grid=_BER_SNR,
                schemes=_ITERATIVE_CMP)),
    Preset("fig10", "BER against SNR, 256 x 16, 64-QAM, zone initial solution",
           dict(experiment="ber_vs_snr", n_bs=256, n_users=16, snr_db_grid=_BER_SNR,
                schemes=_schemes("zf", "gs:1:zone:4", "gs:2:zone:4", "gs:3:zone:4"))),
    Preset("fig11", "BER against SNR, 256 x 16, correlated antennas xi = 0.2",
           dict(experiment="ber_vs_snr", n_bs=256, n_users=16, xi=0.2,
                snr_db_grid=_BER_SNR, schemes=_ITERATIVE_CMP)),
    Preset("fig12", "BER against SNR, 256 x 16, correlated antennas xi = 0.5",
           dict(experiment="ber_vs_snr", n_bs=256, n_users=16, xi=0.5,
                snr_db_grid=_BER_SNR, schemes=_ITERATIVE_CMP)),
)


def experiment_catalog() -> list[Preset]:
    return list(_PRESETS)


def get_preset(name: str) -> Preset:
    for p in _PRESETS:
        if p.name == name:
            return p
    raise KeyError(f"unknown preset {name!r}; available: {', '.join(p.name for p in _PRESETS)}")
