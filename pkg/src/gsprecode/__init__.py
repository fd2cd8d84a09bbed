"""Gauss-Seidel precoding for massive MIMO downlinks, with ZF, MF and
Neumann-series baselines, a seeded link simulator and an experiment CLI."""

from .channel import ChannelSpec, Stream, correlated_channel, correlation_root, rayleigh_channel, trial_rng
from .counting import MultCounter
from .errors import (
    ConfigError, InvalidArgumentError, NotPositiveDefiniteError, PreconditionError,
    SingularTriangularError,
)
from .linalg import (
    GramDecomposition, cholesky_inverse, cholesky_solve, forward_substitute, frobenius, gram,
    spectral_radius_est,
)
from .modem import (
    ConstellationSpec, LinkConfig, ber_trial, equivalent_channel, qam_demodulate, qam_modulate,
    sinr, sum_rate, transmit, zf_rate_approx,
)
from .precoders import (
    IterationKind, PrecoderOutput, SchemeSpec, beta_asymptotic, beta_mf, beta_zf, gs_inverse_estimate,
    gs_precode, gs_solve, iteration_matrix, mf_precode, mult_count_formula, neumann_precode,
    neumann_solve, precode, precoding_matrix, zf_precode,
)
from .zone import RealExpansion, ZoneSpec, corollary1_check, realify, zone_boundaries, zone_initial, zone_spec_for

__version__ = "0.1.0"
