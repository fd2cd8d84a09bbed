"""Experiment runner producing :class:`MetricRecord` rows and CSV.

Every trial draws its channel, bits and noise from streams keyed by
``(seed, trial_index)``, and per-trial results are reduced in trial order,
so output does not depend on ``workers``.  All schemes in one run share
the same channels, data and noise.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import astuple, dataclass, fields
import io
import logging
import math
from typing import Callable, Sequence

import numpy as np

from .bounds import gs_frobenius_norm, lemma5_bound
from .channel import ChannelSpec, correlated_channel
from .config import SimConfig
from .errors import ConfigError
from .linalg import gram
from .modem import LinkConfig, ber_trial, db_to_linear, sinr, sum_rate
from .precoders import (
    SchemeSpec, beta_asymptotic, beta_zf, neumann_mult_count, precode, precoding_matrix,
    zf_mult_count,
)
from .zone import zone_spec_for

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MetricRecord:
    experiment: str
    scheme: str
    iters: int
    init: str
    N: int
    K: int
    xi: float
    snr_db: float | None
    metric_name: str
    value: float
    trials: int
    seed: int


CSV_HEADER = tuple(f.name for f in fields(MetricRecord))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def to_csv(records: Sequence[MetricRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([_fmt(v) for v in astuple(r)])
    return buf.getvalue()


def write_csv(records: Sequence[MetricRecord], path: str) -> None:
    """Write ``records`` to ``path``; raises ``OSError`` if it cannot be written."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(to_csv(records))


def _map_trials(fn: Callable[[int], object], indices: Sequence[int], workers: int) -> list:
    """``[fn(i) for i in indices]``, optionally on a thread pool, in index order."""
    if workers <= 1 or len(indices) <= 1:
        return [fn(i) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, indices))


def _record(cfg: SimConfig, scheme: SchemeSpec | None, N: int, K: int, snr_db, metric: str,
            value: float, trials: int) -> MetricRecord:
    value = float(value)
    if not math.isfinite(value):
        raise FloatingPointError(f"non-finite {metric} for {scheme} at N={N}, K={K}")
    if scheme is None:
        name, iters, init = "-", 0, "-"
    else:
        name, iters, init = scheme.name, scheme.iters, scheme.init if scheme.iterative else "-"
    return MetricRecord(cfg.experiment, name, iters, init, N, K, float(cfg.xi),
                        None if snr_db is None else float(snr_db), metric, value, trials, cfg.seed)


def _channel(cfg: SimConfig, N: int, K: int, trial: int):
    H = correlated_channel(ChannelSpec(N, K, cfg.xi, cfg.seed, trial))
    return H, gram(H)


def _beta(cfg: SimConfig, G, N: int, K: int) -> float:
    return beta_asymptotic(N, K) if cfg.beta_mode == "asymptotic" else beta_zf(G)


# --------------------------------------------------------------------------
# experiments
# --------------------------------------------------------------------------

def capacity_vs_snr(cfg: SimConfig) -> list[MetricRecord]:
    """Mean sum rate from the equivalent channel ``H P`` of each scheme."""
    N, K = cfg.n_bs, cfg.n_users
    rhos = [db_to_linear(v) for v in cfg.snr_db_grid]

    def trial(t: int) -> np.ndarray:
        H, G = _channel(cfg, N, K, t)
        beta = _beta(cfg, G, N, K)
        rates = np.empty((len(cfg.schemes), len(rhos)))
        for i, sch in enumerate(cfg.schemes):
            Geq = H @ precoding_matrix(sch, H, G, beta=beta)
            for j, rho in enumerate(rhos):
                rates[i, j] = sum_rate(sinr(Geq, rho, K))
        return rates

    per_trial = _map_trials(trial, range(cfg.trials), cfg.workers)
    out = []
    for i, sch in enumerate(cfg.schemes):
        for j, snr in enumerate(cfg.snr_db_grid):
            v = math.fsum(r[i, j] for r in per_trial) / cfg.trials
            out.append(_record(cfg, sch, N, K, snr, "sum_rate", v, cfg.trials))
    return out


def ber_point(cfg: SimConfig, scheme: SchemeSpec, snr_db: float) -> tuple[int, int, int]:
    """Adaptive BER estimate at one SNR; returns ``(errors, bits, trials)``.

    Trials run in fixed batches, and the stopping test only looks at batch
    totals, so the set of trials used is independent of ``workers``.
    """
    link = LinkConfig(cfg.n_bs, cfg.n_users, snr_db, scheme, cfg.qam_order, cfg.xi,
                      cfg.symbols_per_trial, cfg.beta_mode)
    errors = bits = done = 0
    while done < cfg.trials:
        batch = range(done, min(done + cfg.batch_size, cfg.trials))
        for e, b in _map_trials(lambda t: ber_trial(link, cfg.seed, t), batch, cfg.workers):
            errors += e
            bits += b
        done = batch.stop
        if errors >= cfg.min_errors > 0:
            break
    return errors, bits, done


def ber_vs_snr(cfg: SimConfig) -> list[MetricRecord]:
    out = []
    N, K = cfg.n_bs, cfg.n_users
    for sch in cfg.schemes:
        for snr in cfg.snr_db_grid:
            errors, bits, used = ber_point(cfg, sch, snr)
            log.info("%s snr=%g: %d errors / %d bits over %d trials", sch.label, snr, errors, bits, used)
            out.append(_record(cfg, sch, N, K, snr, "ber", errors / bits, used))
            out.append(_record(cfg, sch, N, K, snr, "bit_errors", errors, used))
            out.append(_record(cfg, sch, N, K, snr, "bits", bits, used))
    return out


def power_vs_n(cfg: SimConfig) -> list[MetricRecord]:
    """Mean total transmit power ``tr(P^H P)`` with ``beta = beta_ZF`` for every scheme."""
    K = cfg.n_users
    out = []
    for N in cfg.n_bs_grid:
        def trial(t: int) -> list[float]:
            H, G = _channel(cfg, N, K, t)
            beta = _beta(cfg, G, N, K)
            res = []
            for sch in cfg.schemes:
                P = precoding_matrix(sch, H, G, beta=beta)
                res.append(float(np.real(np.vdot(P, P))))
            return res

        per_trial = _map_trials(trial, range(cfg.trials), cfg.workers)
        for i, sch in enumerate(cfg.schemes):
            v = math.fsum(r[i] for r in per_trial) / cfg.trials
            out.append(_record(cfg, sch, N, K, None, "transmit_power", v, cfg.trials))
    return out


def _alpha_sizes(cfg: SimConfig):
    K = cfg.n_users
    for alpha in cfg.alpha_grid:
        N = alpha * K
        if abs(N - round(N)) > 1e-9:
            raise ConfigError(f"alpha {alpha} times n_users {K} is not an integer", field="alpha_grid")
        yield alpha, int(round(N)), K


def frobenius_vs_alpha(cfg: SimConfig) -> list[MetricRecord]:
    """Mean ``||B_GS||_F`` against its large-system bound for each ``alpha``."""
    gs = SchemeSpec("gs", 1)
    out = []
    for alpha, N, K in _alpha_sizes(cfg):
        norms = _map_trials(lambda t: gs_frobenius_norm(_channel(cfg, N, K, t)[1]),
                            range(cfg.trials), cfg.workers)
        out.append(_record(cfg, gs, N, K, None, "frobenius_mean", math.fsum(norms) / cfg.trials,
                           cfg.trials))
        out.append(_record(cfg, gs, N, K, None, "frobenius_bound", lemma5_bound(N, K), cfg.trials))
    return out


def beta_vs_alpha(cfg: SimConfig) -> list[MetricRecord]:
    """Mean exact ZF factor against its large-system limit for each ``alpha``."""
    zf = SchemeSpec("zf")
    out = []
    for alpha, N, K in _alpha_sizes(cfg):
        betas = _map_trials(lambda t: beta_zf(_channel(cfg, N, K, t)[1]),
                            range(cfg.trials), cfg.workers)
        out.append(_record(cfg, zf, N, K, None, "beta_mean", math.fsum(betas) / cfg.trials, cfg.trials))
        out.append(_record(cfg, zf, N, K, None, "beta_asymptotic", beta_asymptotic(N, K), cfg.trials))
    return out


def mult_count_vs_k(cfg: SimConfig) -> list[MetricRecord]:
    """Complex multiplications per symbol vector.

    GS and MF are counted at run time on one seeded instance; ZF and
    Neumann use the explicit-inverse cost models in :mod:`.precoders`.
    """
    N = cfg.n_bs
    out = []
    for K in cfg.n_users_grid:
        H, G = _channel(cfg, N, K, 0)
        rng = np.random.default_rng(cfg.seed)
        s = (rng.standard_normal(K) + 1j * rng.standard_normal(K)) / math.sqrt(2 * K)
        for sch in cfg.schemes:
            if sch.name == "zf":
                count = zf_mult_count(N, K)
            elif sch.name == "neumann":
                count = neumann_mult_count(N, K, sch.iters)
            else:
                zspec = zone_spec_for(N, cfg.qam_order, sch.zones, 1 / math.sqrt(K)) \
                    if sch.init == "zone" else None
                count = precode(sch, H, G, s, zone_spec=zspec, beta=1.0).mults
            out.append(_record(cfg, sch, N, K, None, "complex_mults", count, 1))
    return out


RUNNERS = {
    "capacity_vs_snr": capacity_vs_snr,
    "ber_vs_snr": ber_vs_snr,
    "power_vs_n": power_vs_n,
    "frobenius_vs_alpha": frobenius_vs_alpha,
    "beta_vs_alpha": beta_vs_alpha,
    "mult_count_vs_k": mult_count_vs_k,
}


def run(cfg: SimConfig, output_path: str | None = None) -> list[MetricRecord]:
    """Run the experiment and, if a path is given (argument or config), write CSV."""
    cfg.validate()
    records = RUNNERS[cfg.experiment](cfg)
    path = output_path or cfg.output_path
    if path:
        write_csv(records, path)
    return records
