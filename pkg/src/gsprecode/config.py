"""Flat ``key = value`` experiment configuration.

Lines are ``key = value``; ``#`` starts a comment; list values are
comma-separated.  Schemes are written ``name[:iters[:init[:zones]]]``, e.g.
``zf, neumann:3, gs:2, gs:3:zone:4``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
import math
from typing import Any, Callable, Mapping

from .errors import ConfigError, InvalidArgumentError
from .modem import QAM_ORDERS
from .precoders import SchemeSpec

EXPERIMENTS = (
    "capacity_vs_snr", "ber_vs_snr", "power_vs_n",
    "frobenius_vs_alpha", "beta_vs_alpha", "mult_count_vs_k",
)

# keys each experiment cannot run without
REQUIRED = {
    "capacity_vs_snr": ("n_bs", "n_users", "snr_db_grid", "schemes"),
    "ber_vs_snr": ("n_bs", "n_users", "snr_db_grid", "schemes"),
    "power_vs_n": ("n_bs_grid", "n_users", "schemes"),
    "frobenius_vs_alpha": ("n_users", "alpha_grid"),
    "beta_vs_alpha": ("n_users", "alpha_grid"),
    "mult_count_vs_k": ("n_bs", "n_users_grid", "schemes"),
}


@dataclass(frozen=True)
class SimConfig:
    """One experiment.

    Attributes beyond the core sweep description:

    n_bs_grid, n_users_grid, alpha_grid
        Sweep axes for the power, complexity and norm experiments.
    symbols_per_trial
        Symbol vectors sent over each channel realization in BER runs.
    min_errors, batch_size
        BER runs process trials in fixed batches of ``batch_size`` and stop
        after the first batch that brings the error count to ``min_errors``,
        or at ``trials``.
    workers
        Threads used to evaluate trials; results do not depend on it.
    beta_mode
        ``exact`` (per-channel ZF factor) or ``asymptotic``.
    """

    experiment: str
    n_bs: int | None = None
    n_users: int | None = None
    snr_db_grid: tuple = ()
    schemes: tuple = ()
    qam_order: int = 64
    xi: float = 0.0
    trials: int = 200
    seed: int = 0
    output_path: str | None = None
    n_bs_grid: tuple = ()
    n_users_grid: tuple = ()
    alpha_grid: tuple = ()
    symbols_per_trial: int = 50
    min_errors: int = 100
    batch_size: int = 20
    workers: int = 1
    beta_mode: str = "exact"
    division_free: bool = False

    def validate(self) -> "SimConfig":
        """Raise :class:`ConfigError` naming the first offending field."""
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}",
                              field="experiment")
        for key in REQUIRED[self.experiment]:
            value = getattr(self, key)
            if value is None or (isinstance(value, tuple) and not value):
                raise ConfigError(f"missing required key for {self.experiment}", field=key)
        for key in ("n_bs", "n_users"):
            v = getattr(self, key)
            if v is not None and v < 1:
                raise ConfigError(f"must be >= 1, got {v}", field=key)
        for key in ("n_bs_grid", "n_users_grid"):
            if any(v < 1 for v in getattr(self, key)):
                raise ConfigError("entries must be >= 1", field=key)
        if any(not a >= 1 for a in self.alpha_grid):
            raise ConfigError("entries must be >= 1", field="alpha_grid")
        if any(not math.isfinite(v) for v in self.snr_db_grid):
            raise ConfigError("entries must be finite", field="snr_db_grid")
        if self.n_bs is not None and self.n_users is not None and self.n_bs < self.n_users:
            raise ConfigError(f"n_bs ({self.n_bs}) must be >= n_users ({self.n_users})", field="n_bs")
        if self.qam_order not in QAM_ORDERS:
            raise ConfigError(f"must be one of {QAM_ORDERS}", field="qam_order")
        if not 0.0 <= self.xi < 1.0:
            raise ConfigError(f"must lie in [0, 1), got {self.xi}", field="xi")
        for key in ("trials", "symbols_per_trial", "batch_size", "workers"):
            if getattr(self, key) < 1:
                raise ConfigError(f"must be >= 1, got {getattr(self, key)}", field=key)
        if self.min_errors < 0:
            raise ConfigError("must be >= 0", field="min_errors")
        if self.beta_mode not in ("exact", "asymptotic"):
            raise ConfigError("must be 'exact' or 'asymptotic'", field="beta_mode")
        if self.experiment in ("capacity_vs_snr", "power_vs_n"):
            if any(s.init == "zone" for s in self.schemes):
                raise ConfigError("zone-initialized GS is not a linear map; use ber_vs_snr",
                                  field="schemes")
        return self


# --------------------------------------------------------------------------
# value parsers
# --------------------------------------------------------------------------

def _int(text: str) -> int:
    return int(text.strip())


def _float(text: str) -> float:
    v = float(text.strip())
    if not math.isfinite(v):
        raise ValueError(f"non-finite value {text!r}")
    return v


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _str(text: str) -> str:
    t = text.strip()
    if not t:
        raise ValueError("empty value")
    return t


def _list(item: Callable[[str], Any]) -> Callable[[str], tuple]:
    def parse(text: str) -> tuple:
        parts = [p for p in (q.strip() for q in text.split(",")) if p]
        if not parts:
            raise ValueError("empty list")
        return tuple(item(p) for p in parts)
    return parse


def _scheme(text: str) -> SchemeSpec:
    try:
        return SchemeSpec.parse(text)
    except InvalidArgumentError as exc:
        raise ValueError(str(exc)) from exc


PARSERS: dict[str, Callable[[str], Any]] = {
    "experiment": _str,
    "n_bs": _int,
    "n_users": _int,
    "snr_db_grid": _list(_float),
    "schemes": _list(_scheme),
    "qam_order": _int,
    "xi": _float,
    "trials": _int,
    "seed": _int,
    "output_path": _str,
    "n_bs_grid": _list(_int),
    "n_users_grid": _list(_int),
    "alpha_grid": _list(_float),
    "symbols_per_trial": _int,
    "min_errors": _int,
    "batch_size": _int,
    "workers": _int,
    "beta_mode": _str,
    "division_free": _bool,
}
assert set(PARSERS) == {f.name for f in fields(SimConfig)}


def _parse_value(key: str, raw: str, line: int | None) -> Any:
    if key not in PARSERS:
        raise ConfigError(f"unknown key {key!r}", field=key, line=line)
    try:
        return PARSERS[key](raw)
    except ValueError as exc:
        raise ConfigError(f"malformed value {raw.strip()!r}: {exc}", field=key, line=line) from exc


def parse_text(text: str) -> dict[str, tuple[Any, int]]:
    """Parse config text into ``{key: (value, line_number)}`` without validating."""
    out: dict[str, tuple[Any, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        if key in out:
            raise ConfigError("duplicate key", field=key, line=lineno)
        out[key] = (_parse_value(key, value, lineno), lineno)
    return out


def parse_overrides(items) -> dict[str, Any]:
    """Parse ``key=value`` strings from the command line."""
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, value = (p.strip() for p in item.split("=", 1))
        out[key] = _parse_value(key, value, None)
    return out


def build_config(values: Mapping[str, Any], lines: Mapping[str, int] | None = None) -> SimConfig:
    """Assemble and validate a :class:`SimConfig`, attaching line numbers to errors."""
    lines = lines or {}
    if "experiment" not in values:
        raise ConfigError("missing required key", field="experiment")
    cfg = SimConfig(**values)
    if cfg.division_free:
        cfg = replace(cfg, schemes=tuple(replace(s, division_free=True) if s.name == "gs" else s
                                         for s in cfg.schemes))
    try:
        return cfg.validate()
    except ConfigError as exc:
        if exc.line is None and exc.field in lines:
            raise ConfigError(exc.message, field=exc.field, line=lines[exc.field]) from None
        raise


def parse_config(text: str, overrides: Mapping[str, Any] | None = None,
                 base: Mapping[str, Any] | None = None) -> SimConfig:
    """Parse and validate a config.

    Precedence, lowest first: ``base`` (a preset), the file ``text``, then
    ``overrides`` (already-parsed ``--set`` values).
    """
    parsed = parse_text(text)
    values: dict[str, Any] = dict(base or {})
    values.update({k: v for k, (v, _) in parsed.items()})
    values.update(overrides or {})
    lines = {k: ln for k, (_, ln) in parsed.items() if k not in (overrides or {})}
    return build_config(values, lines)


def config_values(cfg: SimConfig) -> dict[str, Any]:
    return {f.name: getattr(cfg, f.name) for f in fields(cfg)}
