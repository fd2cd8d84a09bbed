"""Linear precoders: exact ZF, matched filter, Neumann series and Gauss-Seidel.

Every precoder maps a symbol vector ``s`` (length K, or a ``K x T`` block of
symbol vectors) to a transmit vector ``t = beta * H^H s_hat`` where
``s_hat`` solves, exactly or approximately, ``W s_hat = s`` with
``W = H H^H``.

Multiplication counts cover the solve and precode stage only; forming
``W`` and the normalization factor are treated as one-off per channel.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from .counting import MultCounter
from .errors import InvalidArgumentError, SingularTriangularError
from .linalg import GramDecomposition, cholesky_inverse, cholesky_solve, forward_substitute
from .zone import ZoneSpec, realify, zone_initial


class IterationKind(Enum):
    GAUSS_SEIDEL = "gs"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class PrecoderOutput:
    t: np.ndarray
    s_hat: np.ndarray
    beta: float
    mults: int


def _ncols(s: np.ndarray) -> int:
    return 1 if s.ndim == 1 else s.shape[1]


def _check_dims(H, G: GramDecomposition, s) -> tuple[np.ndarray, np.ndarray]:
    H = np.asarray(H, dtype=complex)
    s = np.asarray(s, dtype=complex)
    if H.shape[0] != G.K or s.shape[0] != G.K:
        raise InvalidArgumentError(
            f"inconsistent dimensions: H {H.shape}, W {G.W.shape}, s {s.shape}")
    return H, s


# --------------------------------------------------------------------------
# normalization
# --------------------------------------------------------------------------

def beta_zf(G: GramDecomposition) -> float:
    """``sqrt(K / tr(W^{-1}))``, which makes ``tr(P_ZF^H P_ZF) = K``."""
    tr = float(np.real(np.trace(cholesky_inverse(G))))
    return math.sqrt(G.K / tr)


def beta_asymptotic(N: int, K: int) -> float:
    """Large-system limit ``sqrt(K (N/K - 1)) = sqrt(N - K)`` of the ZF factor."""
    if N < K or K < 1:
        raise InvalidArgumentError(f"need N >= K >= 1, got N={N}, K={K}")
    return math.sqrt(K * (N / K - 1.0))


def beta_mf(G: GramDecomposition) -> float:
    return math.sqrt(G.K / float(np.sum(G.D)))


def _precode(H: np.ndarray, s_hat: np.ndarray, beta: float, counter: MultCounter) -> np.ndarray:
    N, K = H.shape[1], H.shape[0]
    u = H.conj().T @ s_hat
    counter.add(N * K * _ncols(s_hat))
    t = beta * u
    counter.add(N * _ncols(s_hat))
    return t


# --------------------------------------------------------------------------
# exact and matched-filter precoding
# --------------------------------------------------------------------------

def zf_mult_count(N: int, K: int) -> int:
    """Cost model for ZF through an explicit Cholesky-based inverse.

    ``K^3/2 + 3K^2/2`` for the inverse, ``K^2`` to apply it, then
    ``NK + N`` for the precoding product and scaling.
    """
    return (K**3 + 3 * K**2) // 2 + K**2 + N * K + N


def zf_precode(H, G: GramDecomposition, s, beta: float | None = None) -> PrecoderOutput:
    H, s = _check_dims(H, G, s)
    s_hat = cholesky_solve(G, s)
    if beta is None:
        beta = beta_zf(G)
    t = beta * (H.conj().T @ s_hat)
    N, K = H.shape[1], H.shape[0]
    return PrecoderOutput(t=t, s_hat=s_hat, beta=beta, mults=zf_mult_count(N, K) * _ncols(s))


def mf_precode(H, G: GramDecomposition, s) -> PrecoderOutput:
    """Matched filter ``t = beta_MF H^H s`` with ``beta_MF = sqrt(K / tr(W))``."""
    H, s = _check_dims(H, G, s)
    counter = MultCounter()
    beta = beta_mf(G)
    t = _precode(H, s, beta, counter)
    return PrecoderOutput(t=t, s_hat=s.copy(), beta=beta, mults=counter.total)


# --------------------------------------------------------------------------
# Gauss-Seidel
# --------------------------------------------------------------------------

def gs_solve(G: GramDecomposition, s, init=None, iters: int = 1, *,
             diag_approx: float | None = None,
             counter: MultCounter | None = None) -> np.ndarray:
    """Gauss-Seidel sweeps for ``W x = s``.

    Each sweep updates components in natural order, overwriting the single
    working vector so component ``m`` sees the new values of ``k < m`` and
    the previous values of ``k > m``.  One sweep costs ``K^2``
    multiplications per right-hand side (``K`` per component, counting the
    scaling by ``1 / w_mm``).

    Parameters
    ----------
    G : GramDecomposition
    s : array, shape (K,) or (K, T)
    init : array or None
        Starting point; zero when omitted.
    iters : int
        Number of sweeps, at least one.
    diag_approx : float, optional
        Division-free mode.  Each ``1 / w_mm`` becomes ``1 / diag_approx``
        (normally the antenna count ``N``) applied to the residual form
        ``x_m += (s_m - w_m . x) / diag_approx``, which keeps the exact
        solution as the fixed point.  Costs ``K + 1`` per component.
    counter : MultCounter, optional
    """
    if iters < 1:
        raise InvalidArgumentError(f"iters must be >= 1, got {iters}")
    s = np.asarray(s, dtype=complex)
    K = G.K
    if s.shape[0] != K:
        raise InvalidArgumentError(f"s has {s.shape[0]} rows, expected {K}")
    x = np.zeros_like(s) if init is None else np.array(init, dtype=complex).reshape(s.shape)
    W = G.W
    ncols = _ncols(s)
    if diag_approx is None:
        if np.any(G.D == 0):  # pragma: no cover - excluded by GramDecomposition
            raise SingularTriangularError(int(np.argmax(G.D == 0)))
        inv_d = 1.0 / G.D
        for _ in range(iters):
            for m in range(K):
                lo, hi = W[m, :m], W[m, m + 1:]
                x[m] = (s[m] - lo @ x[:m] - hi @ x[m + 1:]) * inv_d[m]
                if counter is not None:
                    counter.add((lo.size + hi.size + 1) * ncols)
    else:
        scale = 1.0 / diag_approx
        for _ in range(iters):
            for m in range(K):
                x[m] = x[m] + (s[m] - W[m] @ x) * scale
                if counter is not None:
                    counter.add((W[m].size + 1) * ncols)
    return x


def _resolve_init(G, H, s, init, zone_spec, counter):
    if init is None or (isinstance(init, str) and init == "zero"):
        return None
    if isinstance(init, str) and init == "zone":
        if zone_spec is None:
            raise InvalidArgumentError("zone initialization needs a ZoneSpec")
        return zone_initial(realify(G.W, s), zone_spec, counter=counter)
    if isinstance(init, str):
        raise InvalidArgumentError(f"unknown init {init!r}")
    return np.asarray(init, dtype=complex)


def gs_precode(H, G: GramDecomposition, s, init=None, iters: int = 1,
               division_free: bool = False, *, zone_spec: ZoneSpec | None = None,
               beta: float | None = None) -> PrecoderOutput:
    """GS precoding ``t = beta * H^H x_iters`` with ``beta = beta_ZF`` by default.

    ``init`` is ``None``/``"zero"``, ``"zone"`` (requires ``zone_spec``) or
    an explicit starting vector.  ``mults`` is the runtime count of the
    initial solution, the sweeps, the ``H^H`` product and the scaling.
    """
    H, s = _check_dims(H, G, s)
    counter = MultCounter()
    x0 = _resolve_init(G, H, s, init, zone_spec, counter)
    s_hat = gs_solve(G, s, x0, iters,
                     diag_approx=float(H.shape[1]) if division_free else None,
                     counter=counter)
    if beta is None:
        beta = beta_zf(G)
    t = _precode(H, s_hat, beta, counter)
    return PrecoderOutput(t=t, s_hat=s_hat, beta=beta, mults=counter.total)


def mult_count_formula(N: int, K: int, iters: int, zones: int) -> int:
    """``N + NK + ceil((Z - 2) K / 4) + iters K^2`` complex multiplications."""
    if min(N, K, iters, zones) < 1 or zones % 2:
        raise InvalidArgumentError("N, K, iters must be >= 1 and zones a positive even count")
    return N + N * K + math.ceil((zones - 2) * K / 4) + iters * K * K


# --------------------------------------------------------------------------
# Neumann series
# --------------------------------------------------------------------------

def neumann_solve(G: GramDecomposition, s, iters: int,
                  counter: MultCounter | None = None) -> np.ndarray:
    """Truncated Neumann series ``sum_{n < iters} (-B_N)^n D^{-1} s``.

    Evaluated by the recurrence ``x <- D^{-1} s - B_N x`` started at
    ``D^{-1} s``, so ``iters`` is the number of series terms.
    """
    if iters < 1:
        raise InvalidArgumentError(f"iters must be >= 1, got {iters}")
    s = np.asarray(s, dtype=complex)
    K = G.K
    inv_d = 1.0 / G.D
    if s.ndim == 2:
        inv_d = inv_d[:, None]
    off = G.L + G.L.conj().T
    ncols = _ncols(s)
    base = inv_d * s
    if counter is not None:
        counter.add(K * ncols)
    x = base
    for _ in range(iters - 1):
        x = base - inv_d * (off @ x)
        if counter is not None:
            # off-diagonal product plus the diagonal scaling
            counter.add((K * (K - 1) + K) * ncols)
    return x


def neumann_precode(H, G: GramDecomposition, s, iters: int,
                    beta: float | None = None) -> PrecoderOutput:
    H, s = _check_dims(H, G, s)
    counter = MultCounter()
    s_hat = neumann_solve(G, s, iters, counter=counter)
    if beta is None:
        beta = beta_zf(G)
    t = _precode(H, s_hat, beta, counter)
    return PrecoderOutput(t=t, s_hat=s_hat, beta=beta, mults=counter.total)


def neumann_mult_count(N: int, K: int, iters: int) -> int:
    """Cost model for Neumann precoding with an explicit inverse estimate.

    The first term ``D^{-1}`` costs ``K``, the second ``D^{-1} E D^{-1}``
    costs ``K^2``, and every further term needs a Hermitian matrix product at
    ``K^3 / 2``.  Applying the estimate and precoding add ``K^2 + NK + N``.
    """
    if iters < 1:
        raise InvalidArgumentError(f"iters must be >= 1, got {iters}")
    cost = K
    if iters >= 2:
        cost += K * K
    cost += (iters - 2) * (K**3 // 2) if iters > 2 else 0
    return cost + K * K + N * K + N


# --------------------------------------------------------------------------
# iteration matrices and the inverse estimate
# --------------------------------------------------------------------------

def iteration_matrix(G: GramDecomposition, kind: IterationKind) -> np.ndarray:
    """``B_GS = -(D + L)^{-1} L^H`` or ``B_N = D^{-1} (L + L^H)``."""
    kind = IterationKind(kind)
    Lh = G.L.conj().T
    if kind is IterationKind.GAUSS_SEIDEL:
        return -forward_substitute(G.lower, Lh)
    return (G.L + Lh) / G.D[:, None]


def gs_inverse_estimate(G: GramDecomposition, iters: int) -> np.ndarray:
    """GS estimate of ``W^{-1}`` after ``iters`` steps from the zero matrix.

    Each step is ``X <- (D + L)^{-1} (I - L^H X)``.
    """
    if iters < 1:
        raise InvalidArgumentError(f"iters must be >= 1, got {iters}")
    K = G.K
    eye = np.eye(K, dtype=complex)
    Lh = G.L.conj().T
    X = np.zeros((K, K), dtype=complex)
    for _ in range(iters):
        X = forward_substitute(G.lower, eye - Lh @ X)
    return X


# --------------------------------------------------------------------------
# scheme dispatch
# --------------------------------------------------------------------------

SCHEMES = ("zf", "mf", "neumann", "gs")


@dataclass(frozen=True)
class SchemeSpec:
    """One precoder configuration, written ``name[:iters[:init[:zones]]]``.

    ``iters``, ``init`` and ``zones`` only matter for ``neumann``/``gs``.
    """

    name: str
    iters: int = 0
    init: str = "zero"
    zones: int = 4
    division_free: bool = False

    def __post_init__(self):
        if self.name not in SCHEMES:
            raise InvalidArgumentError(f"unknown scheme {self.name!r}; expected one of {SCHEMES}")
        if self.name in ("neumann", "gs") and self.iters < 1:
            raise InvalidArgumentError(f"{self.name} needs iters >= 1")
        if self.init not in ("zero", "zone"):
            raise InvalidArgumentError(f"init must be 'zero' or 'zone', got {self.init!r}")
        if self.init == "zone" and self.name != "gs":
            raise InvalidArgumentError("zone initialization applies to gs only")
        if self.zones < 2 or self.zones % 2:
            raise InvalidArgumentError(f"zones must be an even count >= 2, got {self.zones}")

    @property
    def iterative(self) -> bool:
        return self.name in ("neumann", "gs")

    @property
    def label(self) -> str:
        if not self.iterative:
            return self.name
        if self.name == "gs" and self.init == "zone":
            return f"gs:{self.iters}:zone:{self.zones}"
        return f"{self.name}:{self.iters}"

    @classmethod
    def parse(cls, text: str) -> "SchemeSpec":
        parts = [p.strip() for p in text.strip().split(":")]
        name = parts[0].lower()
        try:
            iters = int(parts[1]) if len(parts) > 1 else 0
            init = parts[2].lower() if len(parts) > 2 else "zero"
            zones = int(parts[3]) if len(parts) > 3 else 4
        except ValueError as exc:
            raise InvalidArgumentError(f"malformed scheme {text!r}") from exc
        if len(parts) > 4:
            raise InvalidArgumentError(f"malformed scheme {text!r}")
        if name in ("zf", "mf"):
            iters = 0
        return cls(name=name, iters=iters, init=init, zones=zones)


def precode(scheme: SchemeSpec, H, G: GramDecomposition, s, *,
            zone_spec: ZoneSpec | None = None, beta: float | None = None) -> PrecoderOutput:
    """Apply ``scheme`` to ``s``; ``beta`` overrides the exact ZF factor."""
    if scheme.name == "zf":
        return zf_precode(H, G, s, beta=beta)
    if scheme.name == "mf":
        return mf_precode(H, G, s)
    if scheme.name == "neumann":
        return neumann_precode(H, G, s, scheme.iters, beta=beta)
    return gs_precode(H, G, s, init=scheme.init, iters=scheme.iters,
                      division_free=scheme.division_free, zone_spec=zone_spec, beta=beta)


def precoding_matrix(scheme: SchemeSpec, H, G: GramDecomposition,
                     beta: float | None = None) -> np.ndarray:
    """Materialize the ``N x K`` precoding matrix from the K unit vectors.

    Only defined for linear schemes; the zone initial solution depends on
    ``s`` non-linearly.
    """
    if scheme.init == "zone":
        raise InvalidArgumentError("zone-initialized GS is not linear in s")
    return precode(scheme, H, G, np.eye(G.K, dtype=complex), beta=beta).t
