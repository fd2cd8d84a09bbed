"""Numerical witnesses for the convergence and power claims of GS precoding.

Each ``check_*`` function evaluates both sides of one inequality on a
concrete instance and returns a :class:`BoundReport`; nothing here raises
when an inequality fails.  Several of the claims are large-system
approximations and do fail on a fraction of finite instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .channel import ChannelSpec, correlated_channel
from .errors import InvalidArgumentError, PreconditionError
from .linalg import GramDecomposition, cholesky_solve, frobenius, gram, spectral_radius_est
from .precoders import IterationKind, SchemeSpec, beta_zf, gs_solve, iteration_matrix, precode


# relative round-off allowance for comparisons against an exact solve
ROUNDOFF = 1e-13


@dataclass(frozen=True)
class BoundReport:
    """``lhs <= rhs`` (``lhs < rhs`` when ``strict``) evaluated on one instance.

    ``extra`` carries auxiliary quantities a check reports alongside the
    main comparison, e.g. identity residuals.
    """

    name: str
    lhs: float
    rhs: float
    strict: bool = False
    context: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.lhs < self.rhs if self.strict else self.lhs <= self.rhs

    def as_row(self) -> dict:
        row = {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
               "holds": self.holds, "strict": self.strict}
        row.update(self.context)
        row.update(self.extra)
        return row


def lemma5_bound(N: int, K: int) -> float:
    """``sqrt((K^2 - K) / (2N))``, the large-system bound on ``||B_GS||_F``."""
    if N < 1 or K < 1:
        raise InvalidArgumentError("N and K must be positive")
    return math.sqrt((K * K - K) / (2.0 * N))


def _scaled_lower(G: GramDecomposition) -> np.ndarray:
    return G.L / G.D[:, None]


def _scaled_upper(G: GramDecomposition) -> np.ndarray:
    return G.L.conj().T / G.D[:, None]


def check_lemma4(G: GramDecomposition, context: dict | None = None) -> BoundReport:
    """``||B_GS||_F <= ||B_N||_F / sqrt(2)``.

    ``extra`` holds ``identity_residual = | ||B_N||_F - sqrt(2) ||D^-1 L^H||_F |``
    and ``split_residual``, the residual of the always-exact split
    ``||B_N||_F^2 = ||D^-1 L||_F^2 + ||D^-1 L^H||_F^2``.  The two agree only
    when the diagonal of ``W`` is constant.
    """
    b_gs = frobenius(iteration_matrix(G, IterationKind.GAUSS_SEIDEL))
    b_n = frobenius(iteration_matrix(G, IterationKind.NEUMANN))
    up = frobenius(_scaled_upper(G))
    low = frobenius(_scaled_lower(G))
    extra = {
        "identity_residual": abs(b_n - math.sqrt(2.0) * up),
        "split_residual": abs(b_n**2 - (low**2 + up**2)),
    }
    return BoundReport("lemma4", b_gs, b_n / math.sqrt(2.0), False, dict(context or {}), extra)


def induced_norm(A, p) -> float:
    """Induced matrix norm for ``p`` in ``{1, 2, inf}`` or the Frobenius norm.

    ``p = 1`` is the largest column sum and ``p = inf`` the largest row sum of
    magnitudes; ``p = 2`` is estimated as ``sqrt`` of the dominant eigenvalue
    of ``A^H A`` by power iteration.
    """
    A = np.asarray(A)
    if p == 1:
        return float(np.max(np.sum(np.abs(A), axis=0)))
    if p in (np.inf, "inf"):
        return float(np.max(np.sum(np.abs(A), axis=1)))
    if p == 2:
        return math.sqrt(spectral_radius_est(A.conj().T @ A))
    if p == "fro":
        return frobenius(A)
    raise InvalidArgumentError(f"unsupported norm {p!r}")


def check_lemma3(G: GramDecomposition, p=1, context: dict | None = None) -> BoundReport:
    """``||D^-1 L||_p < 1``."""
    lhs = induced_norm(_scaled_lower(G), p)
    ctx = dict(context or {})
    ctx["p"] = str(p)
    return BoundReport("lemma3", lhs, 1.0, True, ctx)


def check_lemma1(A, k: int) -> BoundReport:
    """``Re tr((A^H A)^k) < Re tr(A^k + (A^H)^k)`` for ``A`` with spectral radius < 1.

    Raises
    ------
    PreconditionError
        If ``A`` is zero or its estimated spectral radius is not below one.
    """
    A = np.asarray(A, dtype=complex)
    if k < 1:
        raise InvalidArgumentError("k must be >= 1")
    if not np.any(A):
        raise PreconditionError("A must be non-zero")
    rho = spectral_radius_est(A)
    if rho >= 1.0:
        raise PreconditionError(f"spectral radius {rho:.6g} is not below 1")
    Ak = np.linalg.matrix_power(A, k)
    gram_k = np.linalg.matrix_power(A.conj().T @ A, k)
    lhs = float(np.real(np.trace(gram_k)))
    rhs = float(np.real(np.trace(Ak + Ak.conj().T)))
    return BoundReport("lemma1", lhs, rhs, True, {"k": k}, {"spectral_radius": rho})


def check_power(H, G: GramDecomposition, s_basis=None, iters: int = 2,
                context: dict | None = None) -> BoundReport:
    """Transmit power of zero-initialized GS against exact ZF, both with ``beta_ZF``.

    Both precoding maps are materialized over the columns of ``s_basis``
    (the K unit vectors by default).  ``extra['relative_gap']`` is
    ``(rhs - lhs) / rhs``.
    """
    H = np.asarray(H, dtype=complex)
    K = G.K
    basis = np.eye(K, dtype=complex) if s_basis is None else np.asarray(s_basis, dtype=complex)
    beta = beta_zf(G)
    p_gs = precode(SchemeSpec("gs", iters), H, G, basis, beta=beta).t
    p_zf = precode(SchemeSpec("zf"), H, G, basis, beta=beta).t
    lhs = float(np.real(np.vdot(p_gs, p_gs)))
    rhs = float(np.real(np.vdot(p_zf, p_zf)))
    return BoundReport("lemma2_power", lhs, rhs, True, dict(context or {}),
                       {"relative_gap": (rhs - lhs) / rhs, "iters": iters})


def check_error_bound(G: GramDecomposition, s, init=None, iters: int = 1,
                      context: dict | None = None) -> BoundReport:
    """Error after ``iters`` sweeps against ``||B_GS||_F^iters ||x0 - x||``.

    Also measures, sweep by sweep, the residual of the exact error
    recursion ``e_{i+1} = B_GS e_i`` relative to ``||e_i||``
    (``extra['recursion_residual']``, the worst step) and whether the
    Frobenius-power bound held after every intermediate sweep
    (``extra['all_steps_hold']``).  Both comparisons carry a round-off
    allowance of ``ROUNDOFF * ||x||`` so an exactly converged sweep is not
    reported as a violation.
    """
    s = np.asarray(s, dtype=complex)
    exact = cholesky_solve(G, s)
    B = iteration_matrix(G, IterationKind.GAUSS_SEIDEL)
    fb = frobenius(B)
    x = np.zeros_like(s) if init is None else np.asarray(init, dtype=complex)
    e0 = float(np.linalg.norm(x - exact))
    slack = ROUNDOFF * float(np.linalg.norm(exact))
    worst = 0.0
    all_hold = True
    err = e0
    for i in range(1, iters + 1):
        prev = x - exact
        x = gs_solve(G, s, x, 1)
        cur = x - exact
        scale = max(np.linalg.norm(prev), np.finfo(float).tiny)
        worst = max(worst, float(np.linalg.norm(cur - B @ prev) / scale))
        err = float(np.linalg.norm(cur))
        if err > fb**i * e0 + slack:
            all_hold = False
    return BoundReport("error_bound", err, fb**iters * e0 + slack, False, dict(context or {}),
                       {"recursion_residual": worst, "all_steps_hold": all_hold,
                        "iters": iters})


def gs_frobenius_norm(G: GramDecomposition) -> float:
    return frobenius(iteration_matrix(G, IterationKind.GAUSS_SEIDEL))


def frobenius_sweep(K: int, alphas, trials: int, seed: int, correlation: float = 0.0):
    """Monte Carlo mean of ``||B_GS||_F`` for each ``alpha = N/K``.

    Returns ``(alpha, mean, bound)`` tuples.  Trial ``t`` at every alpha
    uses stream ``(seed, t)``.  A bound at or above one says nothing about
    convergence and should be read as non-binding.
    """
    rows = []
    for alpha in alphas:
        N = alpha * K
        if abs(N - round(N)) > 1e-9:
            raise InvalidArgumentError(f"alpha * K must be an integer, got {N}")
        N = int(round(N))
        norms = [gs_frobenius_norm(gram(correlated_channel(ChannelSpec(N, K, correlation, seed, t))))
                 for t in range(trials)]
        rows.append((alpha, math.fsum(norms) / trials, lemma5_bound(N, K)))
    return rows
