"""Dense complex linear-algebra kernels.

Matrices and vectors are plain ``numpy`` arrays (``complex128``).  The
Cholesky routines here are the exact reference that every iterative
precoder is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy.linalg import lapack

from .counting import MultCounter
from .errors import InvalidArgumentError, NotPositiveDefiniteError, SingularTriangularError

HERMITIAN_TOL = 1e-10
SOLVE_RESIDUAL_TOL = 1e-9

# fixed start vector seed for power iteration
_POWER_ITER_SEED = 0x5EED


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GramDecomposition:
    """Gram matrix ``W`` split into diagonal ``D`` and strictly-lower ``L``.

    ``W == diag(D) + L + L^H`` holds entry for entry.  Arrays are read-only.
    """

    W: np.ndarray
    D: np.ndarray
    L: np.ndarray

    @property
    def K(self) -> int:
        return self.W.shape[0]

    @property
    def lower(self) -> np.ndarray:
        """``D + L``, the lower-triangular Gauss-Seidel splitting matrix."""
        return np.diag(self.D).astype(complex) + self.L

    @classmethod
    def from_matrix(cls, W) -> "GramDecomposition":
        """Split an explicit Hermitian positive-definite matrix.

        The strictly upper triangle is discarded after a Hermitian check, so
        the stored ``W`` is exactly Hermitian.
        """
        W = np.asarray(W, dtype=complex)
        if W.ndim != 2 or W.shape[0] != W.shape[1] or W.shape[0] == 0:
            raise InvalidArgumentError(f"expected a non-empty square matrix, got shape {W.shape}")
        if not np.all(np.isfinite(W)):
            raise InvalidArgumentError("matrix has non-finite entries")
        scale = np.max(np.abs(W))
        if np.max(np.abs(W - W.conj().T)) > HERMITIAN_TOL * scale:
            raise InvalidArgumentError("matrix is not Hermitian")
        D = np.real(np.diag(W)).copy()
        if np.any(D <= 0):
            m = int(np.argmax(D <= 0))
            raise NotPositiveDefiniteError(m)
        return cls._assemble(D, np.tril(W, -1))

    @classmethod
    def _assemble(cls, D: np.ndarray, L: np.ndarray) -> "GramDecomposition":
        W = L + np.diag(D).astype(complex) + L.conj().T
        return cls(W=_frozen(W), D=_frozen(D), L=_frozen(L))


def gram(H) -> GramDecomposition:
    """Form ``W = H H^H`` for a ``K x N`` channel and split it.

    Only the strictly-lower triangle of the product is kept and mirrored;
    the diagonal is the real row energy of ``H``.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] < 1 or H.shape[1] < 1:
        raise InvalidArgumentError(f"channel must be a non-empty K x N matrix, got shape {H.shape}")
    D = np.sum(H.real**2 + H.imag**2, axis=1)
    L = np.tril(H @ H.conj().T, -1)
    return GramDecomposition._assemble(D, L)


def _cholesky_factor(G: GramDecomposition) -> np.ndarray:
    c, info = lapack.zpotrf(np.asarray(G.W), lower=1, clean=1)
    if info > 0:
        raise NotPositiveDefiniteError(info - 1)
    if info < 0:  # pragma: no cover - only on malformed input to LAPACK
        raise InvalidArgumentError(f"zpotrf rejected argument {-info}")
    return c


def cholesky_solve(G: GramDecomposition, b) -> np.ndarray:
    """Solve ``W x = b`` exactly through a Cholesky factorization.

    ``b`` may be a length-K vector or a ``K x T`` block of right-hand sides.

    Raises
    ------
    NotPositiveDefiniteError
        If a pivot of the factorization is not positive; ``.pivot`` holds
        its 0-based index.
    """
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != G.K:
        raise InvalidArgumentError(f"right-hand side has {b.shape[0]} rows, expected {G.K}")
    c = _cholesky_factor(G)
    x, info = lapack.zpotrs(c, b, lower=1)
    if info != 0:  # pragma: no cover
        raise InvalidArgumentError(f"zpotrs rejected argument {-info}")
    return x


def cholesky_inverse(G: GramDecomposition) -> np.ndarray:
    """Exact Hermitian inverse ``W^{-1}`` from the Cholesky factor."""
    c = _cholesky_factor(G)
    inv, info = lapack.zpotri(c, lower=1)
    if info != 0:
        raise NotPositiveDefiniteError(info - 1)
    low = np.tril(inv, -1)
    return low + np.diag(np.real(np.diag(inv))).astype(complex) + low.conj().T


def forward_substitute(M, b, counter: MultCounter | None = None) -> np.ndarray:
    """Solve the lower-triangular system ``M x = b`` row by row.

    Row ``i`` costs ``i`` multiply-accumulates plus one division, so a full
    solve is ``K(K+1)/2`` operations per right-hand side.  Entries of ``M``
    above the diagonal are ignored.
    """
    M = np.asarray(M, dtype=complex)
    b = np.asarray(b, dtype=complex)
    K = M.shape[0]
    if M.ndim != 2 or M.shape[1] != K or b.shape[0] != K:
        raise InvalidArgumentError(f"incompatible shapes {M.shape} and {b.shape}")
    diag = np.diag(M)
    zero = np.flatnonzero(diag == 0)
    if zero.size:
        raise SingularTriangularError(int(zero[0]))
    x = np.zeros_like(b)
    ncols = 1 if b.ndim == 1 else b.shape[1]
    for i in range(K):
        x[i] = (b[i] - M[i, :i] @ x[:i]) / diag[i]
        if counter is not None:
            counter.add((i + 1) * ncols)
    return x


def frobenius(A) -> float:
    """Frobenius norm, summed with ``math.fsum`` so it is order independent."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    sq = np.square(A.real) + np.square(A.imag) if np.iscomplexobj(A) else np.square(A)
    return math.sqrt(math.fsum(np.ravel(sq)))


def spectral_radius_est(A, max_iters: int = 2000, tol: float = 1e-12) -> float:
    """Estimate ``max |lambda(A)|`` by normalized power iteration on ``A``.

    The estimate is the geometric mean of the per-step growth factors over
    the trailing half of the iterations, which also settles when several
    eigenvalues share the dominant modulus.  It is an estimate: convergence
    is slow when the two largest moduli are close and not guaranteed for
    defective matrices.  The start vector comes from a fixed seed.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n == 0 or not np.any(A):
        return 0.0
    rng = np.random.default_rng(_POWER_ITER_SEED)
    x = np.exp(2j * np.pi * rng.random(n))
    x /= np.linalg.norm(x)
    logs: list[float] = []
    prev = None
    for k in range(max_iters):
        y = A @ x
        nrm = np.linalg.norm(y)
        if nrm == 0.0:
            return 0.0
        logs.append(math.log(nrm))
        x = y / nrm
        if k >= 20 and k % 10 == 0:
            tail = logs[len(logs) // 2:]
            est = math.exp(math.fsum(tail) / len(tail))
            if prev is not None and abs(est - prev) <= tol * max(est, 1e-300):
                return est
            prev = est
    tail = logs[len(logs) // 2:]
    return math.exp(math.fsum(tail) / len(tail))
