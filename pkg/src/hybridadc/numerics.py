"""Dense complex linear algebra helpers.

Thin, validated wrappers over numpy/scipy LAPACK routines. Every consumer
only relies on phase-invariant quantities, so SVD factors are returned
as-is without any sign or phase normalization.
"""

import numpy as np
import scipy.linalg

from .exceptions import DomainError, InvalidInputError

_HERMITIAN_TOL = 1e-10


def as_matrix(a, name="A"):
    """Return `a` as a finite 2-D complex array.

    Raises
    ------
    InvalidInputError
        If `a` is not two-dimensional, is empty, or holds NaN/Inf.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return a.astype(complex, copy=False)


def svd(a):
    """Full singular value decomposition ``A = U diag(S) V^H``.

    Parameters
    ----------
    a : array_like, shape (m, n)

    Returns
    -------
    u : ndarray, shape (m, m)
    s : ndarray, shape (min(m, n),)
        Non-negative, non-increasing.
    v : ndarray, shape (n, n)
        Right singular vectors as columns (not the conjugate transpose).
    """
    a = as_matrix(a)
    u, s, vh = np.linalg.svd(a, full_matrices=True)
    return u, s, vh.conj().T


def _hermitian_part(a, name):
    a = as_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {a.shape}")
    scale = max(np.linalg.norm(a), 1.0)
    if np.linalg.norm(a - a.conj().T) > _HERMITIAN_TOL * scale:
        raise DomainError(f"{name} is not Hermitian")
    return 0.5 * (a + a.conj().T)


def _cholesky(a, name):
    try:
        return scipy.linalg.cholesky(a, lower=True)
    except np.linalg.LinAlgError as exc:
        raise DomainError(f"{name} is not positive definite") from exc


def logdet2_hpd(a):
    """Base-2 log-determinant of a Hermitian positive definite matrix.

    Computed from the Cholesky factor, ``log2|A| = 2 sum log2 diag(L)``.
    """
    a = _hermitian_part(a, "A")
    chol = _cholesky(a, "A")
    return float(2.0 * np.sum(np.log2(np.diag(chol).real)))


def kron(a, b):
    """Standard Kronecker product."""
    return np.kron(as_matrix(a, "A"), as_matrix(b, "B"))


def solve_hpd(a, b):
    """Solve ``A X = B`` for Hermitian positive definite `A`."""
    a = _hermitian_part(a, "A")
    b = np.asarray(b)
    squeeze = b.ndim == 1
    b = as_matrix(b.reshape(-1, 1) if squeeze else b, "B")
    if b.shape[0] != a.shape[0]:
        raise InvalidInputError(f"shape mismatch: A is {a.shape}, B is {b.shape}")
    chol = _cholesky(a, "A")
    x = scipy.linalg.cho_solve((chol, True), b)
    return x.ravel() if squeeze else x
