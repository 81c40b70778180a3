"""Dense linear-algebra kernels shared by the sphere and Grassmannian fits."""

from __future__ import annotations

import numpy as np

from .config import TOL
from .errors import DimensionError, RankDeficient


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    if M.ndim != 2 or 0 in M.shape:
        raise DimensionError(f"{name} must be a nonempty 2-D array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DimensionError(f"{name} has non-finite entries")
    return M


def canonical_sign(V: np.ndarray) -> np.ndarray:
    """Flip columns so the first entry of each column that is not ~0 is positive."""
    V = np.array(V, dtype=float, copy=True)
    if V.ndim == 1:
        return canonical_sign(V[:, None])[:, 0]
    for j in range(V.shape[1]):
        col = V[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12 * max(1.0, np.abs(col).max()))
        if nz.size and col[nz[0]] < 0:
            V[:, j] = -col
    return V


def orthonormality_error(V: np.ndarray) -> float:
    V = np.asarray(V, dtype=float)
    return float(np.linalg.norm(V.T @ V - np.eye(V.shape[1])))


def orthonormalize(M) -> np.ndarray:
    """Orthonormal basis for the column space of a full-column-rank matrix.

    QR with the diagonal of R forced positive, so an input that already has
    orthonormal columns comes back unchanged.
    """
    M = as_matrix(M)
    if M.shape[1] > M.shape[0]:
        raise RankDeficient(f"{M.shape[1]} columns cannot be independent in R^{M.shape[0]}")
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0 or s[-1] <= TOL.rank * s[0]:
        ratio = s[-1] / s[0] if s[0] else 0.0
        raise RankDeficient(f"matrix is rank deficient (sigma_min/sigma_max = {ratio:.3g})")
    Q, R = np.linalg.qr(M)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def orthogonal_complement(V) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(V), via full QR."""
    V = orthonormalize(V)
    n, m = V.shape
    if m == n:
        return np.zeros((n, 0))
    Q, _ = np.linalg.qr(V, mode="complete")
    return canonical_sign(Q[:, m:])


def singular_spectrum(X) -> tuple[np.ndarray, np.ndarray]:
    """All left singular pairs of ``X`` in nondecreasing order of singular value.

    ``X`` is ``n x d``. Returns ``(U, s)`` with ``U`` an ``n x n`` orthogonal
    matrix and ``s`` of length ``n``, zero-padded when ``d < n``. Each column of
    ``U`` is sign-canonicalized; columns with tied singular values are ordered
    lexicographically, largest first, so the ordering is reproducible.
    """
    X = as_matrix(X, "data matrix")
    n, d = X.shape
    U, s, _ = np.linalg.svd(X, full_matrices=True)
    s_full = np.zeros(n)
    s_full[: min(n, d)] = s
    U = canonical_sign(U)

    order = np.argsort(s_full, kind="stable")
    s_full, U = s_full[order], U[:, order]
    scale = max(s_full[-1], 1.0)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and s_full[stop] - s_full[start] <= TOL.tie * scale:
            stop += 1
        if stop - start > 1:
            block = U[:, start:stop]
            keys = sorted(range(stop - start), key=lambda j: tuple(-block[:, j]))
            U[:, start:stop] = block[:, keys]
            s_full[start:stop] = s_full[start:stop][keys]
        start = stop
    return U, s_full


def smallest_singular_subspace(X, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Left singular vectors of ``X`` for its ``m`` smallest singular values.

    Returns ``(V, s)`` where ``V`` is ``n x m`` with orthonormal columns and
    ``s`` holds the ``m`` smallest singular values, nondecreasing. Since the
    ordering of :func:`singular_spectrum` is fixed, the frame for ``m`` is a
    prefix of the frame for ``m + 1``.
    """
    X = as_matrix(X, "data matrix")
    n = X.shape[0]
    if not 0 < m <= n:
        raise DimensionError(f"m must satisfy 0 < m <= {n}, got {m}")
    U, s = singular_spectrum(X)
    return U[:, :m], s[:m]


def projection_residual(A, B) -> float:
    """How far span(A) is from lying inside span(B): ||(I - B B^T) A||_F."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if B.ndim == 1:
        B = B[:, None]
    return float(np.linalg.norm(A - B @ (B.T @ A)))
