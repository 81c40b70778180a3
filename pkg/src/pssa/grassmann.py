"""Principal angles, chordal distance and best-fit sub-Grassmannians.

A k-plane in R^n is given by an ``n x k`` frame with orthonormal columns. The
fitted submanifolds are the sets G(k, n-p) of k-planes orthogonal to a
p-dimensional subspace W.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import TOL
from .errors import DegenerateProjection, DimensionError, RankDeficient
from .linalg import as_matrix, orthogonal_complement, orthonormality_error, orthonormalize, singular_spectrum


def check_frame(X, name: str = "frame") -> np.ndarray:
    X = as_matrix(X, name)
    if X.shape[1] > X.shape[0]:
        raise DimensionError(f"{name} has more columns than rows: {X.shape}")
    if orthonormality_error(X) > TOL.orthonormal * 100:
        raise DimensionError(f"{name} does not have orthonormal columns")
    return X


def _pair(X, Y) -> tuple[np.ndarray, np.ndarray]:
    X, Y = check_frame(X), check_frame(Y)
    if X.shape != Y.shape:
        raise DimensionError(f"planes must share ambient and plane dimension, got {X.shape} and {Y.shape}")
    return X, Y


def principal_angles(X, Y) -> np.ndarray:
    """Principal angles between span(X) and span(Y), nondecreasing, in [0, pi/2]."""
    X, Y = _pair(X, Y)
    s = np.linalg.svd(X.T @ Y, compute_uv=False)
    return np.sort(np.arccos(np.clip(s, 0.0, 1.0)))


def chordal_distance(X, Y) -> float:
    """``||sin theta||_2``, computed as ``sqrt(k - ||X^T Y||_F^2)``."""
    X, Y = _pair(X, Y)
    k = X.shape[1]
    return float(np.sqrt(max(k - np.linalg.norm(X.T @ Y) ** 2, 0.0)))


def chordal_distance_via_complement(X, Y) -> float:
    """``||X^T Y⊥||_F`` with Y⊥ from a full orthogonal completion of Y."""
    X, Y = _pair(X, Y)
    return float(np.linalg.norm(X.T @ orthogonal_complement(Y)))


def distance_to_subgrassmannian(X, W) -> float:
    """Chordal distance from span(X) to the k-planes orthogonal to span(W): ``||X^T W||_F``."""
    X = check_frame(X)
    W = check_frame(W, "complement frame")
    n, k = X.shape
    if W.shape[0] != n:
        raise DimensionError(f"W lives in R^{W.shape[0]}, plane in R^{n}")
    if k > n - W.shape[1]:
        raise DimensionError(f"no {k}-planes fit orthogonally to a {W.shape[1]}-dimensional W in R^{n}")
    return float(np.linalg.norm(X.T @ W))


@dataclass
class SubgrassmannianModel:
    """Best G(k, n-p): the k-planes orthogonal to span(complement)."""

    ambient_dim: int
    plane_dim: int
    codim: int
    complement: np.ndarray
    subspace: np.ndarray
    singular_values: np.ndarray
    per_point_errors: np.ndarray
    total_error: float

    @property
    def dim(self) -> int:
        k = self.plane_dim
        return k * (self.ambient_dim - self.codim - k)

    def distance(self, X) -> float:
        return distance_to_subgrassmannian(X, self.complement)

    def project(self, X) -> np.ndarray:
        """Nearest k-plane orthogonal to W, as a frame in the coordinates of W⊥."""
        Y = self.subspace.T @ check_frame(X)
        try:
            return orthonormalize(Y)
        except RankDeficient as exc:
            raise DegenerateProjection("plane meets W in a nontrivial subspace") from exc

    def lift(self, Y) -> np.ndarray:
        return self.subspace @ as_matrix(Y)


def stack_planes(planes: Sequence) -> tuple[np.ndarray, int, int]:
    frames = [check_frame(P, f"plane {i}") for i, P in enumerate(planes)]
    if not frames:
        raise DimensionError("no planes given")
    shape = frames[0].shape
    for i, F in enumerate(frames):
        if F.shape != shape:
            raise DimensionError(f"plane {i} has shape {F.shape}, expected {shape}")
    return np.hstack(frames), shape[0], shape[1]


def fit_subgrassmannian(planes: Sequence, p: int) -> SubgrassmannianModel:
    """Best G(k, n-p) in the sum of squared chordal distances.

    W is spanned by the singular vectors of the concatenated frame matrix
    ``[X_1, ..., X_d]`` for its ``p`` smallest singular values.
    """
    X, n, k = stack_planes(planes)
    if not 0 < p <= n - k:
        raise DimensionError(f"codimension must satisfy 0 < p <= n - k = {n - k}, got {p}")
    U, s = singular_spectrum(X)
    W = U[:, :p]
    per_point = np.array([np.linalg.norm(X[:, i * k:(i + 1) * k].T @ W) for i in range(X.shape[1] // k)])
    return SubgrassmannianModel(
        ambient_dim=n,
        plane_dim=k,
        codim=p,
        complement=W,
        subspace=U[:, p:],
        singular_values=s,
        per_point_errors=per_point,
        total_error=float(np.linalg.norm(s[:p])),
    )


def grassmann_pssa_chain(planes: Sequence, p_max: int | None = None) -> list[SubgrassmannianModel]:
    """Nested best G(k, n-p) for ``p = 1 ... p_max`` (default ``n - k``)."""
    _, n, k = stack_planes(planes)
    if p_max is None:
        p_max = n - k
    if not 0 < p_max <= n - k:
        raise DimensionError(f"p_max must satisfy 0 < p_max <= {n - k}")
    return [fit_subgrassmannian(planes, p) for p in range(1, p_max + 1)]
