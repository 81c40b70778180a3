"""Great subspheres of S^n and their best fits.

A great subsphere is ``S_N = S^n ∩ N`` for a linear subspace ``N`` of
``R^(n+1)``; it is stored through an orthonormal basis ``V`` of ``N⊥``.
Data matrices hold one point per column, as in ``X = [x_1, ..., x_d]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .errors import DegenerateMean, DegenerateProjection, DimensionError, NonUnitData
from .linalg import as_matrix, singular_spectrum


def check_unit_columns(X, renormalize: bool = False) -> np.ndarray:
    """Validate (or rescale) a data matrix whose columns should be unit vectors."""
    X = as_matrix(X, "sphere data")
    if X.shape[0] < 2:
        raise DimensionError("sphere data needs at least 2 ambient coordinates")
    norms = np.linalg.norm(X, axis=0)
    if renormalize:
        if np.any(norms <= TOL.projection):
            raise NonUnitData("cannot renormalize a zero column")
        return X / norms
    bad = np.flatnonzero(np.abs(norms - 1.0) > TOL.unit_norm)
    if bad.size:
        raise NonUnitData(
            f"{bad.size} column(s) are not unit vectors (first: column {bad[0]}, norm {norms[bad[0]]:.6g})"
        )
    return X


def _frame_and_point(x, V) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float).ravel()
    V = as_matrix(V, "complement frame")
    if V.shape[0] != x.size:
        raise DimensionError(f"point has {x.size} coordinates but frame lives in R^{V.shape[0]}")
    return x, V


def projection_distance_to_subsphere(x, V) -> float:
    """Projection distance from ``x`` to ``S_N``, with ``V`` an orthonormal basis of N⊥."""
    x, V = _frame_and_point(x, V)
    return float(min(1.0, np.linalg.norm(V.T @ x)))


def riemannian_distance_to_subsphere(x, V) -> float:
    """Angle (radians, in [0, pi/2]) between ``x`` and the great subsphere ``S_N``."""
    return float(np.arcsin(np.clip(projection_distance_to_subsphere(x, V), 0.0, 1.0)))


@dataclass
class SubsphereModel:
    """Best-fit great subsphere of codimension ``codim`` in ``S^ambient_dim``.

    ``complement`` spans N⊥ (the fitted directions), ``subspace`` spans N.
    ``singular_values`` is the full spectrum of ``X^T`` in nondecreasing
    order, zero-padded to length ``ambient_dim + 1``.
    """

    ambient_dim: int
    codim: int
    complement: np.ndarray
    subspace: np.ndarray
    singular_values: np.ndarray
    per_point_errors: np.ndarray
    total_error: float

    @property
    def dim(self) -> int:
        return self.ambient_dim - self.codim

    @property
    def antipodal(self) -> bool:
        # codim n leaves S^0, a pair of antipodal points, which is disconnected
        return self.codim == self.ambient_dim

    def distance(self, x) -> float:
        return projection_distance_to_subsphere(x, self.complement)

    def project(self, x) -> np.ndarray:
        """Intrinsic coordinates in ``S^dim`` of the nearest point of the subsphere."""
        y = self.subspace.T @ np.asarray(x, dtype=float).ravel()
        norm = np.linalg.norm(y)
        if norm <= TOL.projection:
            raise DegenerateProjection("point is orthogonal to the subsphere")
        return y / norm

    def lift(self, y) -> np.ndarray:
        return self.subspace @ np.asarray(y, dtype=float).ravel()


def fit_subsphere(X, m: int, renormalize: bool = False) -> SubsphereModel:
    """Best great ``S^(n-m)`` in the projection distance.

    The complement of the fitted subspace is spanned by the left singular
    vectors of ``X`` for its ``m`` smallest singular values, and the total
    error ``||X^T V||_F`` is the 2-norm of those singular values.

    Parameters
    ----------
    X : array_like, shape (n+1, d)
        Data points on ``S^n`` as columns.
    m : int
        Codimension, ``0 < m <= n``. ``m = n`` gives the antipodal pair.
    renormalize : bool
        Rescale columns to unit norm instead of rejecting them.
    """
    X = check_unit_columns(X, renormalize)
    n = X.shape[0] - 1
    if not 0 < m <= n:
        raise DimensionError(f"codimension must satisfy 0 < m <= {n}, got {m}")
    U, s = singular_spectrum(X)
    V = U[:, :m]
    per_point = np.minimum(np.linalg.norm(V.T @ X, axis=0), 1.0)
    return SubsphereModel(
        ambient_dim=n,
        codim=m,
        complement=V,
        subspace=U[:, m:],
        singular_values=s,
        per_point_errors=per_point,
        total_error=float(np.linalg.norm(s[:m])),
    )


def sphere_pssa_chain(X, include_point: bool = False, renormalize: bool = False) -> list[SubsphereModel]:
    """Nested best subspheres ``S^(n-1) ⊃ ... ⊃ S^1`` (and ``S^0`` if asked).

    All models come from one SVD, so each complement frame is a prefix of
    the next and the chain is nested.
    """
    X = check_unit_columns(X, renormalize)
    n = X.shape[0] - 1
    last = n if include_point else n - 1
    return [fit_subsphere(X, m) for m in range(1, last + 1)]


def spherical_mean(points) -> np.ndarray:
    """Extrinsic mean: normalized Euclidean average of points given as rows."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    mean = P.mean(axis=0)
    norm = np.linalg.norm(mean)
    if norm <= TOL.mean:
        raise DegenerateMean("Euclidean mean of the points is numerically zero")
    return mean / norm


def best_point_in_subsphere(X, model: SubsphereModel) -> np.ndarray:
    """Extrinsic mean of the data restricted to ``S_N``.

    Maximizes ``z · sum(x_i)`` over unit ``z`` in ``N``, i.e. the chordal best
    single point inside the subsphere.
    """
    X = as_matrix(X)
    total = model.subspace @ (model.subspace.T @ X.sum(axis=1))
    norm = np.linalg.norm(total)
    if norm <= TOL.mean * X.shape[1]:
        raise DegenerateMean("data mean is orthogonal to the subsphere")
    return total / norm
