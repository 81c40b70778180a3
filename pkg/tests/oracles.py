"""Independent reference computations used by the tests.

Nothing here calls into the package's fitting code: competitors are sampled
at random or searched on grids, and exact values come from sympy.
"""

import numpy as np


def random_frames(rng, count, n, k):
    """``count`` random n x k frames with orthonormal columns, shape (count, n, k)."""
    Q, R = np.linalg.qr(rng.normal(size=(count, n, k)))
    return Q * np.sign(np.diagonal(R, axis1=1, axis2=2))[:, None, :]


def random_frame(rng, n, k):
    return random_frames(rng, 1, n, k)[0]


def random_rotations(rng, count, proper=True):
    Q = random_frames(rng, count, 3, 3)
    if proper:
        flip = np.linalg.det(Q) < 0
        Q[flip, :, 2] *= -1
    return Q


def random_orthogonal(rng, count):
    """Uniform-ish draws from O(3), both determinant signs."""
    return random_frames(rng, count, 3, 3)


def unit_rows(Z):
    return Z / np.linalg.norm(Z, axis=-1, keepdims=True)


def sampled_subsphere_error(X, m, rng, count=10_000):
    """Smallest ``||V^T X||_F`` over random codimension-m frames V (X has points as columns)."""
    V = random_frames(rng, count, X.shape[0], m)
    return float(np.min(np.linalg.norm(np.einsum("cnm,nd->cmd", V, X), axis=(1, 2))))


def sampled_subgrassmannian_error(planes, p, rng, count=10_000):
    stacked = np.hstack(planes)
    W = random_frames(rng, count, stacked.shape[0], p)
    return float(np.min(np.linalg.norm(np.einsum("cnp,nd->cpd", W, stacked), axis=(1, 2))))


def sampled_rotation_error(x, y, rng, count=10_000, proper=False):
    """Smallest ``sum d(y_i, R x_i)^2`` (great-circle) over random orthogonal R."""
    R = random_rotations(rng, count) if proper else random_orthogonal(rng, count)
    cos = np.einsum("di,cij,dj->cd", y, R, x)
    return float(np.min(np.sum(np.arccos(np.clip(cos, -1, 1)) ** 2, axis=1)))


def sampled_axis_error(points, rng, count=10_000):
    """Smallest projection-distance error of a great circle over random axes (points as rows)."""
    axes = unit_rows(rng.normal(size=(count, 3)))
    return float(np.min(np.linalg.norm(points @ axes.T, axis=0)))


def grid_circular_offset(y, grid=200_001):
    """Offset minimizing ``sum sin^2(pi (y_i - c))`` on a fine grid of [0, 1)."""
    c = np.linspace(0, 1, grid, endpoint=False)
    cost = np.sum(np.sin(np.pi * (y[None, :] - c[:, None])) ** 2, axis=1)
    return float(c[np.argmin(cost)])


def circle_gap(a, b):
    """Distance between two angles on R/Z."""
    d = abs(a - b) % 1.0
    return min(d, 1 - d)


def sympy_dual_basis(A):
    import sympy

    M = sympy.Matrix(A)
    return M.T * (M * M.T).inv()


def random_unimodular(rng, n, steps=12):
    """Product of random elementary integer operations (determinant +-1)."""
    C = np.eye(n, dtype=np.int64)
    for _ in range(steps):
        i, j = rng.choice(n, size=2, replace=False)
        C[i] += int(rng.integers(-2, 3)) * C[j]
    if rng.random() < 0.5:
        C[0] *= -1
    return C


def tangent_pair(B):
    """Basis {m(xi, B xi)} of a two-factor tangent model, as (2, 2, 2) block vectors."""
    return np.array([[e, B @ e] for e in np.eye(2)])
