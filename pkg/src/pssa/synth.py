"""Synthetic datasets in the style of the worked examples.

Every generator takes a seed for ``numpy.random.default_rng`` and returns
``(manifold, data, params)``; ``params`` is written to the file header.
"""

from __future__ import annotations

import numpy as np

from . import lattice
from .errors import UnknownExample
from .linalg import orthonormalize
from .polysphere import point_on_circle

# resonance rows of the nested T^3 example, completed to a unimodular matrix
TORUS_123_C = np.array([[-1, -1, 1], [-2, 1, 0], [0, 1, -1]], dtype=np.int64)
# per-row noise so that the expected chordal errors are about 0.049 and 0.169
TORUS_123_SIGMA = (0.0313, 0.1146)


def _unit_rows(Z):
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


def _sphere(mean, std, rng, d=20):
    Z = np.asarray(mean, dtype=float) + rng.normal(size=(d, 4)) * np.asarray(std, dtype=float)
    return _unit_rows(Z)


def sphere_1(rng):
    std = (1.0, 1.0, 0.1, 0.05)
    return "sphere", _sphere(0.0, std, rng), {"points": 20, "mean": "0", "std": std}


def sphere_2(rng):
    std = (1.0, 0.3, 0.1, 0.05)
    return "sphere", _sphere(0.0, std, rng), {"points": 20, "mean": "0", "std": std}


def sphere_3(rng):
    mean, std = (1.0, 0.0, 0.0, 0.0), (0.0, 0.4, 0.1, 0.05)
    return "sphere", _sphere(mean, std, rng), {"points": 20, "mean": mean, "std": std}


def torus_25(rng, d=50):
    """Points near the closed geodesic ``2 x1 + 5 x2 = const`` of T^2."""
    sigma = 0.1 / (2 * np.pi)
    x0 = rng.uniform(size=2)
    t = rng.uniform(size=(d, 1))
    X = x0 + t * np.array([5.0, -2.0]) + rng.normal(scale=sigma, size=(d, 2))
    return "torus", np.mod(X, 1.0), {"points": d, "direction": (5, -2), "noise_std": sigma}


def torus_123(rng, d=50):
    """Points near a closed geodesic of T^3 parallel to ``[1, 2, 3]``.

    Noise is drawn along the dual basis of the first two rows of
    ``TORUS_123_C``, so each relation sees independent Gaussian noise of
    the scale in ``TORUS_123_SIGMA``.
    """
    A = TORUS_123_C[:2]
    dual = lattice.dual_lattice_basis(A).to_float()          # A @ dual = I
    x0 = rng.uniform(size=3)
    t = rng.uniform(size=(d, 1))
    eps = rng.normal(size=(d, 2)) * np.array(TORUS_123_SIGMA)
    X = x0 + t * np.array([1.0, 2.0, 3.0]) + eps @ dual.T
    params = {"points": d, "direction": (1, 2, 3), "relations": A.tolist(), "relation_std": TORUS_123_SIGMA}
    return "torus", np.mod(X, 1.0), params


def _rotation(axis, angle):
    axis = np.asarray(axis, dtype=float) / np.linalg.norm(axis)
    K = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * K @ K


COUPLING_ROTATION = _rotation((1.0, 1.0, 1.0), np.pi / 3)


def polysphere_coupled(rng, d=40):
    """Pairs ``(x, R x)`` with ``x`` loosely spread around a great circle.

    The coupling noise is small and the spread off the circle is larger, so
    the coupled sphere fits much better than any product of circles, and a
    great circle inside the coupled sphere is the next best step.
    """
    t = rng.uniform(0, 2 * np.pi, d)
    lat = rng.normal(scale=0.25, size=d)
    x = np.column_stack([np.cos(lat) * np.cos(t), np.cos(lat) * np.sin(t), np.sin(lat)])
    y = _unit_rows(x @ COUPLING_ROTATION.T + rng.normal(scale=0.03, size=(d, 3)))
    params = {"points": d, "rotation": COUPLING_ROTATION.round(12).tolist(), "latitude_std": 0.25, "noise_std": 0.03}
    return "polysphere", np.stack([x, y], axis=1), params


def polysphere_torus(rng, d=40):
    """Two phase-locked circle factors: the second angle trails the first by 1/4 turn."""
    axes = (np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 1.0]) / np.sqrt(2))
    theta = rng.uniform(size=d)
    phases = (theta, theta + 0.25 + rng.normal(scale=0.01, size=d))
    factors = [
        _unit_rows(point_on_circle(ph, ax) + rng.normal(scale=0.05, size=(d, 3)))
        for ph, ax in zip(phases, axes)
    ]
    params = {"points": d, "axes": [a.round(12).tolist() for a in axes], "phase_shift": 0.25,
              "phase_std": 0.01, "off_circle_std": 0.05}
    return "polysphere", np.stack(factors, axis=1), params


def grassmann_planes(rng, d=30, n=5, k=2):
    """2-planes in R^5 close to a fixed 3-dimensional subspace."""
    base = orthonormalize(rng.normal(size=(n, 3)))
    frames = [orthonormalize(base @ rng.normal(size=(3, k)) + 0.05 * rng.normal(size=(n, k))) for _ in range(d)]
    return "grassmannian", frames, {"planes": d, "n": n, "k": k, "noise_std": 0.05}


EXAMPLES = {
    "sphere-1": sphere_1,
    "sphere-2": sphere_2,
    "sphere-3": sphere_3,
    "torus-25": torus_25,
    "torus-123": torus_123,
    "polysphere-coupled": polysphere_coupled,
    "polysphere-torus": polysphere_torus,
    "grassmann-planes": grassmann_planes,
}


def generate(example: str, seed: int = 0):
    """``(manifold, data, params)`` for a named example."""
    try:
        gen = EXAMPLES[example]
    except KeyError:
        raise UnknownExample(f"unknown example {example!r}; choose from {', '.join(EXAMPLES)}") from None
    manifold, data, params = gen(np.random.default_rng(seed))
    return manifold, data, {"example": example, "seed": seed, **params}
