import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import random_frame
from pssa.errors import DimensionError, RankDeficient
from pssa.linalg import (
    canonical_sign,
    orthogonal_complement,
    orthonormality_error,
    orthonormalize,
    projection_residual,
    singular_spectrum,
    smallest_singular_subspace,
)


def test_orthonormalize_spans_input(rng):
    M = rng.normal(size=(6, 3))
    Q = orthonormalize(M)
    assert orthonormality_error(Q) < 1e-12
    assert projection_residual(M, Q) < 1e-10
    assert np.all(np.diag(Q.T @ M) > 0)


def test_orthonormalize_rejects_rank_loss():
    M = np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]])
    with pytest.raises(RankDeficient):
        orthonormalize(M)


def test_orthogonal_complement_completes_basis(rng):
    V = random_frame(rng, 5, 2)
    W = orthogonal_complement(V)
    assert W.shape == (5, 3)
    assert orthonormality_error(np.hstack([V, W])) < 1e-12


def test_canonical_sign_makes_first_entry_positive():
    V = np.array([[0.0, -1.0], [-1.0, 0.0], [0.0, 0.0]])
    out = canonical_sign(V)
    assert out[1, 0] == 1.0 and out[0, 1] == 1.0


def test_singular_spectrum_matches_numpy(rng):
    X = rng.normal(size=(4, 9))
    U, s = singular_spectrum(X)
    assert np.allclose(s, np.sort(np.linalg.svd(X, compute_uv=False)))
    assert np.allclose(np.linalg.norm(U.T @ X, axis=1), s)


def test_singular_spectrum_pads_wide_rank():
    X = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
    U, s = singular_spectrum(X)
    assert s.shape == (4,)
    assert np.allclose(s, [0, 0, 1, 1])


def test_tied_singular_values_are_ordered_deterministically():
    X = np.eye(3)
    U1, _ = singular_spectrum(X)
    U2, _ = singular_spectrum(X.copy())
    assert np.array_equal(U1, U2)


def test_smallest_subspace_bounds():
    with pytest.raises(DimensionError):
        smallest_singular_subspace(np.eye(3), 4)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.integers(1, 12), st.integers(0, 10_000))
def test_prefix_property(n, d, seed):
    X = np.random.default_rng(seed).normal(size=(n, d))
    frames = [smallest_singular_subspace(X, m)[0] for m in range(1, n + 1)]
    for a, b in zip(frames, frames[1:]):
        assert np.array_equal(a, b[:, : a.shape[1]])
