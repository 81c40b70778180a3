import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from oracles import random_frame, random_frames, sampled_subgrassmannian_error
from pssa.errors import DegenerateProjection, DimensionError
from pssa.grassmann import (
    chordal_distance,
    chordal_distance_via_complement,
    distance_to_subgrassmannian,
    fit_subgrassmannian,
    grassmann_pssa_chain,
    principal_angles,
)
from pssa.linalg import projection_residual


def test_principal_angles_match_scipy(rng):
    for _ in range(50):
        X, Y = random_frame(rng, 6, 3), random_frame(rng, 6, 3)
        ref = np.sort(scipy.linalg.subspace_angles(X, Y))
        assert np.allclose(principal_angles(X, Y), ref, atol=1e-7)


def test_known_angles():
    e = np.eye(3)
    assert chordal_distance(e[:, :1], e[:, :1]) == 0.0
    assert chordal_distance(e[:, :1], e[:, 1:2]) == pytest.approx(1.0)
    t = 0.3
    Y = np.array([[np.cos(t)], [np.sin(t)], [0.0]])
    assert principal_angles(e[:, :1], Y) == pytest.approx([t])


def test_distance_to_subgrassmannian():
    e = np.eye(4)
    W = e[:, 3:]
    assert distance_to_subgrassmannian(e[:, :2], W) == 0.0
    X = np.column_stack([e[:, 0], (e[:, 1] + e[:, 3]) / np.sqrt(2)])
    assert distance_to_subgrassmannian(X, W) == pytest.approx(1 / np.sqrt(2))
    with pytest.raises(DimensionError):
        distance_to_subgrassmannian(e[:, :2], e[:, 1:4])


def test_distance_matches_nearest_plane(rng):
    # the chordal distance to the nearest k-plane inside W-perp equals ||X^T W||
    model = fit_subgrassmannian([random_frame(rng, 6, 2) for _ in range(3)], 2)
    for _ in range(20):
        X = random_frame(rng, 6, 2)
        Y = model.lift(model.project(X))
        assert chordal_distance(X, Y) == pytest.approx(model.distance(X), abs=1e-10)


def test_constant_plane_fits_exactly(rng):
    X = random_frame(rng, 5, 2)
    model = fit_subgrassmannian([X] * 6, 3)
    assert model.total_error < 1e-12
    assert model.dim == 0
    assert np.linalg.norm(X.T @ model.complement) < 1e-12


def test_fit_beats_random_competitors(rng):
    planes = list(random_frames(rng, 10, 5, 2))
    fitted = fit_subgrassmannian(planes, 1).total_error
    assert fitted <= sampled_subgrassmannian_error(planes, 1, rng) + 1e-12


def test_project_degenerate():
    e = np.eye(3)
    model = fit_subgrassmannian([e[:, :1], e[:, 1:2]], 1)
    with pytest.raises(DegenerateProjection):
        model.project(model.complement)


def test_codimension_bounds(rng):
    planes = list(random_frames(rng, 4, 4, 2))
    with pytest.raises(DimensionError):
        fit_subgrassmannian(planes, 3)
    with pytest.raises(DimensionError):
        fit_subgrassmannian([random_frame(rng, 4, 2), random_frame(rng, 5, 2)], 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 7), st.integers(0, 10_000))
def test_chordal_identities(n, seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, n))
    X, Y = random_frame(rng, n, k), random_frame(rng, n, k)
    a = chordal_distance(X, Y)
    assert a == pytest.approx(np.linalg.norm(np.sin(principal_angles(X, Y))), abs=1e-10)
    assert a == pytest.approx(chordal_distance_via_complement(X, Y), abs=1e-10)
    assert a == pytest.approx(chordal_distance(Y, X), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 7), st.integers(0, 10_000))
def test_chain_nested(n, seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, n))
    chain = grassmann_pssa_chain(list(random_frames(rng, 8, n, k)))
    assert len(chain) == n - k
    for a, b in zip(chain, chain[1:]):
        assert projection_residual(a.complement, b.complement) < 1e-8
        assert a.total_error <= b.total_error + 1e-12
