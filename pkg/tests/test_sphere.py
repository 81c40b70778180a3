import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import random_frame, sampled_subsphere_error, unit_rows
from pssa import synth
from pssa.errors import DegenerateMean, DegenerateProjection, DimensionError, NonUnitData
from pssa.linalg import projection_residual
from pssa.sphere import (
    best_point_in_subsphere,
    check_unit_columns,
    fit_subsphere,
    projection_distance_to_subsphere,
    riemannian_distance_to_subsphere,
    sphere_pssa_chain,
    spherical_mean,
)


def test_projection_distance_examples():
    V = np.array([[0.0], [0.0], [1.0]])
    assert projection_distance_to_subsphere([1, 0, 0], V) == 0.0
    assert projection_distance_to_subsphere([0, 0, 1], V) == 1.0
    x = np.array([1.0, 0.0, 1.0]) / np.sqrt(2)
    assert projection_distance_to_subsphere(x, V) == pytest.approx(np.sin(np.pi / 4), abs=1e-12)
    assert riemannian_distance_to_subsphere(x, V) == pytest.approx(np.pi / 4, abs=1e-12)


def test_equatorial_data_fits_exactly(rng):
    t = rng.uniform(0, 2 * np.pi, 15)
    X = np.vstack([np.cos(t), np.sin(t), np.zeros_like(t)])
    model = fit_subsphere(X, 1)
    assert model.total_error < 1e-12
    assert abs(abs(model.complement[2, 0]) - 1) < 1e-12
    assert model.dim == 1 and not model.antipodal


def test_error_is_singular_value_tail(rng):
    X = unit_rows(rng.normal(size=(20, 4))).T
    s = np.sort(np.linalg.svd(X, compute_uv=False))
    for m in (1, 2, 3):
        model = fit_subsphere(X, m)
        assert model.total_error == pytest.approx(np.linalg.norm(s[:m]), rel=1e-12)
        assert np.linalg.norm(model.per_point_errors) == pytest.approx(model.total_error, rel=1e-10)


def test_fit_beats_random_subspheres(rng):
    X = unit_rows(rng.normal(size=(30, 4)) * [1, 1, 0.3, 0.1]).T
    assert fit_subsphere(X, 2).total_error <= sampled_subsphere_error(X, 2, rng) + 1e-12


def test_antipodal_terminal(rng):
    _, X, _ = synth.generate("sphere-3", 0)
    chain = sphere_pssa_chain(X.T, include_point=True)
    assert [m.dim for m in chain] == [2, 1, 0]
    assert chain[-1].antipodal


def test_project_and_lift():
    V = np.array([[0.0], [0.0], [1.0]])
    model = fit_subsphere(np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]), 1)
    eps = 1e-3
    x = np.array([1.0, 0.0, eps]) / np.hypot(1, eps)
    y = model.project(x)
    assert np.allclose(np.abs(y), [1, 0], atol=1e-12)
    assert projection_distance_to_subsphere(model.lift(y), V) < 1e-12
    with pytest.raises(DegenerateProjection):
        model.project([0, 0, 1])


def test_point_on_subsphere_round_trips(rng):
    X = unit_rows(rng.normal(size=(10, 5))).T
    model = fit_subsphere(X, 2)
    p = model.lift(unit_rows(rng.normal(size=3)))
    assert np.linalg.norm(model.lift(model.project(p)) - p) < 1e-10


def test_validation():
    with pytest.raises(NonUnitData):
        check_unit_columns(np.array([[2.0], [0.0]]))
    assert np.allclose(check_unit_columns(np.array([[2.0], [0.0]]), renormalize=True), [[1.0], [0.0]])
    with pytest.raises(DimensionError):
        fit_subsphere(np.eye(3), 3)
    with pytest.raises(DimensionError):
        fit_subsphere(np.eye(3), 0)


def test_spherical_mean():
    assert np.allclose(spherical_mean([[1, 0, 0]]), [1, 0, 0])
    assert np.allclose(spherical_mean([[1, 0, 0], [0, 1, 0]]), np.array([1, 1, 0]) / np.sqrt(2))
    with pytest.raises(DegenerateMean):
        spherical_mean([[1, 0, 0], [-1, 0, 0]])


def test_best_point_in_subsphere_maximizes_alignment(rng):
    X = unit_rows(rng.normal(size=(12, 4)) + [2, 0, 0, 0]).T
    model = fit_subsphere(X, 2)
    p = best_point_in_subsphere(X, model)
    assert projection_distance_to_subsphere(p, model.complement) < 1e-12
    total = X.sum(axis=1)
    for _ in range(200):
        q = model.lift(unit_rows(rng.normal(size=2)))
        assert q @ total <= p @ total + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(3, 25), st.integers(0, 10_000))
def test_chain_is_nested(n, d, seed):
    rng = np.random.default_rng(seed)
    X = unit_rows(rng.normal(size=(d, n + 1))).T
    chain = sphere_pssa_chain(X, include_point=True)
    for a, b in zip(chain, chain[1:]):
        assert projection_residual(b.subspace, a.subspace) < 1e-8
        assert a.total_error <= b.total_error + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_fit_is_rotation_equivariant(seed):
    rng = np.random.default_rng(seed)
    X = unit_rows(rng.normal(size=(15, 4)) * [1, 0.8, 0.4, 0.1]).T
    Q = random_frame(rng, 4, 4)
    a, b = fit_subsphere(X, 1), fit_subsphere(Q @ X, 1)
    assert a.total_error == pytest.approx(b.total_error, abs=1e-10)
    assert projection_residual(Q @ a.complement, b.complement) < 1e-6
