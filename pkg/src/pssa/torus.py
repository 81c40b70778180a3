"""Subtori of the flat torus T^n = (R/Z)^n.

Angles are fractions of a turn in [0, 1). A subtorus is ``{x : A x = c}`` for
a unimodular integer ``k x n`` matrix ``A`` (the resonance relations) and an
offset ``c`` in T^k. Distances use the chordal circle metric
``d_c(x, y) = 1/2 sin(pi |x - y|)`` applied to the coordinates ``A x``, which
makes the best offset a per-row circular mean.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import lattice
from .config import TOL, parallel_map
from .errors import DegenerateMean, DimensionError, NotUnimodular

log = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


def wrap_unit(x):
    """Reduce angles into [0, 1)."""
    y = np.mod(x, 1.0)
    # float mod can return exactly 1.0 for tiny negative inputs
    return np.where(y >= 1.0, 0.0, y)


def wrap_centered(r):
    """Reduce angle differences into (-1/2, 1/2]."""
    return r - np.ceil(np.asarray(r, dtype=float) - 0.5)


def chordal_circle_distance(x, y):
    return 0.5 * np.sin(np.pi * np.abs(wrap_centered(np.asarray(x, float) - np.asarray(y, float))))


def circular_mean(angles, axis: int = 0):
    """atan2 of the mean sine and mean cosine, as a turn fraction in [0, 1)."""
    a = TWO_PI * np.asarray(angles, dtype=float)
    s = np.sin(a).mean(axis=axis)
    c = np.cos(a).mean(axis=axis)
    if np.any(np.hypot(s, c) <= TOL.mean):
        raise DegenerateMean("resultant vector of the angles is numerically zero")
    return wrap_unit(np.arctan2(s, c) / TWO_PI)


def check_angles(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or 0 in X.shape:
        raise DimensionError(f"torus data must be a nonempty (d, n) array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DimensionError("torus data has non-finite entries")
    return wrap_unit(X)


def _residual_components(Y, c):
    return 0.5 * np.abs(np.sin(np.pi * wrap_centered(Y - c)))


@dataclass
class SubtorusModel:
    """Fitted subtorus ``{x : A x = c}`` with its per-point residuals.

    ``mean_error`` is the root mean square of the per-point residual norms;
    ``per_direction_errors`` is the same for each resonance row separately.
    """

    A: np.ndarray
    c: np.ndarray
    per_point_errors: np.ndarray = field(default_factory=lambda: np.zeros(0))
    per_direction_errors: np.ndarray = field(default_factory=lambda: np.zeros(0))
    mean_error: float = 0.0
    loo_error: float | None = None

    @property
    def k(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def dim(self) -> int:
        return self.n - self.k

    @property
    def total_error(self) -> float:
        return float(np.linalg.norm(self.per_point_errors))

    @cached_property
    def completion(self) -> np.ndarray:
        return lattice.complete_to_unimodular(self.A)

    @cached_property
    def completion_inverse(self) -> np.ndarray:
        inv = lattice.rational_inverse(self.completion.tolist())
        return np.array([[int(v) for v in row] for row in inv], dtype=np.int64)

    def dual_basis(self) -> lattice.DualLatticeBasis:
        return lattice.dual_lattice_basis(self.A)

    def residual(self, x) -> float:
        return subtorus_residual(x, self)

    def project(self, x) -> np.ndarray:
        """Intrinsic coordinates on the subtorus: the free coordinates of ``C x``."""
        y = self.completion @ np.asarray(x, dtype=float).ravel()
        return wrap_unit(y[self.k:])

    def lift(self, y) -> np.ndarray:
        full = np.concatenate([self.c, np.asarray(y, dtype=float).ravel()])
        return wrap_unit(self.completion_inverse @ full)


def subtorus_residual(x, model: SubtorusModel) -> float:
    """``||1/2 sin(pi (A x - c))||_2`` with differences wrapped to (-1/2, 1/2]."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != model.n:
        raise DimensionError(f"point has {x.size} angles, model expects {model.n}")
    return float(np.linalg.norm(_residual_components(model.A @ x, model.c)))


def fit_subtorus(X, A) -> SubtorusModel:
    """Best subtorus with resonance relations ``A`` in the ``d_C`` metric.

    The offset is the componentwise circular mean of the ``A x_i``; it depends
    only on ``A`` and not on how ``A`` is completed to a unimodular ``C``.
    """
    X = check_angles(X)
    A = np.array(lattice.require_unimodular(A), dtype=np.int64)
    if A.shape[1] != X.shape[1]:
        raise DimensionError(f"A has {A.shape[1]} columns, data has {X.shape[1]} angles")
    # one contiguous 1-D pass per row keeps each offset independent of the other rows
    rows = [np.ascontiguousarray(X @ a) for a in A]
    c = np.array([circular_mean(y) for y in rows])
    Y = np.column_stack(rows)
    comps = _residual_components(Y, c)
    per_point = np.linalg.norm(comps, axis=1)
    return SubtorusModel(
        A=A,
        c=c,
        per_point_errors=per_point,
        per_direction_errors=np.sqrt(np.mean(comps**2, axis=0)),
        mean_error=float(np.sqrt(np.mean(per_point**2))),
    )


def _primitive_vectors(n: int, bound: int) -> list[tuple[int, ...]]:
    """Integer vectors with gcd 1, entries in (-bound, bound), first nonzero entry positive."""
    out = []
    for v in itertools.product(range(-bound + 1, bound), repeat=n):
        nz = next((x for x in v if x), 0)
        if nz <= 0:
            continue
        if np.gcd.reduce(np.abs(v)) == 1:
            out.append(v)
    out.sort(key=lambda v: (max(map(abs, v)), sum(map(abs, v)), tuple(-x for x in v)))
    return out


def enumerate_resonances(n: int, k: int, bound: int) -> list[np.ndarray]:
    """All row lattices of rank ``k`` in Z^n having a unimodular basis with entries in (-bound, bound).

    Each lattice is returned once, through the first basis found; duplicates
    are detected through the Hermite normal form. Rows of a unimodular matrix
    are primitive and may be negated freely, so bases are drawn from the
    sign-normalized primitive vectors. For ``k > 1`` the search is
    combinatorial and meant for small ``n`` and ``bound``.
    """
    if bound < 1:
        raise DimensionError("bound must be at least 1")
    if not 1 <= k <= n:
        raise DimensionError(f"need 1 <= k <= n, got k={k}, n={n}")
    vectors = _primitive_vectors(n, bound)
    seen: set = set()
    out = []
    for rows in itertools.combinations(vectors, k):
        if k > 1 and not lattice.is_unimodular(rows):
            continue
        key = lattice.canonical_form(rows)
        if key in seen:
            continue
        seen.add(key)
        out.append(np.array(rows, dtype=np.int64))
    return out


def loo_errors(X, A) -> np.ndarray:
    """Leave-one-out prediction errors ``e_i`` for resonance matrix ``A``.

    The circular mean without point ``i`` uses the full sine/cosine sums minus
    that point's own terms, so all ``d`` refits cost one pass.
    """
    X = check_angles(X)
    d = X.shape[0]
    if d < 2:
        raise DimensionError("leave-one-out needs at least 2 points")
    A = np.asarray(A, dtype=np.int64)
    Y = X @ A.T
    s, c = np.sin(TWO_PI * Y), np.cos(TWO_PI * Y)
    ls, lc = s.sum(axis=0) - s, c.sum(axis=0) - c
    if np.any(np.hypot(ls, lc) <= TOL.mean * (d - 1)):
        raise DegenerateMean("a leave-one-out circular mean is undefined")
    offsets = np.arctan2(ls, lc) / TWO_PI
    return np.linalg.norm(_residual_components(Y, offsets), axis=1)


@dataclass
class RankedResonance:
    A: np.ndarray
    loo_error: float | None
    warning: str | None = None

    @property
    def key(self):
        return lattice.canonical_form(self.A.tolist())


def _score(X, A) -> RankedResonance:
    A = np.asarray(A, dtype=np.int64)
    try:
        e = loo_errors(X, A)
    except DegenerateMean as exc:
        log.warning("skipping resonance %s: %s", A.tolist(), exc)
        return RankedResonance(A, None, warning=str(exc))
    return RankedResonance(A, float(np.linalg.norm(e) / np.sqrt(e.size)))


def loo_model_selection(X, candidates: Sequence) -> list[RankedResonance]:
    """Rank resonance matrices by leave-one-out mean projection error.

    Candidates whose leave-one-out mean degenerates are kept at the end of
    the list with ``loo_error=None`` and a warning. Ties are broken by the
    Hermite normal form, so the ordering is deterministic.
    """
    X = check_angles(X)
    for A in candidates:
        if not lattice.is_unimodular(np.asarray(A).tolist()):
            raise NotUnimodular(f"candidate {np.asarray(A).tolist()} is not unimodular")
    scored = parallel_map(lambda A: _score(X, A), candidates)
    good = sorted((r for r in scored if r.loo_error is not None), key=lambda r: (r.loo_error, r.key))
    bad = sorted((r for r in scored if r.loo_error is None), key=lambda r: r.key)
    return good + bad


def nested_subtorus_chain(X, C) -> list[SubtorusModel]:
    """Best subtori for the leading ``k`` rows of ``C``, ``k = 1 ... n-1``.

    Offsets are computed row by row, so the first ``k`` entries of ``c`` are
    identical in every model with at least ``k`` rows.
    """
    C = lattice.as_int_matrix(C)
    n = len(C)
    if any(len(row) != n for row in C):
        raise DimensionError("C must be square")
    if abs(lattice.det_int(C)) != 1:
        raise NotUnimodular("C must have determinant +-1")
    return [fit_subtorus(X, C[:k]) for k in range(1, n)]
