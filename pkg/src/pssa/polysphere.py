"""Geodesic submanifolds of polyspheres (S^2)^n and their fits.

Data is an array of shape ``(d, n, 3)``: ``d`` observations of ``n`` unit
vectors. The reachable submanifolds are products of

* sphere components: one factor, or several factors coupled as ``x_f = R_f z``
  with ``R_f`` orthogonal (the diagonal spheres ``{(x, R x)}``);
* circle components: a sphere component restricted to a great circle;
* point components: a sphere component frozen at one point;

with resonance relations among the angles of the circle components, handled
by :mod:`pssa.torus`. A :class:`PolysphereState` holds one such submanifold;
reduction steps (``circle``, ``couple``, ``fix``, ``resonance``) move from a
state to a smaller one.

The tangent-space algebra follows the symmetric pair ``o(3) = h + m`` with
``m(xi) = [[0, -xi^T], [xi, 0]]`` and ``h(A) = diag(0, A)``, for which
``[m(xi), m(zeta)] = h(zeta xi^T - xi zeta^T)`` and ``[h(A), m(xi)] = m(A xi)``.
"""

from __future__ import annotations

import copy
import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import lattice, torus
from .config import TOL, PssaConfig, parallel_map
from .errors import DegenerateBasis, DegenerateMean, DegenerateProjection, DimensionError, NotUnimodular
from .linalg import canonical_sign
from .sphere import fit_subsphere, spherical_mean

E_X = np.array([1.0, 0.0, 0.0])
E_Z = np.array([0.0, 0.0, 1.0])


# --- tangent algebra -------------------------------------------------------

def m_matrix(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    M = np.zeros((3, 3))
    M[1:, 0] = xi
    M[0, 1:] = -xi
    return M


def h_matrix(A) -> np.ndarray:
    H = np.zeros((3, 3))
    H[1:, 1:] = A
    return H


def double_bracket(xi, zeta) -> np.ndarray:
    """``[[xi, zeta]] = zeta xi^T - xi zeta^T``, so that ``[m(xi), m(zeta)] = h([[xi, zeta]])``."""
    xi, zeta = np.asarray(xi, float), np.asarray(zeta, float)
    return np.outer(zeta, xi) - np.outer(xi, zeta)


def triple_bracket(u, v, w) -> np.ndarray:
    """``[[m(u), m(v)], m(w)]`` for block vectors of shape (n, 2), factor by factor."""
    u, v, w = (np.asarray(a, dtype=float) for a in (u, v, w))
    return np.stack([double_bracket(uf, vf) @ wf for uf, vf, wf in zip(u, v, w)])


def lie_triple_check(basis) -> bool:
    """Whether span(basis) ⊂ m + ... + m is closed under ``[[., .], .]``.

    Each basis element is a block vector of shape (n, 2). The brackets are
    trilinear, so they are evaluated on an orthonormalized basis and every
    result is tested for membership in the span.
    """
    B = np.asarray(basis, dtype=float)
    if B.size == 0:
        return True
    if B.ndim == 2:
        B = B[None]
    r, n, _ = B.shape
    flat = B.reshape(r, 2 * n).T
    U, s, _ = np.linalg.svd(flat, full_matrices=False)
    if s[-1] <= 1e-10 * s[0]:
        raise DegenerateBasis("tangent basis vectors are linearly dependent")
    Q = U[:, :r]
    vecs = Q.T.reshape(r, n, 2)
    for i, j in itertools.combinations(range(r), 2):
        for l in range(r):
            t = triple_bracket(vecs[i], vecs[j], vecs[l]).ravel()
            if np.linalg.norm(t - Q @ (Q.T @ t)) > TOL.lie_triple:
                return False
    return True


# --- circles -----------------------------------------------------------------

def circle_frame(axis) -> tuple[np.ndarray, np.ndarray]:
    """Fixed orthonormal frame ``(u, w)`` of the plane orthogonal to ``axis``; ``u x w = axis``."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    u = np.cross(E_Z, axis)
    if np.linalg.norm(u) < 1e-6:
        u = np.cross(E_X, axis)
    u /= np.linalg.norm(u)
    return u, np.cross(axis, u)


def rotation_at(p) -> np.ndarray:
    """A rotation whose first column is the unit vector ``p``."""
    u, w = circle_frame(p)
    return np.column_stack([np.asarray(p, dtype=float), u, w])


def angles_on_circle(points, axis) -> np.ndarray:
    """Angle (turn fraction in [0, 1)) of each point's projection onto the great circle ⊥ axis."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    u, w = circle_frame(axis)
    a, b = P @ u, P @ w
    if np.any(np.hypot(a, b) <= TOL.projection):
        raise DegenerateProjection("a point lies at a pole of the circle")
    return torus.wrap_unit(np.arctan2(b, a) / (2 * np.pi))


def point_on_circle(angles, axis) -> np.ndarray:
    u, w = circle_frame(axis)
    t = 2 * np.pi * np.asarray(angles, dtype=float)[..., None]
    return np.cos(t) * u + np.sin(t) * w


def great_circle_distance(x, y) -> np.ndarray:
    return np.arccos(np.clip(np.sum(np.asarray(x) * np.asarray(y), axis=-1), -1.0, 1.0))


def _unit_rows(P, name="points") -> np.ndarray:
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if P.ndim != 2 or P.shape[1] != 3:
        raise DimensionError(f"{name} must have shape (d, 3), got {P.shape}")
    if np.any(np.abs(np.linalg.norm(P, axis=1) - 1) > TOL.unit_norm):
        raise DimensionError(f"{name} are not unit vectors")
    return P


# --- single-family fits ------------------------------------------------------

@dataclass
class CoupledFit:
    R: np.ndarray
    error: float
    per_point: np.ndarray
    degenerate: bool


def fit_coupled_spheres(x, y) -> CoupledFit:
    """Orthogonal ``R`` minimizing ``sum ||y_i - R x_i||^2`` (orthogonal Procrustes).

    ``R`` ranges over O(3); the two determinant branches of the SVD solution
    are compared in the great-circle error ``sum d(y_i, R x_i)^2``, which is
    what ``error`` reports. ``degenerate`` flags a cross-covariance whose
    smallest singular value vanishes, where ``R`` is not unique.
    """
    x, y = _unit_rows(x, "x"), _unit_rows(y, "y")
    if x.shape != y.shape:
        raise DimensionError("x and y must pair up")
    U, s, Vt = np.linalg.svd(y.T @ x)
    best = None
    for sign in (1.0, -1.0):
        R = U @ np.diag([1.0, 1.0, sign]) @ Vt
        dist = great_circle_distance(y, x @ R.T)
        err = float(np.sum(dist**2))
        if best is None or err < best[1] - 1e-12 * max(1.0, err):
            best = (R, err, dist)
    degenerate = bool(s[0] == 0 or s[-1] <= 1e-10 * s[0])
    return CoupledFit(best[0], best[1], best[2], degenerate)


@dataclass
class FixedFit:
    point: np.ndarray
    error: float
    per_point: np.ndarray


def fit_fixed_factor(points) -> FixedFit:
    """Extrinsic mean of one factor; error is the sum of squared great-circle distances."""
    P = _unit_rows(points)
    y = spherical_mean(P)
    dist = great_circle_distance(P, y)
    return FixedFit(y, float(np.sum(dist**2)), dist)


@dataclass
class CircleFit:
    axis: np.ndarray
    error: float
    per_point: np.ndarray


def fit_circle_factor(points) -> CircleFit:
    """Best great circle of one factor; error is in the projection distance."""
    P = _unit_rows(points)
    if P.shape[0] < 2:
        raise DimensionError("a circle fit needs at least 2 points")
    model = fit_subsphere(P.T, 1)
    return CircleFit(model.complement[:, 0], model.total_error, model.per_point_errors)


# --- model records -----------------------------------------------------------

@dataclass
class CoupledSpheres:
    i: int
    j: int
    R: np.ndarray


@dataclass
class FixedFactor:
    i: int
    y: np.ndarray


@dataclass
class CircleFactor:
    i: int
    axis: np.ndarray


@dataclass
class TorusResonance:
    factors: tuple[int, ...]
    model: torus.SubtorusModel


@dataclass
class Product:
    parts: list


# --- states and reduction steps ----------------------------------------------

@dataclass
class Component:
    """Factors moving together: factor ``f`` sits at ``rotations[f] @ z``."""

    base: int
    rotations: dict[int, np.ndarray]
    status: str = "sphere"            # "sphere" | "circle" | "point"
    axis: np.ndarray | None = None
    point: np.ndarray | None = None

    @property
    def factors(self) -> tuple[int, ...]:
        return tuple(sorted(self.rotations))

    def combined(self, X) -> np.ndarray:
        """``sum_f R_f^T x_f`` for every observation, shape (d, 3)."""
        return sum(X[:, f, :] @ R for f, R in self.rotations.items())

    def project(self, X) -> np.ndarray:
        """Chordal nearest point ``z`` of the component for every observation."""
        if self.status == "point":
            return np.broadcast_to(self.point, (X.shape[0], 3)).copy()
        s = self.combined(X)
        if self.status == "circle":
            s = s - np.outer(s @ self.axis, self.axis)
        norms = np.linalg.norm(s, axis=1)
        if np.any(norms <= TOL.projection):
            raise DegenerateProjection(f"component {self.base}: a point projects to zero")
        return s / norms[:, None]


class Step(NamedTuple):
    kind: str                          # "circle" | "couple" | "fix" | "resonance"
    comps: tuple[int, ...] = ()
    row: tuple[int, ...] | None = None

    def describe(self) -> str:
        if self.kind == "resonance":
            return f"resonance{list(self.row) if self.row is not None else ''}"
        return f"{self.kind}{list(self.comps)}"


@dataclass
class PolysphereState:
    """A geodesic submanifold of (S^2)^n under construction."""

    n: int
    comps: list[Component]
    circles: list[int] = field(default_factory=list)
    A: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=np.int64))
    c: np.ndarray = field(default_factory=lambda: np.zeros(0))
    steps: tuple[Step, ...] = ()

    @classmethod
    def root(cls, n: int) -> "PolysphereState":
        if n < 1:
            raise DimensionError("need at least one factor")
        return cls(n, [Component(i, {i: np.eye(3)}) for i in range(n)], A=np.zeros((0, 0), dtype=np.int64))

    def comp(self, base: int) -> Component:
        for c in self.comps:
            if c.base == base:
                return c
        raise KeyError(base)

    @property
    def k(self) -> int:
        return self.A.shape[0]

    @property
    def torus_dim(self) -> int:
        return len(self.circles) - self.k

    @property
    def dim(self) -> int:
        return 2 * sum(c.status == "sphere" for c in self.comps) + self.torus_dim

    @property
    def label(self) -> str:
        parts = ["S2"] * sum(c.status == "sphere" for c in self.comps) + ["S1"] * self.torus_dim
        return "x".join(parts) if parts else "point"

    def signature(self) -> tuple:
        comps = tuple(sorted((c.factors, c.status) for c in self.comps))
        return comps, tuple(sorted(self.circles)), self.k

    # -- data maps --

    def circle_angles(self, X) -> np.ndarray:
        cols = [angles_on_circle(self.comp(b).project(X), self.comp(b).axis) for b in self.circles]
        return np.column_stack(cols) if cols else np.zeros((X.shape[0], 0))

    def completion(self) -> np.ndarray:
        if self.k == 0:
            return np.eye(len(self.circles), dtype=np.int64)
        return lattice.complete_to_unimodular(self.A)

    def torus_coordinates(self, X) -> np.ndarray:
        """Free coordinates of the circle angles on the current subtorus."""
        theta = self.circle_angles(X)
        C = self.completion()
        return torus.wrap_unit(theta @ C[self.k:].T)

    def sphere_residuals(self, X) -> np.ndarray:
        """Per observation: ``sum_f (||x_f - p_f|| / 2)^2`` over every factor."""
        total = np.zeros(X.shape[0])
        for comp in self.comps:
            z = comp.project(X)
            for f, R in comp.rotations.items():
                total += np.sum((X[:, f, :] - z @ R.T) ** 2, axis=1) / 4.0
        return total

    def torus_residuals(self, X) -> np.ndarray:
        if self.k == 0:
            return np.zeros(X.shape[0])
        theta = self.circle_angles(X)
        return np.sum(torus._residual_components(theta @ self.A.T, self.c) ** 2, axis=1)

    def point_errors(self, X) -> np.ndarray:
        return np.sqrt(self.sphere_residuals(X) + self.torus_residuals(X))

    def project(self, x) -> dict:
        """Intrinsic coordinates of one observation: component points and torus coordinates."""
        X = check_polysphere_data(np.asarray(x, dtype=float).reshape(1, self.n, 3))
        coords = {c.base: c.project(X)[0] for c in self.comps if c.status == "sphere"}
        return {"spheres": coords, "torus": self.torus_coordinates(X)[0]}

    def lift(self, coords: dict) -> np.ndarray:
        out = np.zeros((self.n, 3))
        theta = np.zeros(len(self.circles))
        if self.circles:
            C = self.completion()
            full = np.concatenate([self.c, np.asarray(coords["torus"], dtype=float)])
            inv = np.array(lattice.rational_inverse(C.tolist()), dtype=float)
            theta = torus.wrap_unit(inv @ full)
        for comp in self.comps:
            if comp.status == "sphere":
                z = np.asarray(coords["spheres"][comp.base], dtype=float)
            elif comp.status == "circle":
                z = point_on_circle(theta[self.circles.index(comp.base)], comp.axis)
            else:
                z = comp.point
            for f, R in comp.rotations.items():
                out[f] = R @ z
        return out

    # -- descriptions --

    def constraints(self) -> Product:
        parts: list = []
        for comp in self.comps:
            base_R = comp.rotations[comp.base]
            for f, R in sorted(comp.rotations.items()):
                if f != comp.base:
                    parts.append(CoupledSpheres(comp.base, f, R @ base_R.T))
            if comp.status == "circle":
                parts.extend(CircleFactor(f, R @ comp.axis) for f, R in sorted(comp.rotations.items()))
            elif comp.status == "point":
                parts.extend(FixedFactor(f, R @ comp.point) for f, R in sorted(comp.rotations.items()))
        if self.k:
            model = torus.SubtorusModel(A=self.A.copy(), c=self.c.copy())
            parts.append(TorusResonance(tuple(self.circles), model))
        return Product(parts)

    def tangent_basis(self) -> np.ndarray:
        """Basis of the Lie triple system of this submanifold, as block vectors (r, n, 2).

        Each factor is moved to the origin ``e_1`` by :func:`rotation_at` of a
        reference point; a coupling ``x_f = R_f z`` then acts on tangent
        coordinates through the 2 x 2 block of ``g_f^T R_f g_base``.
        """
        vectors = []
        circle_vecs = {}
        for comp in self.comps:
            if comp.status == "point":
                continue
            ref = point_on_circle(0.0, comp.axis) if comp.status == "circle" else E_X
            g_base = rotation_at(ref)
            blocks = {}
            for f, R in comp.rotations.items():
                g_f = rotation_at(R @ ref / np.linalg.norm(R @ ref))
                blocks[f] = (g_f.T @ R @ g_base)[1:, 1:]
            if comp.status == "sphere":
                dirs = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
            else:
                t = np.cross(comp.axis, ref)
                dirs = [(g_base.T @ t)[1:]]
            made = []
            for xi in dirs:
                v = np.zeros((self.n, 2))
                for f, B in blocks.items():
                    v[f] = B @ xi
                made.append(v)
            if comp.status == "sphere":
                vectors.extend(made)
            else:
                circle_vecs[comp.base] = made[0]
        if self.circles:
            taus = np.stack([circle_vecs[b] for b in self.circles])
            if self.k:
                _, s, Vt = np.linalg.svd(self.A.astype(float))
                null = Vt[self.k:]
            else:
                null = np.eye(len(self.circles))
            vectors.extend(np.tensordot(alpha, taus, axes=1) for alpha in null)
        return np.array(vectors).reshape(len(vectors), self.n, 2)

    def to_dict(self) -> dict:
        from .report import encode_constraints
        return {
            "label": self.label,
            "steps": [s.describe() for s in self.steps],
            "constraints": encode_constraints(self.constraints()),
        }


def check_polysphere_data(X, renormalize: bool = False) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 3 or X.shape[2] != 3 or 0 in X.shape:
        raise DimensionError(f"polysphere data must have shape (d, n, 3), got {X.shape}")
    norms = np.linalg.norm(X, axis=2)
    if renormalize:
        if np.any(norms <= TOL.projection):
            from .errors import NonUnitData
            raise NonUnitData("cannot renormalize a zero factor")
        return X / norms[..., None]
    if np.any(np.abs(norms - 1) > TOL.unit_norm):
        from .errors import NonUnitData
        raise NonUnitData("polysphere factors must be unit vectors")
    return X


def _fit_circle(comp: Component, X) -> np.ndarray:
    # exact least squares for coupled factors: stack R_f^T x_f over all factors
    stacked = np.vstack([X[:, f, :] @ R for f, R in comp.rotations.items()])
    return canonical_sign(fit_subsphere(stacked.T, 1).complement[:, 0])


def apply_step(state: PolysphereState, step: Step, X=None) -> PolysphereState:
    """Child state after one reduction step, fitted to ``X`` (placeholders if ``X`` is None)."""
    new = copy.deepcopy(state)
    new.steps = state.steps + (step,)
    if step.kind == "circle":
        comp = new.comp(step.comps[0])
        if comp.status != "sphere":
            raise DimensionError(f"component {comp.base} is not a sphere")
        comp.axis = E_Z.copy() if X is None else _fit_circle(comp, X)
        comp.status = "circle"
        new.circles.append(comp.base)
        new.A = np.hstack([new.A.reshape(new.k, len(new.circles) - 1), np.zeros((new.k, 1), dtype=np.int64)])
    elif step.kind == "fix":
        comp = new.comp(step.comps[0])
        if comp.status != "sphere":
            raise DimensionError(f"component {comp.base} is not a sphere")
        comp.point = E_X.copy() if X is None else spherical_mean(comp.combined(X))
        comp.status = "point"
    elif step.kind == "couple":
        a, b = (new.comp(i) for i in step.comps)
        if a.status != "sphere" or b.status != "sphere":
            raise DimensionError("only sphere components can be coupled")
        if X is None:
            R = np.eye(3)
        else:
            R = fit_coupled_spheres(a.project(X), b.project(X)).R
        for f, Rf in b.rotations.items():
            a.rotations[f] = Rf @ R
        new.comps = [c for c in new.comps if c.base != b.base]
    elif step.kind == "resonance":
        row = np.asarray(step.row, dtype=np.int64)
        if new.torus_dim < 1 or row.size != new.torus_dim:
            raise DimensionError(f"resonance row must have {new.torus_dim} entries")
        C = state.completion()
        full_row = row @ C[state.k:]
        A = np.vstack([state.A.reshape(state.k, len(state.circles)), full_row]).astype(np.int64)
        if not lattice.is_unimodular(A.tolist()):
            raise NotUnimodular(f"resonance {row.tolist()} is not primitive")
        new.A = A
        if X is None:
            new.c = np.append(state.c, 0.0)
        else:
            y = state.circle_angles(X) @ full_row
            new.c = np.append(state.c, torus.circular_mean(y))
    else:
        raise ValueError(f"unknown step kind {step.kind!r}")
    return new


def child_steps(state: PolysphereState, config: PssaConfig = PssaConfig()) -> list[Step]:
    """One-step reductions available from ``state``."""
    steps = []
    spheres = [c for c in state.comps if c.status == "sphere"]
    for c in spheres:
        steps.append(Step("circle", (c.base,)))
    if config.allow_sphere_to_point:
        steps.extend(Step("fix", (c.base,)) for c in spheres)
    for a, b in itertools.combinations(spheres, 2):
        if len(a.rotations) + len(b.rotations) <= config.max_coupling_group:
            steps.append(Step("couple", (a.base, b.base)))
    if state.torus_dim >= 1:
        for A in torus.enumerate_resonances(state.torus_dim, 1, config.resonance_bound):
            steps.append(Step("resonance", (), tuple(int(v) for v in A[0])))
    return steps


class ModelTemplate(NamedTuple):
    steps: tuple[Step, ...]
    label: str
    dim: int


def enumerate_polysphere_models(n: int, config: PssaConfig = PssaConfig()) -> list[ModelTemplate]:
    """Every model shape reachable from (S^2)^n, one template per shape.

    Resonance steps appear with ``row=None``: the concrete relation is chosen
    when the template is fitted (see :func:`fit_polysphere_model`), from
    :func:`pssa.torus.enumerate_resonances` with the configured bound.
    """
    root = PolysphereState.root(n)
    seen = {root.signature(): root}
    frontier = [root]
    while frontier:
        nxt = []
        for state in frontier:
            for step in child_steps(state, PssaConfig(**{**config.to_dict(), "resonance_bound": 2})):
                symbolic = step
                if step.kind == "resonance":
                    step = Step("resonance", (), (1,) + (0,) * (state.torus_dim - 1))
                    symbolic = Step("resonance", (), None)
                child = apply_step(state, step)
                child.steps = state.steps + (symbolic,)
                key = child.signature()
                if key not in seen:
                    seen[key] = child
                    nxt.append(child)
        frontier = nxt
    states = sorted(seen.values(), key=lambda s: (-s.dim, s.label, [st.describe() for st in s.steps]))
    return [ModelTemplate(s.steps, s.label, s.dim) for s in states]


@dataclass
class PolysphereModel:
    state: PolysphereState
    per_point_errors: np.ndarray
    sphere_errors: np.ndarray
    torus_errors: np.ndarray
    total_error: float
    loo_error: float | None = None

    @property
    def label(self) -> str:
        return self.state.label

    @property
    def dim(self) -> int:
        return self.state.dim

    def constraints(self) -> Product:
        return self.state.constraints()

    def project(self, x) -> dict:
        return self.state.project(x)

    def lift(self, coords) -> np.ndarray:
        return self.state.lift(coords)


def evaluate_state(state: PolysphereState, X) -> PolysphereModel:
    sph = np.sqrt(state.sphere_residuals(X))
    tor = np.sqrt(state.torus_residuals(X))
    per_point = np.sqrt(sph**2 + tor**2)
    return PolysphereModel(state, per_point, sph, tor, float(np.linalg.norm(per_point)))


def _best_resonance(state: PolysphereState, X, bound: int) -> Step:
    best = None
    for A in torus.enumerate_resonances(state.torus_dim, 1, bound):
        step = Step("resonance", (), tuple(int(v) for v in A[0]))
        try:
            err = evaluate_state(apply_step(state, step, X), X).total_error
        except (DegenerateMean, DegenerateProjection):
            continue
        if best is None or err < best[0] - 1e-12:
            best = (err, step)
    if best is None:
        raise DegenerateMean("no resonance relation could be fitted")
    return best[1]


def resolve_template(X, template, config: PssaConfig = PssaConfig()) -> tuple[Step, ...]:
    """Concrete steps for a template, choosing unspecified resonances by training error."""
    X = check_polysphere_data(X)
    steps = template.steps if isinstance(template, ModelTemplate) else tuple(template)
    state = PolysphereState.root(X.shape[1])
    concrete = []
    for step in steps:
        if step.kind == "resonance" and step.row is None:
            step = _best_resonance(state, X, config.resonance_bound)
        state = apply_step(state, step, X)
        concrete.append(step)
    return tuple(concrete)


def fit_polysphere_model(X, template, config: PssaConfig = PssaConfig()) -> PolysphereModel:
    """Fit a template's reduction steps in order and report per-point errors.

    The aggregate per-point error combines, in quadrature, the chordal
    residual ``||x_f - p_f|| / 2`` of every factor (``p`` the nearest point of
    the fitted sphere-type part) and the torus residual of the resonance
    relations; both parts are kept separately as ``sphere_errors`` and
    ``torus_errors``.
    """
    X = check_polysphere_data(X)
    state = PolysphereState.root(X.shape[1])
    for step in resolve_template(X, template, config):
        state = apply_step(state, step, X)
    return evaluate_state(state, X)


def polysphere_loo_error(X, template, config: PssaConfig = PssaConfig()) -> float:
    """Root-mean-square leave-one-out error of a template (resonances fixed from the full fit)."""
    X = check_polysphere_data(X)
    d = X.shape[0]
    if d < 2:
        raise DimensionError("leave-one-out needs at least 2 points")
    steps = resolve_template(X, template, config)

    def one(i):
        keep = np.delete(X, i, axis=0)
        state = PolysphereState.root(X.shape[1])
        for step in steps:
            state = apply_step(state, step, keep)
        return state.point_errors(X[i:i + 1])[0]

    errs = np.array(parallel_map(one, range(d)))
    return float(np.sqrt(np.mean(errs**2)))


def step_loo_error(parent: PolysphereState, step: Step, X) -> float:
    """Leave-one-out error of one reduction step with the parent state held fixed."""
    d = X.shape[0]
    if step.kind == "resonance":
        child = apply_step(parent, step, X)
        theta = parent.circle_angles(X)
        y = theta @ child.A[-1]
        e_new = torus.loo_errors(y[:, None], np.eye(1, dtype=np.int64))
        base = parent.sphere_residuals(X) + parent.torus_residuals(X)
        return float(np.sqrt(np.mean(base + e_new**2)))
    errs = np.empty(d)
    for i in range(d):
        child = apply_step(parent, step, np.delete(X, i, axis=0))
        errs[i] = child.point_errors(X[i:i + 1])[0]
    return float(np.sqrt(np.mean(errs**2)))
