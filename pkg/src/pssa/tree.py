"""The rooted tree of nested symmetric space approximations.

The root node is the whole manifold with error 0. The children of a node are
best fits of the node's data, one per model family, ranked by the configured
selection criterion and truncated. Each child re-fits the data expressed in
its own intrinsic coordinates, down to ``config.min_dim``.

Sphere and Grassmannian nodes recurse on the unnormalized intrinsic
coordinates ``B^T x``; these have the same singular values as the ambient
data, so node errors along the chain equal the singular-value tails of the
direct nested fit. The normalized projections are available through the
models' ``project`` methods.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import lattice, polysphere, report, torus
from .config import PssaConfig, parallel_map
from .errors import DimensionError, NumericalError
from .grassmann import stack_planes
from .linalg import singular_spectrum
from .sphere import check_unit_columns

log = logging.getLogger(__name__)


# --- descriptors -------------------------------------------------------------

@dataclass(frozen=True)
class Sphere:
    n: int

    @property
    def dim(self) -> int:
        return self.n

    def to_dict(self) -> dict:
        return {"type": "sphere", "n": self.n}


@dataclass(frozen=True)
class Grassmannian:
    k: int
    n: int

    @property
    def dim(self) -> int:
        return self.k * (self.n - self.k)

    def to_dict(self) -> dict:
        return {"type": "grassmannian", "k": self.k, "n": self.n}


@dataclass(frozen=True)
class Torus:
    n: int

    @property
    def dim(self) -> int:
        return self.n

    def to_dict(self) -> dict:
        return {"type": "torus", "n": self.n}


@dataclass(frozen=True)
class Polysphere:
    n: int

    @property
    def dim(self) -> int:
        return 2 * self.n

    def to_dict(self) -> dict:
        return {"type": "polysphere", "n": self.n}


Descriptor = Sphere | Grassmannian | Torus | Polysphere


def descriptor_from_dict(d: dict) -> Descriptor:
    kind = d.get("type")
    if kind == "sphere":
        desc = Sphere(int(d["n"]))
    elif kind == "grassmannian":
        desc = Grassmannian(int(d["k"]), int(d["n"]))
    elif kind == "torus":
        desc = Torus(int(d["n"]))
    elif kind == "polysphere":
        desc = Polysphere(int(d["n"]))
    else:
        raise DimensionError(f"unknown manifold type {kind!r}")
    _check_descriptor(desc)
    return desc


def _check_descriptor(desc: Descriptor) -> None:
    if isinstance(desc, Grassmannian):
        if not 0 < desc.k < desc.n:
            raise DimensionError(f"Grassmannian needs 0 < k < n, got k={desc.k}, n={desc.n}")
    elif desc.n < 1:
        raise DimensionError(f"dimension must be positive, got {desc.n}")


# --- nodes -------------------------------------------------------------------

@dataclass
class PssaNode:
    """One node of the tree. ``fitted`` holds the live model object and is not serialized."""

    descriptor: dict
    dim: int
    model: dict
    fit_error: float | None
    loo_error: float | None = None
    children: list["PssaNode"] = field(default_factory=list)
    warning: str | None = None
    fitted: object = field(default=None, compare=False, repr=False)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def paths(self):
        """Every root-to-leaf path as a list of nodes."""
        if not self.children:
            return [[self]]
        return [[self] + p for child in self.children for p in child.paths()]


def _identity(desc: Descriptor) -> PssaNode:
    return PssaNode(desc.to_dict(), desc.dim, {"kind": "identity"}, 0.0)


def _failed(descriptor: dict, dim: int, what: str, exc: Exception) -> PssaNode:
    log.warning("fit of %s failed: %s", what, exc)
    return PssaNode(descriptor, dim, {"kind": "failed", "step": what}, None, warning=f"{type(exc).__name__}: {exc}")


def build_tree(X, root, config: PssaConfig = PssaConfig()) -> PssaNode:
    """Build the tree of nested approximations of ``X`` in the manifold ``root``.

    Parameters
    ----------
    X : array_like
        Sphere: ``(n+1, d)`` with unit columns. Grassmannian: sequence of
        ``n x k`` frames. Torus: ``(d, n)`` angles. Polysphere: ``(d, n, 3)``.
    root : Sphere, Grassmannian, Torus, Polysphere or dict
    config : PssaConfig
    """
    if isinstance(root, dict):
        root = descriptor_from_dict(root)
    _check_descriptor(root)
    node = _identity(root)
    if root.dim <= config.min_dim:
        _validate_only(X, root)
        return node
    if isinstance(root, Sphere):
        X = check_unit_columns(X)
        if X.shape[0] != root.n + 1:
            raise DimensionError(f"S^{root.n} data needs {root.n + 1} rows, got {X.shape[0]}")
        _grow_sphere(node, X, np.eye(root.n + 1), config)
    elif isinstance(root, Grassmannian):
        stacked, n, k = stack_planes(X)
        if (n, k) != (root.n, root.k):
            raise DimensionError(f"G({root.k},{root.n}) data has frames of shape {(n, k)}")
        _grow_grassmann(node, stacked, k, np.eye(n), np.zeros((n, 0)), config)
    elif isinstance(root, Torus):
        X = torus.check_angles(X)
        if X.shape[1] != root.n:
            raise DimensionError(f"T^{root.n} data needs {root.n} angles per row, got {X.shape[1]}")
        _grow_torus(node, X, np.zeros((0, root.n), dtype=np.int64), config)
    else:
        X = polysphere.check_polysphere_data(X)
        if X.shape[1] != root.n:
            raise DimensionError(f"(S^2)^{root.n} data has {X.shape[1]} factors")
        node.fitted = polysphere.PolysphereState.root(root.n)
        _grow_polysphere(node, X, node.fitted, config)
    return node


def _validate_only(X, root) -> None:
    if isinstance(root, Sphere):
        check_unit_columns(X)
    elif isinstance(root, Grassmannian):
        stack_planes(X)
    elif isinstance(root, Torus):
        torus.check_angles(X)
    else:
        polysphere.check_polysphere_data(X)


# --- spheres -----------------------------------------------------------------

def _grow_sphere(node: PssaNode, Y, basis, config: PssaConfig) -> None:
    m = node.dim
    if m <= config.min_dim:
        return
    err = node.fit_error
    if m == 1 and config.point_fallback == "mean":
        total = Y.sum(axis=1)
        norm = np.linalg.norm(total)
        if norm <= 1e-10 * Y.shape[1]:
            node.children.append(_failed({"type": "point"}, 0, "point", NumericalError("mean is zero")))
            return
        p = total / norm
        cosines = (p @ Y) / np.linalg.norm(Y, axis=0)
        theta = np.arccos(np.clip(cosines, -1.0, 1.0))
        child = PssaNode({"type": "point"}, 0, {"kind": "point", "point": (basis @ p).tolist()},
                         float(np.sqrt(err**2 + np.sum(theta**2))))
        node.children.append(child)
        return
    U, s = singular_spectrum(Y)
    sub = U[:, 1:]
    model = {
        "kind": "subsphere",
        "basis": (basis @ sub).tolist(),
        "complement": (basis @ U[:, :1]).tolist(),
        "singular_values": s.tolist(),
    }
    child = PssaNode({"type": "sphere", "n": m - 1}, m - 1, model, float(np.hypot(err, s[0])))
    node.children.append(child)
    _grow_sphere(child, sub.T @ Y, basis @ sub, config)


# --- Grassmannians -----------------------------------------------------------

def _grow_grassmann(node: PssaNode, Y, k: int, basis, complement, config: PssaConfig) -> None:
    m = basis.shape[1]
    if node.dim <= config.min_dim or m <= k:
        return
    U, s = singular_spectrum(Y)
    sub = basis @ U[:, 1:]
    comp = np.hstack([complement, basis @ U[:, :1]])
    model = {
        "kind": "subgrassmannian",
        "basis": sub.tolist(),
        "complement": comp.tolist(),
        "singular_values": s.tolist(),
    }
    child = PssaNode({"type": "grassmannian", "k": k, "n": m - 1}, k * (m - 1 - k), model,
                     float(np.hypot(node.fit_error, s[0])))
    node.children.append(child)
    _grow_grassmann(child, U[:, 1:].T @ Y, k, sub, comp, config)


# --- tori --------------------------------------------------------------------

def torus_model_dict(model: torus.SubtorusModel) -> dict:
    return {
        "kind": "subtorus",
        "A": model.A.tolist(),
        "c": model.c.tolist(),
        "completion": model.completion.tolist(),
        "dual_basis": model.dual_basis().to_strings(),
        "mean_error": model.mean_error,
        "per_direction_errors": model.per_direction_errors.tolist(),
    }


def _score_torus(X, A, selection):
    model = torus.fit_subtorus(X, A)
    e = torus.loo_errors(X, A) if X.shape[0] > 1 else np.full(1, np.nan)
    model.loo_error = float(np.sqrt(np.mean(e**2)))
    score = model.loo_error if selection == "loo" else model.mean_error
    return score, model


def _grow_torus(node: PssaNode, X, A, config: PssaConfig) -> None:
    n = X.shape[1]
    k = A.shape[0]
    t = n - k
    if t <= config.min_dim:
        return
    C = lattice.complete_to_unimodular(A) if k else np.eye(n, dtype=np.int64)
    candidates = [np.vstack([A, a @ C[k:]]) for a in torus.enumerate_resonances(t, 1, config.resonance_bound)]

    def score(Ac):
        try:
            return _score_torus(X, Ac, config.selection)
        except NumericalError as exc:
            return exc

    results = parallel_map(score, candidates)
    ok, failed = [], []
    for Ac, res in zip(candidates, results):
        (failed if isinstance(res, Exception) else ok).append((Ac, res))
    ok.sort(key=lambda item: (item[1][0], lattice.canonical_form(item[0].tolist())))
    child_desc = {"type": "torus", "n": t - 1} if t > 1 else {"type": "point"}
    for Ac, (_, model) in ok[:config.max_children_per_node]:
        child = PssaNode(child_desc, t - 1, torus_model_dict(model), model.total_error, model.loo_error,
                         fitted=model)
        node.children.append(child)
    for Ac, exc in failed[:max(0, config.max_children_per_node - len(ok))]:
        node.children.append(_failed(child_desc, t - 1, f"resonance {Ac.tolist()}", exc))
    for child in node.children:
        if child.fitted is not None:
            _grow_torus(child, X, child.fitted.A, config)


# --- polyspheres -------------------------------------------------------------

def polysphere_model_dict(model: polysphere.PolysphereModel) -> dict:
    return {
        "kind": "polysphere",
        **model.state.to_dict(),
        "sphere_error": float(np.linalg.norm(model.sphere_errors)),
        "torus_error": float(np.linalg.norm(model.torus_errors)),
    }


def _grow_polysphere(node: PssaNode, X, state: polysphere.PolysphereState, config: PssaConfig) -> None:
    if state.dim <= config.min_dim:
        return
    steps = polysphere.child_steps(state, config)

    def fit(step):
        try:
            child = polysphere.apply_step(state, step, X)
            model = polysphere.evaluate_state(child, X)
            model.loo_error = polysphere.step_loo_error(state, step, X) if X.shape[0] > 1 else None
            return model
        except NumericalError as exc:
            return exc

    results = parallel_map(fit, steps)
    by_dim: dict[int, list] = {}
    failed = []
    for step, res in zip(steps, results):
        if isinstance(res, Exception):
            failed.append((step, res))
        else:
            by_dim.setdefault(res.dim, []).append((step, res))

    def key(item):
        step, model = item
        score = model.loo_error if config.selection == "loo" and model.loo_error is not None else model.total_error
        return (score, step.kind, step.comps, step.row or ())

    for dim in sorted(by_dim, reverse=True):
        for step, model in sorted(by_dim[dim], key=key)[:config.max_children_per_node]:
            desc = {"type": "product", "label": model.label} if model.dim else {"type": "point"}
            child = PssaNode(desc, model.dim, polysphere_model_dict(model), model.total_error, model.loo_error,
                             fitted=model)
            node.children.append(child)
    for step, exc in failed[:config.max_children_per_node]:
        node.children.append(_failed({"type": "product"}, 0, step.describe(), exc))
    for child in node.children:
        if child.fitted is not None:
            _grow_polysphere(child, X, child.fitted.state, config)


# --- projection and (de)serialization ----------------------------------------

def project_to_submanifold(x, model):
    """Intrinsic coordinates of ``x`` on a fitted submodel (any module's model object)."""
    if isinstance(model, PssaNode):
        model = model.fitted
    if model is None or not hasattr(model, "project"):
        raise TypeError("model has no intrinsic coordinates")
    return model.project(x)


def node_to_dict(node: PssaNode) -> dict:
    return report.plain({
        "descriptor": node.descriptor,
        "dim": node.dim,
        "model": node.model,
        "fit_error": node.fit_error,
        "loo_error": node.loo_error,
        "warning": node.warning,
        "children": [node_to_dict(c) for c in node.children],
    })


def node_from_dict(d: dict) -> PssaNode:
    return PssaNode(
        descriptor=d["descriptor"],
        dim=d["dim"],
        model=d["model"],
        fit_error=d["fit_error"],
        loo_error=d["loo_error"],
        children=[node_from_dict(c) for c in d["children"]],
        warning=d["warning"],
    )


def serialize_tree(node: PssaNode, manifold=None, config: PssaConfig = PssaConfig(), run: dict | None = None) -> dict:
    """Report document for a tree; pass it to :func:`pssa.report.dumps` for the JSON text.

    ``run`` adds details of the invocation (command, input digest) to the provenance.
    """
    if manifold is None:
        manifold = node.descriptor
    elif not isinstance(manifold, dict):
        manifold = manifold.to_dict()
    return report.document("tree", manifold, config, run, root=node_to_dict(node))


def parse_tree(doc: dict) -> PssaNode:
    if doc.get("report_type") != "tree":
        raise DimensionError("document is not a tree report")
    return node_from_dict(doc["root"])
