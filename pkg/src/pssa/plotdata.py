"""Sampled curves and projected points for plotting fitted models.

Each section is a flat CSV table with a ``node`` column holding the node id
from :func:`pssa.report.iter_nodes` (``0.1.0`` style paths for trees, list
positions for fit reports).
"""

from __future__ import annotations

import io

import numpy as np

from . import lattice, report, torus
from .errors import UnknownReportSection
from .polysphere import angles_on_circle, point_on_circle

SAMPLES = 512
SECTIONS = ("circles", "geodesics", "factor-circles", "projections")


def _ts():
    return np.arange(SAMPLES) / SAMPLES


def great_circles(doc) -> tuple[list[str], list[list]]:
    rows = []
    width = 0
    for nid, node in report.iter_nodes(doc):
        m = node["model"]
        if m["kind"] == "subsphere" and node["dim"] == 1:
            B = np.array(m["basis"])
            t = 2 * np.pi * _ts()
            pts = np.outer(np.cos(t), B[:, 0]) + np.outer(np.sin(t), B[:, 1])
            width = pts.shape[1]
            rows.extend([nid, i, *p] for i, p in enumerate(pts))
    return ["node", "sample"] + [f"x{j}" for j in range(width)], rows


def closed_geodesics(doc) -> tuple[list[str], list[list]]:
    rows = []
    width = 0
    for nid, node in report.iter_nodes(doc):
        m = node["model"]
        if m["kind"] == "subtorus" and node["dim"] == 1:
            C = m["completion"]
            inv = np.array(lattice.rational_inverse(C), dtype=float)
            full = np.column_stack([np.tile(m["c"], (SAMPLES, 1)), _ts()])
            pts = torus.wrap_unit(full @ inv.T)
            width = pts.shape[1]
            rows.extend([nid, i, *p] for i, p in enumerate(pts))
    return ["node", "sample"] + [f"x{j}" for j in range(width)], rows


def _circle_constraints(node):
    m = node["model"]
    if m["kind"] != "polysphere":
        return []
    return [(c["i"], np.array(c["axis"])) for c in m["constraints"] if c["type"] == "circle_factor"]


def factor_circles(doc) -> tuple[list[str], list[list]]:
    rows = []
    for nid, node in report.iter_nodes(doc):
        for f, axis in _circle_constraints(node):
            pts = point_on_circle(_ts(), axis)
            rows.extend([nid, f, i, *p] for i, p in enumerate(pts))
    return ["node", "factor", "sample", "x", "y", "z"], rows


def projections(doc, data) -> tuple[list[str], list[list]]:
    """Projected data points: sphere circles, subtorus coordinates, or polysphere circle angles."""
    if data is None:
        raise UnknownReportSection("the projections section needs the input dataset")
    kind = doc["manifold"]["type"]
    rows = []
    if kind == "sphere":
        X = np.asarray(data, dtype=float)           # rows are points
        for nid, node in report.iter_nodes(doc):
            m = node["model"]
            if m["kind"] == "subsphere" and node["dim"] >= 1:
                B = np.array(m["basis"])
                P = (X @ B) @ B.T
                P /= np.linalg.norm(P, axis=1, keepdims=True)
                rows.extend([nid, i, *p] for i, p in enumerate(P))
        header = ["node", "point"] + [f"x{j}" for j in range(np.asarray(data).shape[1])]
    elif kind == "torus":
        X = torus.check_angles(data)
        for nid, node in report.iter_nodes(doc):
            m = node["model"]
            if m["kind"] == "subtorus" and node["dim"] >= 1:
                C = np.array(m["completion"])
                Y = torus.wrap_unit(X @ C[len(m["A"]):].T)
                rows.extend([nid, i, j, v] for i, y in enumerate(Y) for j, v in enumerate(y))
        header = ["node", "point", "coordinate", "value"]
    elif kind == "polysphere":
        X = np.asarray(data, dtype=float)
        for nid, node in report.iter_nodes(doc):
            for f, axis in _circle_constraints(node):
                ang = angles_on_circle(X[:, f, :], axis)
                rows.extend([nid, i, f, a] for i, a in enumerate(ang))
        header = ["node", "point", "factor", "angle"]
    else:
        raise UnknownReportSection(f"no projections for {kind} reports")
    return header, rows


def section(doc, what: str, data=None) -> tuple[list[str], list[list]]:
    if what == "circles":
        header, rows = great_circles(doc)
    elif what == "geodesics":
        header, rows = closed_geodesics(doc)
    elif what == "factor-circles":
        header, rows = factor_circles(doc)
    elif what == "projections":
        header, rows = projections(doc, data)
    else:
        raise UnknownReportSection(f"unknown section {what!r}; choose from {', '.join(SECTIONS)}")
    if not rows:
        raise UnknownReportSection(f"report has no nodes for section {what!r}")
    return header, rows


def to_csv(header, rows) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(repr(float(v)) if isinstance(v, (float, np.floating)) else str(v) for v in row) + "\n")
    return out.getvalue()
