"""Dataset files: CSV (with ``#`` header lines) and JSON.

CSV layouts, one observation per row unless noted:

* sphere: ``n+1`` coordinates;
* torus: ``n`` angles in [0, 1);
* polysphere: ``3n`` coordinates, factor by factor;
* grassmannian: ``k`` consecutive rows per plane (one frame column per row,
  ``n`` entries each), planes separated by a blank line.

Header lines look like ``# key: value``; a ``manifold`` key names the layout.
Floats are written with ``repr`` so files round-trip exactly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionError
from .tree import Grassmannian, Polysphere, Sphere, Torus, descriptor_from_dict

MANIFOLDS = ("sphere", "grassmannian", "torus", "polysphere")


@dataclass
class Dataset:
    manifold: str
    data: object                   # array, or list of frames for Grassmannians
    header: dict = field(default_factory=dict)

    @property
    def descriptor(self):
        if self.manifold == "sphere":
            return Sphere(self.data.shape[1] - 1)
        if self.manifold == "torus":
            return Torus(self.data.shape[1])
        if self.manifold == "polysphere":
            return Polysphere(self.data.shape[1])
        n, k = self.data[0].shape
        return Grassmannian(k, n)

    def fit_input(self):
        """Data in the layout the fitting functions expect."""
        if self.manifold == "sphere":
            return self.data.T
        return self.data


def _fmt(v) -> str:
    return repr(float(v))


def dumps_csv(manifold: str, data, header: dict | None = None) -> str:
    out = io.StringIO()
    out.write(f"# manifold: {manifold}\n")
    for key, value in (header or {}).items():
        out.write(f"# {key}: {value}\n")
    if manifold == "grassmannian":
        blocks = [
            "\n".join(",".join(_fmt(v) for v in col) for col in np.asarray(F).T)
            for F in data
        ]
        out.write("\n\n".join(blocks) + "\n")
    else:
        arr = np.asarray(data, dtype=float)
        if manifold == "polysphere":
            arr = arr.reshape(arr.shape[0], -1)
        for row in arr:
            out.write(",".join(_fmt(v) for v in row) + "\n")
    return out.getvalue()


def _parse_csv(text: str, manifold: str | None) -> Dataset:
    header: dict = {}
    blocks: list[list[list[float]]] = [[]]
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if stripped.startswith("#"):
            key, sep, value = stripped[1:].partition(":")
            if sep:
                header[key.strip()] = value.strip()
            continue
        if not stripped:
            if blocks[-1]:
                blocks.append([])
            continue
        try:
            row = [float(v) for v in next(csv.reader([stripped]))]
        except ValueError as exc:
            raise DimensionError(f"line {lineno}: {exc}") from None
        blocks[-1].append(row)
    blocks = [b for b in blocks if b]
    manifold = manifold or header.get("manifold")
    if manifold not in MANIFOLDS:
        raise DimensionError(f"unknown or missing manifold {manifold!r}")
    if not blocks:
        raise DimensionError("dataset has no rows")
    if manifold == "grassmannian":
        frames = []
        for i, b in enumerate(blocks):
            if len({len(r) for r in b}) != 1:
                raise DimensionError(f"plane {i} has ragged rows")
            frames.append(np.array(b).T)
        return Dataset(manifold, frames, header)
    rows = [r for b in blocks for r in b]
    if len({len(r) for r in rows}) != 1:
        raise DimensionError("rows have different lengths")
    return Dataset(manifold, _shape(manifold, np.array(rows)), header)


def _shape(manifold: str, arr: np.ndarray) -> np.ndarray:
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise DimensionError("dataset must be a nonempty table")
    if manifold == "polysphere":
        if arr.shape[1] % 3:
            raise DimensionError(f"polysphere rows need 3n entries, got {arr.shape[1]}")
        return arr.reshape(arr.shape[0], -1, 3)
    return arr


def dumps_json(manifold: str, data, header: dict | None = None) -> str:
    if manifold == "grassmannian":
        payload = [np.asarray(F).tolist() for F in data]
    else:
        payload = np.asarray(data, dtype=float).tolist()
    doc = {"manifold": manifold, "header": header or {}, "data": payload}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _parse_json(text: str, manifold: str | None) -> Dataset:
    doc = json.loads(text)
    manifold = manifold or doc.get("manifold")
    if isinstance(manifold, dict):
        manifold = descriptor_from_dict(manifold).to_dict()["type"]
    if manifold not in MANIFOLDS:
        raise DimensionError(f"unknown or missing manifold {manifold!r}")
    header = doc.get("header", {})
    if manifold == "grassmannian":
        return Dataset(manifold, [np.array(F, dtype=float) for F in doc["data"]], header)
    arr = np.array(doc["data"], dtype=float)
    if manifold == "polysphere" and arr.ndim == 3:
        return Dataset(manifold, arr, header)
    return Dataset(manifold, _shape(manifold, arr), header)


def read_dataset(path, manifold: str | None = None) -> Dataset:
    """Read a dataset; ``manifold`` overrides the file's own ``manifold`` entry."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        try:
            return _parse_json(text, manifold)
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise DimensionError(f"malformed JSON dataset: {exc}") from None
    return _parse_csv(text, manifold)


def write_dataset(path, manifold: str, data, header: dict | None = None) -> None:
    path = Path(path)
    text = dumps_json(manifold, data, header) if path.suffix.lower() == ".json" else dumps_csv(manifold, data, header)
    path.write_text(text, encoding="utf-8")
