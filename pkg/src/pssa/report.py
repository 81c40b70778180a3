"""JSON report documents: encoding, decoding and schema validation.

Reports are plain JSON with sorted keys and a fixed indent, so equal inputs
give byte-identical files. Matrices are nested lists in row-major order and
exact rationals are ``"p/q"`` strings.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from functools import lru_cache
from importlib import resources

import numpy as np

from . import __version__
from .config import TOL, PssaConfig

SCHEMA_VERSION = "1.0"


def plain(obj):
    """Convert numpy containers and scalars to JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def encode_constraints(product) -> list[dict]:
    """Tagged-dict form of a polysphere :class:`~pssa.polysphere.Product`."""
    from . import polysphere as ps

    out = []
    for part in product.parts:
        if isinstance(part, ps.CoupledSpheres):
            out.append({"type": "coupled_spheres", "i": part.i, "j": part.j, "R": plain(part.R)})
        elif isinstance(part, ps.FixedFactor):
            out.append({"type": "fixed_factor", "i": part.i, "y": plain(part.y)})
        elif isinstance(part, ps.CircleFactor):
            out.append({"type": "circle_factor", "i": part.i, "axis": plain(part.axis)})
        elif isinstance(part, ps.TorusResonance):
            out.append({
                "type": "torus_resonance",
                "factors": list(part.factors),
                "A": plain(part.model.A),
                "c": plain(part.model.c),
            })
    return out


def provenance(config: PssaConfig, **extra) -> dict:
    """Package version, configuration, seed and tolerances, plus run details such as the command."""
    return plain({
        "package_version": __version__,
        "config": config.to_dict(),
        "seed": config.seed,
        "tolerances": asdict(TOL),
        **extra,
    })


def document(report_type: str, manifold: dict, config: PssaConfig, run: dict | None = None, **body) -> dict:
    return plain({
        "schema_version": SCHEMA_VERSION,
        "report_type": report_type,
        "manifold": manifold,
        "provenance": provenance(config, **(run or {})),
        **body,
    })


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


@lru_cache(maxsize=1)
def load_schema() -> dict:
    text = resources.files("pssa").joinpath("report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate(doc: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``doc`` does not match the report schema."""
    import jsonschema

    jsonschema.validate(doc, load_schema())


def iter_nodes(doc: dict):
    """Yield ``(node_id, node)`` for every node of a tree or fit report, depth first."""
    if doc.get("report_type") == "tree":
        stack = [("0", doc["root"])]
        while stack:
            nid, node = stack.pop()
            yield nid, node
            for i, child in reversed(list(enumerate(node["children"]))):
                stack.append((f"{nid}.{i}", child))
    else:
        for i, node in enumerate(doc.get("models", [])):
            yield str(i), node
