"""Tolerances and run configuration shared by all modules."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class Tolerances:
    rank: float = 1e-12          # relative to the largest singular value
    orthonormal: float = 1e-10   # ||V^T V - I||
    unit_norm: float = 1e-8      # | ||x|| - 1 | for input data
    mean: float = 1e-10          # resultant length below which a mean is undefined
    projection: float = 1e-8     # projected norm below which a projection is degenerate
    lie_triple: float = 1e-8     # span-membership residual
    tie: float = 1e-12           # relative gap under which singular values are tied


TOL = Tolerances()


@dataclass(frozen=True)
class PssaConfig:
    """Knobs for tree construction and model selection.

    ``selection`` is ``"loo"`` (leave-one-out prediction error) or
    ``"training"`` (in-sample fit error). ``point_fallback`` picks the
    terminal node of sphere chains: ``"antipodal"`` keeps the best pair of
    antipodal points, ``"mean"`` uses the extrinsic mean inside the last
    circle instead.
    """

    max_children_per_node: int = 3
    resonance_bound: int = 10
    min_dim: int = 0
    selection: str = "loo"
    seed: int = 0
    point_fallback: str = "antipodal"
    allow_sphere_to_point: bool = False
    max_coupling_group: int = 2

    def __post_init__(self):
        if self.max_children_per_node < 1:
            raise ValueError("max_children_per_node must be positive")
        if self.resonance_bound < 1:
            raise ValueError("resonance_bound must be positive")
        if self.min_dim < 0:
            raise ValueError("min_dim must be nonnegative")
        if self.selection not in ("loo", "training"):
            raise ValueError(f"unknown selection mode {self.selection!r}")
        if self.point_fallback not in ("antipodal", "mean"):
            raise ValueError(f"unknown point fallback {self.point_fallback!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return asdict(self)


def worker_count() -> int:
    """Number of worker threads, capped by ``PSSA_THREADS`` (default 1)."""
    raw = os.environ.get("PSSA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Order-preserving map, threaded when ``PSSA_THREADS`` > 1."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
