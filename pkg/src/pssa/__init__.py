"""Nested best-fit totally geodesic submanifolds of symmetric spaces.

Modules: :mod:`pssa.sphere`, :mod:`pssa.grassmann`, :mod:`pssa.torus` (with
:mod:`pssa.lattice`), :mod:`pssa.polysphere` and :mod:`pssa.tree`.
"""

__version__ = "0.1.0"

from .config import TOL, PssaConfig  # noqa: E402
from .errors import NumericalError, PSSAError, ValidationError  # noqa: E402

__all__ = ["__version__", "TOL", "PssaConfig", "PSSAError", "ValidationError", "NumericalError"]
