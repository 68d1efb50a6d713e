"""Grover-oracle synthesis for acyclic orientations of multiloop set-graphs."""
from dagquery.kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
