"""Kernel dispatch: the compiled extension when it imports, else pure Python.

Set ``DAGQUERY_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from dagquery import _kernels_py

BACKEND = "python"

if os.environ.get("DAGQUERY_PURE_PYTHON", "") in ("", "0"):
    try:
        from dagquery import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

asap_depth = _impl.asap_depth
acyclic_mask = _impl.acyclic_mask
