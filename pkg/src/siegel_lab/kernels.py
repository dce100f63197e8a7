"""Backend selection for the lattice kernels.

The compiled extension is used when it is importable; otherwise, or when the
environment variable ``SIEGEL_LAB_PURE_PYTHON`` is set to a non-empty value,
the pure-Python twin is used.  Both expose the same functions.
"""

from __future__ import annotations

import os

from . import _kernels_py as python_backend

try:  # pragma: no cover - depends on the build
    from . import _kernels as compiled_backend
except ImportError:  # pragma: no cover
    compiled_backend = None

if compiled_backend is not None and not os.environ.get("SIEGEL_LAB_PURE_PYTHON"):
    backend = compiled_backend
    BACKEND = "cython"
else:
    backend = python_backend
    BACKEND = "python"

fp_enumerate = backend.fp_enumerate
fp_sqnorms = backend.fp_sqnorms
fp_count = backend.fp_count
primitive_mask = backend.primitive_mask
lll_reduce = backend.lll_reduce

__all__ = [
    "BACKEND",
    "backend",
    "compiled_backend",
    "python_backend",
    "fp_enumerate",
    "fp_sqnorms",
    "fp_count",
    "primitive_mask",
    "lll_reduce",
]
