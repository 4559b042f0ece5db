"""Dispatch to the compiled kernels when available.

Set ``POTKERNELS_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("POTKERNELS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

ks_matrix = _impl.ks_matrix
cauchy_sum = _impl.cauchy_sum
