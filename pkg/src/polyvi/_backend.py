"""Kernel backend selection.

The compiled extension is used when it imports cleanly; setting
``POLYVI_PURE_PYTHON=1`` forces the NumPy fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
kernels = _kernels_py

if os.environ.get("POLYVI_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        kernels = _compiled
        BACKEND = "cython"

monomials = kernels.monomials
poly_eval = kernels.poly_eval
poly_jac = kernels.poly_jac
