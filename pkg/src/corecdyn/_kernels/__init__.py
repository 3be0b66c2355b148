"""Hot loops of the return map.

The compiled backend (``_ckernels``) is used when it has been built;
otherwise, or when ``CORECDYN_PURE_PYTHON=1`` is set, the pure-Python
backend is selected. Both expose the same functions.
"""

import os

from . import _pykernels as python_backend

try:
    from . import _ckernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

if compiled_backend is not None and os.environ.get("CORECDYN_PURE_PYTHON", "") in ("", "0"):
    backend = compiled_backend
else:
    backend = python_backend

BACKEND = backend.BACKEND

__all__ = ["backend", "python_backend", "compiled_backend", "BACKEND"]
