"""Kernel selection.

The compiled kernels are used when importable. Setting
``GROUPRAND_PURE_PYTHON=1`` forces the pure-Python implementation.
"""

import os

from . import _pykernels

pykernels = _pykernels

if os.environ.get("GROUPRAND_PURE_PYTHON", "") not in ("", "0"):
    kernels = _pykernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        kernels = _pykernels

BACKEND = kernels.BACKEND


def ckernels():
    """The compiled module, or None when it is not built."""
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels
