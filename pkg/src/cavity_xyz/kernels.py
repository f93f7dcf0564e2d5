"""Kernel selection: compiled extension when available, else pure Python.

Set ``CXYZ_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("CXYZ_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

N_PARAMS = _kernels_py.N_PARAMS
STATUS_OK = _kernels_py.STATUS_OK
STATUS_UNDERFLOW = _kernels_py.STATUS_UNDERFLOW
STATUS_MAX_STEPS = _kernels_py.STATUS_MAX_STEPS

torque = _impl.torque
integrate = _impl.integrate
flow_batch = _impl.flow_batch


def available_backends():
    """Map backend name -> kernel module for every importable implementation."""
    out = {"python": _kernels_py}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
