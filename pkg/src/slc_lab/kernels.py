"""Backend selection for the hot kernels.

The compiled extension is used when it imports cleanly; otherwise, or when
``SLC_LAB_PURE=1`` is set in the environment, the numpy versions are used.
Both expose the same three batched functions.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND = "numpy"
_impl = _pykernels

if os.environ.get("SLC_LAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        _impl = _ckernels
        BACKEND = "cython"


def jacobi_eigh(a):
    return _impl.jacobi_eigh(a)


def sl_r(vals, r):
    return _impl.sl_r(vals, r)


def r_theta(vals, theta):
    return _impl.r_theta(vals, theta)


def backends() -> dict:
    """All importable backends by name, for benchmarks and equivalence tests."""
    out = {"numpy": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out
