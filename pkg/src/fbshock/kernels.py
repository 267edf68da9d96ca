"""Kernel selection: compiled extension when importable, NumPy otherwise.

Set ``FBSHOCK_PURE_PYTHON=1`` to force the NumPy path.
"""
import os

from . import _kernels_py

BACKEND = "python"
impl = _kernels_py

if os.environ.get("FBSHOCK_PURE_PYTHON") != "1":
    try:
        from . import _kernels as impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        pass

rhs = impl.rhs
advance = impl.advance
stable_dt = impl.stable_dt
OK = impl.OK
BLOWUP = impl.BLOWUP
