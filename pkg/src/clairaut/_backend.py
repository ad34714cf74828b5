"""Pick the tape kernel implementation at import time.

The compiled ``_ckernels`` extension is preferred; setting the environment
variable ``CLAIRAUT_PURE_PYTHON=1`` (or a missing build) selects the
pure-Python ``_pykernels`` module instead.
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

if _ckernels is not None and not os.environ.get("CLAIRAUT_PURE_PYTHON"):
    kernels = _ckernels
    BACKEND = "cython"
else:
    kernels = _pykernels
    BACKEND = "python"


def available():
    """Names of the kernel backends importable in this environment."""
    names = ["python"]
    if _ckernels is not None:
        names.append("cython")
    return names


def get(name):
    if name == "python":
        return _pykernels
    if name == "cython" and _ckernels is not None:
        return _ckernels
    raise ValueError(f"kernel backend {name!r} is not available")
