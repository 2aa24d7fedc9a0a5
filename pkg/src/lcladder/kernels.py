"""Backend selection for the hot kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy fallback in ``_pykernels`` takes over. Setting ``LCLADDER_PURE_PYTHON=1``
forces the fallback.
"""
import os

from . import _pykernels

LADDER = _pykernels.LADDER
QUADRATIC = _pykernels.QUADRATIC
AFFINE = _pykernels.AFFINE
TANGENT = _pykernels.TANGENT
OK = _pykernels.OK
POLE = _pykernels.POLE
DIVERGED = _pykernels.DIVERGED
POLE_TOL = _pykernels.POLE_TOL


def _load_compiled():
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels


_compiled = None if os.environ.get("LCLADDER_PURE_PYTHON") == "1" else _load_compiled()

if _compiled is not None:
    BACKEND = "cython"
    _impl = _compiled
else:
    BACKEND = "python"
    _impl = _pykernels

map_orbit = _impl.map_orbit
map_values = _impl.map_values
lipschitz_max = _impl.lipschitz_max
exp_sum = _impl.exp_sum


def available_backends():
    names = ["python"]
    if _load_compiled() is not None:
        names.insert(0, "cython")
    return names


def get_backend(name):
    """Return the kernel module for ``"cython"`` or ``"python"``."""
    if name == "python":
        return _pykernels
    if name == "cython":
        mod = _load_compiled()
        if mod is None:
            raise ImportError("compiled kernels are not built")
        return mod
    raise ValueError(f"unknown backend {name!r}")
