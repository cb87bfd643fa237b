"""Kernel backend selection.

The compiled extension ``gmedim._ckernels`` is used when it was built;
otherwise, or when ``GMEDIM_PURE_PYTHON=1`` is set, the numpy fallback in
``gmedim._pykernels`` is used. ``BACKEND`` names the active one.
"""
import os

from . import _pykernels

try:
    if os.environ.get("GMEDIM_PURE_PYTHON") == "1":
        raise ImportError("compiled kernels disabled by GMEDIM_PURE_PYTHON")
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"


def get_backend(name: str | None = None):
    """Kernel module by name (``"cython"``, ``"python"``) or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends() -> list[str]:
    names = ["python"]
    try:
        from . import _ckernels  # noqa: F401

        names.append("cython")
    except ImportError:
        pass
    return names


plan_sums = _impl.plan_sums
