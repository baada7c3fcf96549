"""Kernel backend selection.

The hot inner loops exist twice: a numba-jitted version and a pure-numpy
version.  ``GRAVDG_BACKEND=numpy`` (or ``numba``) forces the choice; the
default is numba when it imports cleanly.
"""

from __future__ import annotations

import os
import warnings

from . import _kernels_numpy

_ENV_VAR = "GRAVDG_BACKEND"
_VALID = ("numba", "numpy")


def available_backends() -> tuple[str, ...]:
    try:
        import numba  # noqa: F401
        return _VALID
    except ImportError:
        return ("numpy",)


def get_kernels(name: str | None = None):
    """Return the kernel module for the requested backend."""
    if name is None:
        name = os.environ.get(_ENV_VAR, "numba").lower()
    if name not in _VALID:
        raise ValueError(f"unknown backend {name!r}; expected one of {_VALID}")
    if name == "numba":
        try:
            from . import _kernels_numba
            return _kernels_numba
        except ImportError:
            warnings.warn("numba unavailable, falling back to the numpy kernels")
            return _kernels_numpy
    return _kernels_numpy


def backend_name(kernels) -> str:
    return "numba" if kernels.__name__.endswith("_numba") else "numpy"
