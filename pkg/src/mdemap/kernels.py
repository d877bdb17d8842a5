"""Kernel backend selection.

The compiled extension (``mdemap._ckernels``) is preferred when it was
built; otherwise the numpy fallback (``mdemap._kernels_py``) is used.
Set ``MDEMAP_KERNELS=python`` or ``MDEMAP_KERNELS=c`` to force one, or
call :func:`set_backend` at runtime (used by tests and the benchmark).
"""

from __future__ import annotations

import os

from . import _kernels_py

_BACKENDS = {"python": _kernels_py}
try:
    from . import _ckernels

    _BACKENDS["c"] = _ckernels
except ImportError:
    pass

_FUNCTIONS = ("direction_bins", "count_mesh_bins", "group_counts",
              "field_entropy", "min_haversine_m")

BACKEND = ""


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def set_backend(name: str) -> None:
    """Rebind the module-level kernel functions to the named backend."""
    global BACKEND
    if name not in _BACKENDS:
        raise ValueError(
            f"kernel backend {name!r} not available (have {available_backends()})")
    impl = _BACKENDS[name]
    g = globals()
    for fn in _FUNCTIONS:
        g[fn] = getattr(impl, fn)
    BACKEND = name


_env = os.environ.get("MDEMAP_KERNELS")
if _env:
    set_backend(_env)
else:
    set_backend("c" if "c" in _BACKENDS else "python")
