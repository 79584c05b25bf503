"""Kernel backend selection.

The compiled extension is used when it was built; otherwise (or when
``QPT_KG_PURE=1`` is set) the numpy/Python twin is used.  Both expose
``jacobi_recurrence``, ``second_derivative``, ``condition_value`` and
``level_roots``.  The compiled kernels work in float64 only; callers that
need extended precision (the ODE residual oracle) use ``_kernels_py``
directly, whose array kernels preserve ``numpy.longdouble`` input.
"""
from __future__ import annotations

import os

from . import _kernels_py

PRINTED = _kernels_py.PRINTED
NU = _kernels_py.NU

compiled = None
if not os.environ.get("QPT_KG_PURE"):
    try:
        from . import _kernels as compiled  # type: ignore[no-redef]
    except ImportError:
        compiled = None

BACKEND = "cython" if compiled is not None else "python"
_impl = compiled if compiled is not None else _kernels_py

jacobi_recurrence = _impl.jacobi_recurrence
second_derivative = _impl.second_derivative
condition_value = _impl.condition_value
level_roots = _impl.level_roots


def backends():
    """Available backends keyed by name; used by tests and the benchmark."""
    out = {"python": _kernels_py}
    if compiled is not None:
        out["cython"] = compiled
    return out
