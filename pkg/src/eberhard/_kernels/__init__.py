"""Kernel backend dispatch.

The environment variable EBERHARD_BACKEND selects the implementation of
the two hot kernels (objective evaluation and fluctuation quadrature):

  numba   require the JIT backend, fail if numba cannot be imported
  numpy   force the vectorized numpy backend
  auto    numba when available, numpy otherwise (default)

Everything else in the package is backend-independent.
"""

from __future__ import annotations

import os

from . import np_impl

_VALID = ("auto", "numba", "numpy")
_choice = os.environ.get("EBERHARD_BACKEND", "auto").strip().lower()
if _choice not in _VALID:
    raise ValueError(
        f"EBERHARD_BACKEND={_choice!r} not recognized; expected one of {_VALID}"
    )

if _choice == "numpy":
    _impl = np_impl
else:
    try:
        from . import nb_impl as _impl
    except ImportError:
        if _choice == "numba":
            raise
        _impl = np_impl

BACKEND = _impl.BACKEND_NAME
j_per_n = _impl.j_per_n
quad_stats = _impl.quad_stats


def get_backend(name: str):
    """Return the named kernel module (for benchmarks and equivalence tests)."""
    if name == "numpy":
        return np_impl
    if name == "numba":
        from . import nb_impl

        return nb_impl
    raise ValueError(f"unknown backend {name!r}")
