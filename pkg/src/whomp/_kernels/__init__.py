"""Kernel backend selection.

The environment variable WHOMP_BACKEND picks the implementation of the hot
numeric kernels:

  auto   (default) use the numba JIT kernels when numba imports, else NumPy
  numba  require the JIT kernels (ImportError if numba is missing)
  numpy  force the pure-NumPy fallback

Both backends expose the same three functions with identical contracts:
pairwise_sqdist, w2_1d_sqcost, jacobi_eigh.
"""

import os

_requested = os.environ.get("WHOMP_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"WHOMP_BACKEND must be one of auto/numba/numpy, got {_requested!r}"
    )

if _requested == "numpy":
    from . import np_impl as _impl

    BACKEND = "numpy"
else:
    try:
        from . import nb_impl as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from . import np_impl as _impl

        BACKEND = "numpy"

pairwise_sqdist = _impl.pairwise_sqdist
w2_1d_sqcost = _impl.w2_1d_sqcost
jacobi_eigh = _impl.jacobi_eigh
