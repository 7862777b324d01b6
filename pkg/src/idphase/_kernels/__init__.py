"""Kernel backend selection.

The compiled extension (`._core`, Cython) is preferred when importable; the
pure-numpy implementation (`.pure`) is the fallback and the reference.
Setting the environment variable ``IDPHASE_PURE=1`` forces the fallback,
which is how benchmarks/bench_kernels.py compares the two.
"""

import os

from . import pure

if os.environ.get("IDPHASE_PURE", "") not in ("", "0"):
    backend = pure
    BACKEND_NAME = "pure"
else:
    try:
        from . import _core as backend

        BACKEND_NAME = "compiled"
    except ImportError:
        backend = pure
        BACKEND_NAME = "pure"

OPTIMAL = pure.OPTIMAL
ITERATION_LIMIT = pure.ITERATION_LIMIT
SINGULAR = pure.SINGULAR

drive_out = backend.drive_out
simplex_max = backend.simplex_max
lagrange_scan = backend.lagrange_scan
