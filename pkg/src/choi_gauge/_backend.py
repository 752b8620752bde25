"""Pick the kernel implementation at import time.

The compiled extension is preferred; ``CHOI_GAUGE_BACKEND=python`` forces the
pure-Python fallback (used by the benchmark and the backend-parity tests).
"""
import os

kernels = None
BACKEND = "python"

if os.environ.get("CHOI_GAUGE_BACKEND", "").lower() != "python":
    try:
        from . import _core as kernels

        BACKEND = "cython"
    except ImportError:
        kernels = None

if kernels is None:
    from . import _pykernels as kernels

    BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
