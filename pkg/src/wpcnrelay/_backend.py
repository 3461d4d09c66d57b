"""Kernel backend selection.

The compiled extension is preferred; the NumPy twin is the fallback.
Set WPCNRELAY_PURE_PY=1 to force the fallback (used by the benchmark and
the backend-equivalence tests).
"""
from __future__ import annotations

import os

if os.environ.get("WPCNRELAY_PURE_PY", "") not in ("", "0"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

grid_search = _impl.grid_search
detector_chunk = _impl.detector_chunk


def backend_name() -> str:
    """Which kernel implementation this process is using."""
    return _impl.BACKEND_NAME
