"""Backend selection for the hot loops.

The compiled extension is used when it imports; ``WILDARC_PURE=1`` forces
the numpy fallback.  ``BACKEND`` records which one is active.
"""
from __future__ import annotations

import os

from . import _pykernels

_pure = os.environ.get("WILDARC_PURE", "").strip() not in ("", "0")

if _pure:
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

cherry_rhs_batch = _impl.cherry_rhs_batch
flow_batch = _impl.flow_batch
strong_components = _impl.strong_components
expand_ranges = _impl.expand_ranges

__all__ = ["BACKEND", "cherry_rhs_batch", "flow_batch", "strong_components", "expand_ranges"]
