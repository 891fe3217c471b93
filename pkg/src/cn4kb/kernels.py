"""Selects the compiled kernels when available, else the pure-Python ones."""

from __future__ import annotations

import os

from . import _fallback

if os.environ.get("CN4KB_PURE_PYTHON"):
    _impl = _fallback
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _fallback

BACKEND = "compiled" if _impl is not _fallback else "python"

bfs_histogram = _impl.bfs_histogram
core_numbers = _impl.core_numbers
tarjan_scc = _impl.tarjan_scc
triangle_counts = _impl.triangle_counts
