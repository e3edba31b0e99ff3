"""Selects the compiled kernel module when available.

Set TSBASELINES_PURE=1 to force the pure-Python backend (useful for
benchmarking and debugging); otherwise the Cython extension is used when it
was built.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("TSBASELINES_PURE", "").lower() in ("1", "true", "yes"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND_NAME

dtw_cost = _impl.dtw_cost
hawkes_suffstats = _impl.hawkes_suffstats
hawkes_loglik = _impl.hawkes_loglik
hawkes_thinning = _impl.hawkes_thinning
