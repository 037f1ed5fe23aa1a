"""Hot simulation kernels: compiled extension with a pure-Python fallback.

The compiled backend (``_core``, Cython) is used when available; set
``AOISIM_PURE_KERNELS=1`` to force the fallback (useful for benchmarking
and for testing backend parity).
"""

import os

if os.environ.get("AOISIM_PURE_KERNELS"):
    from . import _pure as _backend
else:
    try:
        from . import _core as _backend  # type: ignore[attr-defined]
    except ImportError:
        from . import _pure as _backend

BACKEND = "pure" if _backend.__name__.endswith("_pure") else "compiled"

yao_opt_stats = _backend.yao_opt_stats
yao_cma_stats = _backend.yao_cma_stats

__all__ = ["BACKEND", "yao_opt_stats", "yao_cma_stats"]
