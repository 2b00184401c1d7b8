"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy/pure
Python versions are loaded. Set ``KCSWITCH_PURE_PYTHON=1`` to force the
fallback (the benchmark and the backend-equivalence tests do this).
"""

import os

from kcswitch import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("KCSWITCH_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from kcswitch import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

script_code = _impl.script_code
rank_sum_tail_counts = _impl.rank_sum_tail_counts
jacobi_eigh = _impl.jacobi_eigh

__all__ = ["BACKEND", "script_code", "rank_sum_tail_counts", "jacobi_eigh"]
