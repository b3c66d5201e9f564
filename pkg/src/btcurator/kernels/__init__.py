"""Kernel backend selection.

The compiled Cython extension is preferred when it was built; otherwise the
pure-Python reference kernels are used. Set BTCURATOR_PURE_PYTHON=1 to force
the fallback (useful for benchmarking and debugging). Both backends are
bitwise-equivalent; tests/test_kernels.py enforces that.
"""

import os

from . import py_kernels

if os.environ.get("BTCURATOR_PURE_PYTHON"):
    impl = py_kernels
else:
    try:
        from . import _ckernels as impl  # type: ignore[no-redef]
    except ImportError:
        impl = py_kernels

BACKEND = impl.BACKEND
tfidf_max_cosines = impl.tfidf_max_cosines
model1_estep = impl.model1_estep
