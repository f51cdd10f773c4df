"""Backend selector for the scan kernels.

Prefers the compiled extension; falls back to the pure-Python twins.
Set KATOFAN_PURE=1 to force the fallback (used by the benchmark and the
parity tests).
"""

import os

from . import _purekernels

if os.environ.get("KATOFAN_PURE"):
    _impl = _purekernels
else:
    try:
        from . import _speedups as _impl
    except ImportError:
        _impl = _purekernels

BACKEND = _impl.BACKEND
scan_box_classify = _impl.scan_box_classify
filter_irreducible = _impl.filter_irreducible
