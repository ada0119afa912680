"""Float kernel selection.

Uses the compiled :mod:`divstable._fastkernel` when it is importable and
falls back to :mod:`divstable._purekernel` otherwise.  Setting
``DIVSTABLE_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _purekernel

if os.environ.get("DIVSTABLE_PURE_PYTHON") == "1":
    _impl = _purekernel
    BACKEND = "python"
else:
    try:
        from . import _fastkernel as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _purekernel
        BACKEND = "python"

cut_height_float = _impl.cut_height_float
run_plain_float = _impl.run_plain_float

BACKENDS = {"python": _purekernel}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl
