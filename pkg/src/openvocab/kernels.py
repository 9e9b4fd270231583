"""Selects the alignment kernel at import time.

The compiled ``_align`` extension is used when it was built; otherwise the
pure-Python ``_align_py`` module is loaded.  Set ``OPENVOCAB_PURE=1`` to
force the fallback.
"""

import os

if os.environ.get("OPENVOCAB_PURE"):
    from . import _align_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _align as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _align_py as _impl

        BACKEND = "python"

align_counts = _impl.align_counts
edit_distance = _impl.edit_distance

__all__ = ["BACKEND", "align_counts", "edit_distance"]
