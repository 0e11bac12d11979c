"""Kernel backend selection.

The compiled Cython backend is used when its extension module imported
cleanly; otherwise the pure-Python reference implementation takes over.
Set ``MORPHBOOT_PURE_PYTHON=1`` to force the fallback (used by the
benchmark and the cross-backend tests).
"""

import os

if os.environ.get("MORPHBOOT_PURE_PYTHON"):
    from . import _pyimpl as impl
else:
    try:
        from . import _cyimpl as impl  # type: ignore[no-redef]
    except ImportError:
        from . import _pyimpl as impl  # type: ignore[no-redef]

BACKEND = impl.BACKEND
