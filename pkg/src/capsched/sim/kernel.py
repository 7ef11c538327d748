"""Select the dispatcher kernel: compiled when available, pure Python otherwise.

Set ``CAPSCHED_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _dispatch_py

try:
    from . import _dispatch as _compiled
except ImportError:
    _compiled = None

python_dispatch = _dispatch_py.dispatch
compiled_dispatch = _compiled.dispatch if _compiled is not None else None

if compiled_dispatch is not None and os.environ.get("CAPSCHED_PURE_PYTHON", "") in ("", "0"):
    dispatch = compiled_dispatch
    BACKEND = "cython"
else:
    dispatch = python_dispatch
    BACKEND = "python"
