"""Kernel backend selection.

The compiled extension is used when importable; ``QRATCHET_BACKEND=python``
forces the numpy fallback.
"""

import os

from . import _fallback

fallback = _fallback

if os.environ.get("QRATCHET_BACKEND", "").lower() in ("python", "numpy", "fallback"):
    compiled = None
else:
    try:
        from . import _kernels as compiled
    except ImportError:  # pragma: no cover - depends on build
        compiled = None

kernels = compiled if compiled is not None else fallback
NAME = "compiled" if compiled is not None else "python"
