"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python
reference is the fallback. ``BDPGO_KERNEL=python`` (or ``compiled``) forces a
backend; forcing an unavailable one raises at import so misconfiguration is
loud, not silent.
"""

import os

from . import pyref

_forced = os.environ.get("BDPGO_KERNEL", "").strip().lower()

if _forced == "python":
    backend = pyref
elif _forced == "compiled":
    from . import _core as backend  # noqa: F401  (ImportError is intentional here)
else:
    try:
        from . import _core as backend
    except ImportError:
        backend = pyref

BACKEND_NAME = backend.NAME


def available_backends():
    names = ["python"]
    try:
        from . import _core  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names
