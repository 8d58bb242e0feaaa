"""Select the kernel implementation at import time.

The compiled extension is preferred. Set ``HEAVYTAIL_BACKEND=python`` to
force the numpy fallback (or ``cython`` to fail loudly when it is missing).
"""

import importlib
import os

_MODULES = {"cython": "heavytail._ckernels", "python": "heavytail._pykernels"}


def load(name):
    """Import a kernel backend by name (``"cython"`` or ``"python"``)."""
    try:
        return importlib.import_module(_MODULES[name])
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; choose from {sorted(_MODULES)}") from None


def _select():
    requested = os.environ.get("HEAVYTAIL_BACKEND", "").strip().lower()
    if requested:
        return load(requested)
    try:
        return load("cython")
    except ImportError:
        return load("python")


kernels = _select()
