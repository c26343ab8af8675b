"""Kernel backend selection: compiled extension when available, numpy otherwise.

Set HYPSTAB_BACKEND=numpy or =cython to force a choice; the default (auto)
prefers the compiled core.  Both backends are bit-identical by construction;
the benchmark suite asserts this.
"""

from __future__ import annotations

import os

from . import numpy_backend

_requested = os.environ.get("HYPSTAB_BACKEND", "auto").lower()

_cython_backend = None
if _requested in ("auto", "cython"):
    try:
        from . import _core as _cython_backend
    except ImportError:
        if _requested == "cython":
            raise

if _cython_backend is not None:
    active = _cython_backend
else:
    active = numpy_backend

BACKEND = active.NAME


def available_backends():
    out = {"numpy": numpy_backend}
    if _cython_backend is not None:
        out["cython"] = _cython_backend
    else:
        try:
            from . import _core
            out["cython"] = _core
        except ImportError:
            pass
    return out
