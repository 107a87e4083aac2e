"""Choose the decoding engine at import time.

The compiled ``_core`` extension is used when it imports cleanly; set
``PSPOLAR_BACKEND=python`` to force the pure-Python engine.
"""

from __future__ import annotations

import os

from . import _pycore

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

ENGINES = {"python": _pycore.decode_frame}
if _core is not None:
    ENGINES["compiled"] = _core.decode_frame

_requested = os.environ.get("PSPOLAR_BACKEND", "").strip().lower()
if _requested and _requested not in ENGINES:
    raise ImportError(f"PSPOLAR_BACKEND={_requested!r} is not available; have {sorted(ENGINES)}")
DEFAULT = _requested or ("compiled" if "compiled" in ENGINES else "python")


def get_engine(name: str | None = None):
    name = DEFAULT if name is None else name
    try:
        return ENGINES[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; available: {sorted(ENGINES)}") from None


def has_compiled() -> bool:
    return "compiled" in ENGINES
