"""Selects the VM execution kernel at import time.

The compiled extension ``_vmcore`` is preferred; the pure-Python
``_vmcore_py`` is used when the extension is missing or when the
environment variable ``IDXCOST_PURE`` is set to a non-empty value.
"""
import os

from . import _vmcore_py

try:
    from . import _vmcore as _compiled
except ImportError:
    _compiled = None

_active = _vmcore_py if (_compiled is None or os.environ.get("IDXCOST_PURE")) else _compiled


def active():
    return _active


def available():
    """Names of the kernels that can be used in this process."""
    return {"python": _vmcore_py, **({"cython": _compiled} if _compiled is not None else {})}


def get(name: str):
    try:
        return available()[name]
    except KeyError:
        raise ValueError(f"kernel {name!r} is not available") from None
