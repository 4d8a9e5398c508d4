"""Select the compiled kernels when available, else the numpy fallback.

Set ``FFTSTENCIL_PURE_PYTHON=1`` to force the fallback.
"""

import os

from fftstencil import _fallback

_FORCE_PURE = os.environ.get("FFTSTENCIL_PURE_PYTHON", "").strip() not in ("", "0")

try:
    if _FORCE_PURE:
        raise ImportError("pure-python backend requested")
    from fftstencil import _kernels as active
except ImportError:
    active = _fallback

NAME = active.NAME


def available():
    """Map backend name -> module for every backend importable here."""
    found = {_fallback.NAME: _fallback}
    try:
        from fftstencil import _kernels
    except ImportError:
        pass
    else:
        found[_kernels.NAME] = _kernels
    return found
