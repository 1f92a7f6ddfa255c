"""Backend selection for the pair kernels.

The compiled extension is used when it was built; otherwise (or when the
environment variable ``VARCONV_PURE=1`` is set) the numpy fallback is used.
Both expose ``monotone_pairs``, ``growth_pairs`` and ``affine_max``.
"""
import os

from . import _kernels_py

if os.environ.get("VARCONV_PURE") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

monotone_pairs = _impl.monotone_pairs
growth_pairs = _impl.growth_pairs
affine_max = _impl.affine_max


def backends():
    """Return the available backends as a name -> module mapping."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        found["compiled"] = _kernels
    return found
