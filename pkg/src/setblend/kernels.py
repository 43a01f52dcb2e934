"""Kernel dispatch: compiled extension when available, numpy otherwise.

Set ``SETBLEND_NO_EXT=1`` in the environment to force the numpy fallback,
e.g. when timing the two implementations against each other.
"""

import os

from . import _kernels_py

if os.environ.get("SETBLEND_NO_EXT"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

INF_SQ = _kernels_py.INF_SQ
edt_sq = _impl.edt_sq
label_components = _impl.label_components


def backend() -> str:
    """Name of the active kernel implementation: 'compiled' or 'numpy'."""
    return "compiled" if _impl.__name__.endswith("._kernels") else "numpy"
