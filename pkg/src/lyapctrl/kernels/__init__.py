"""Hot numerical kernels with a compiled core and a pure-Python fallback.

The compiled Cython extension is preferred when it imported successfully;
set LYAPCTRL_PURE_PYTHON=1 to force the NumPy fallback (used by the
benchmark and the parity tests).
"""

import os

from . import _pure

BACKEND = "pure"
_impl = _pure

if not os.environ.get("LYAPCTRL_PURE_PYTHON"):
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _pure

eigh_herm = _impl.eigh_herm
schrodinger_rhs = _impl.schrodinger_rhs
expect = _impl.expect

__all__ = ["BACKEND", "eigh_herm", "schrodinger_rhs", "expect"]
