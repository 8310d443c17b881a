"""Kernel backend selection: compiled Cython core with a NumPy fallback.

Set CSKIT_PURE_PYTHON=1 to force the fallback (used by the benchmark and
by tests that compare the two backends).
"""
import os

from . import pure as _pure

if os.environ.get("CSKIT_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _pure
    HAVE_COMPILED = False
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
        HAVE_COMPILED = True
    except ImportError:
        _impl = _pure
        HAVE_COMPILED = False

dwt_forward = _impl.dwt_forward
dwt_adjoint = _impl.dwt_adjoint
noiselet_forward = _impl.noiselet_forward
noiselet_adjoint = _impl.noiselet_adjoint


def backend() -> str:
    """Name of the active kernel backend ("compiled" or "pure")."""
    return _impl.BACKEND
