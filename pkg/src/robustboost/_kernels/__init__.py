"""Numerical kernels for the hot inner loops.

Two interchangeable implementations of the same contract live here: a
compiled Cython core (``_core``) and a pure-Python/numpy fallback
(``_pyfallback``).  The compiled core is preferred when it was built;
set the environment variable ``ROBUSTBOOST_PY_KERNELS=1`` before import
(or call :func:`set_backend`) to force the fallback.

Both backends produce bit-identical split decisions: the scan kernels
accumulate sums in the same sequential order, so tree construction does
not depend on which backend is active.
"""

import os

from . import _pyfallback

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

# loss family codes shared by both backends
FAM_TUKEY = 0
FAM_HUBER = 1
FAM_SQUARE = 2
FAM_ABSOLUTE = 3

if _core is not None and not os.environ.get("ROBUSTBOOST_PY_KERNELS"):
    _impl = _core
else:
    _impl = _pyfallback


def active_backend():
    """Name of the backend currently dispatching kernel calls."""
    return "compiled" if _impl is _core else "python"


def available_backends():
    return ("compiled", "python") if _core is not None else ("python",)


def set_backend(name):
    """Switch kernel backend at runtime ('compiled' or 'python')."""
    global _impl
    if name == "python":
        _impl = _pyfallback
    elif name == "compiled":
        if _core is None:
            raise RuntimeError("compiled kernels are not available in this install")
        _impl = _core
    else:
        raise ValueError(f"unknown backend {name!r}")


def ls_scan(x_sorted, y_sorted, min_node):
    return _impl.ls_scan(x_sorted, y_sorted, min_node)


def lad_scan(x_sorted, y_sorted, min_node):
    return _impl.lad_scan(x_sorted, y_sorted, min_node)


def sum_rho(r, sigma, family, c):
    return _impl.sum_rho(r, sigma, family, c)


def sum_rho_shifted(r, h, alpha, sigma, family, c):
    return _impl.sum_rho_shifted(r, h, alpha, sigma, family, c)
