"""Kernel backend selection.

The compiled extension is preferred at import; the numpy fallback is used when
it is missing. ``use_backend`` switches temporarily (tests, benchmarks).
"""
import contextlib

from . import _kernels_py

try:
    from . import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

_BACKENDS = {"python": _kernels_py}
if _kernels_c is not None:
    _BACKENDS["cython"] = _kernels_c

_active = _BACKENDS.get("cython", _kernels_py)


def available_backends():
    return sorted(_BACKENDS)


def backend_name():
    return "cython" if _active is _kernels_c else "python"


def kernels():
    return _active


def set_backend(name):
    global _active
    try:
        _active = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}") from None


@contextlib.contextmanager
def use_backend(name):
    global _active
    previous = _active
    set_backend(name)
    try:
        yield
    finally:
        _active = previous
