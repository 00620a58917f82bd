"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it imports; otherwise the
numpy fallback in ``_kernels_py``.  Set ``ROBUST_LOTSIZE_KERNELS=python`` to
force the fallback.
"""
import logging
import os

from . import _kernels_py

log = logging.getLogger(__name__)

_FUNCS = ("simplex_phase", "rlp_dp", "dag_dp")


def _load_compiled():
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


_compiled = _load_compiled()


def available_backends():
    return ["cython", "python"] if _compiled is not None else ["python"]


def get_backend(name):
    """Return the kernel module for ``name`` ('cython' or 'python')."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")


def use_backend(name):
    """Rebind the module-level kernel functions to backend ``name``."""
    global BACKEND
    mod = get_backend(name)
    for f in _FUNCS:
        globals()[f] = getattr(mod, f)
    BACKEND = name
    log.debug("kernel backend: %s", name)


BACKEND = "python"
if os.environ.get("ROBUST_LOTSIZE_KERNELS", "").lower() != "python" and _compiled is not None:
    use_backend("cython")
else:
    use_backend("python")
