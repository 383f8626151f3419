"""Pick the compiled kernels when available, else the numpy fallback.

Set ``ROUNDTAX_PURE_PYTHON=1`` to force the fallback.
"""
import os

from roundtax import _pykernels as python_kernels
from roundtax.errors import DomainError

compiled_kernels = None
if not os.environ.get("ROUNDTAX_PURE_PYTHON"):
    try:
        from roundtax import _ckernels as compiled_kernels
    except ImportError:
        compiled_kernels = None

active = compiled_kernels if compiled_kernels is not None else python_kernels
BACKEND = active.NAME


def get(name=None):
    """Return a kernel module by name ("cython", "numpy") or the active one."""
    if name is None:
        return active
    if name == "numpy":
        return python_kernels
    if name == "cython":
        if compiled_kernels is None:
            raise DomainError("compiled kernels are not available in this build")
        return compiled_kernels
    raise DomainError(f"unknown kernel backend {name!r}")
