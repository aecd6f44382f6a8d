"""Backend selection for the per-mode kernels.

The compiled extension is used when importable; set
``MIRRORDECO_BACKEND=python`` to force the numpy fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("MIRRORDECO_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

log_factors = _impl.log_factors
tree_sum = _impl.tree_sum
wrap_phase = _pykernels.wrap_phase


def get_backend(name):
    """Return the kernel module for ``"python"`` or ``"cython"``."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
