"""Kernel backend selection.

The compiled core is preferred when its extension module imported cleanly;
otherwise the numpy fallback takes over.  Set NCCSENSE_KERNELS to force a
choice: "compiled" (error if unavailable), "python", or "auto" (default).
"""

from __future__ import annotations

import os

_CHOICES = ("auto", "compiled", "python")
_requested = os.environ.get("NCCSENSE_KERNELS", "auto").strip().lower()
if _requested not in _CHOICES:
    raise ImportError(
        f"NCCSENSE_KERNELS must be one of {_CHOICES}, got {_requested!r}"
    )

if _requested == "python":
    from . import fallback as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from . import fallback as _impl

        BACKEND = "python"

sample_covariances = _impl.sample_covariances
ncc_statistic = _impl.ncc_statistic
cav_statistic = _impl.cav_statistic
hdm_statistic = _impl.hdm_statistic
lmpit_statistic = _impl.lmpit_statistic
nchdm_statistic = _impl.nchdm_statistic


def load_backend(name: str):
    """Return a backend module by name, for benchmarks and equivalence tests."""
    if name == "python":
        from . import fallback

        return fallback
    if name == "compiled":
        from . import _core

        return _core
    raise ValueError(f"backend must be 'compiled' or 'python', got {name!r}")


def available_backends() -> tuple[str, ...]:
    names = []
    try:
        from . import _core  # noqa: F401

        names.append("compiled")
    except ImportError:
        pass
    names.append("python")
    return tuple(names)
