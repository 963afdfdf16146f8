"""Selects the likelihood kernel implementation at import time.

The compiled extension is preferred when it imports cleanly; otherwise the
numpy fallback is used.  Set QUDITMSE_BACKEND=python or =cython to force a
choice (forcing cython when the extension is missing is an error, as is an
unknown value).  Both implementations follow the same algorithm; see
benchmarks/bench_kernels.py for the speed comparison.
"""

import os

from .errors import ConfigError

_requested = os.environ.get("QUDITMSE_BACKEND", "auto").strip().lower()

if _requested in ("", "auto"):
    try:
        from . import _kernels as _impl
    except ImportError:
        from . import _kernels_py as _impl
elif _requested == "cython":
    from . import _kernels as _impl
elif _requested == "python":
    from . import _kernels_py as _impl
else:
    raise ConfigError(
        "QUDITMSE_BACKEND must be auto, python or cython, got %r" % (_requested,)
    )

BACKEND = _impl.BACKEND_NAME
neg_log_likelihood = _impl.neg_log_likelihood
refine_params = _impl.refine_params


def available_backends():
    """Names of the kernel implementations importable right now."""
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
        names.append("cython")
    except ImportError:
        pass
    return names
