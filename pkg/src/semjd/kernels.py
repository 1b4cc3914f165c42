"""Backend dispatch for the hot numeric kernels.

The numba-compiled kernels are the default.  Set ``SEMJD_DISABLE_NUMBA=1`` in
the environment to force the pure-numpy fallbacks (also used automatically
when numba cannot be imported).  Both backends implement the same contracts;
``benchmarks/bench_kernels.py`` compares them.
"""

import logging
import os

logger = logging.getLogger(__name__)

_env = os.environ.get("SEMJD_DISABLE_NUMBA", "").strip().lower()
_disabled = _env not in ("", "0", "false", "no")

if not _disabled:
    try:
        from . import _kernels_nb as _impl

        _BACKEND = "numba"
    except ImportError:  # pragma: no cover - depends on environment
        logger.info("numba unavailable, falling back to pure-numpy kernels")
        from . import _kernels_np as _impl

        _BACKEND = "numpy"
else:
    from . import _kernels_np as _impl

    _BACKEND = "numpy"

affine_recursion = _impl.affine_recursion
truncated_second_moments = _impl.truncated_second_moments


def backend() -> str:
    """Name of the active kernel backend: ``"numba"`` or ``"numpy"``."""
    return _BACKEND
