"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback is used. Setting ``PURITY_WITNESS_PURE=1`` forces the fallback.
"""

import os

import numpy as np

from . import _pykernels

if os.environ.get("PURITY_WITNESS_PURE", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _pykernels
        BACKEND = "python"

__all__ = ["BACKEND", "partial_trace", "purity_rate_trace"]


def _c128(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def partial_trace(rho, dim_s, dim_e, trace_out="E", backend=None):
    """Trace out ``"E"`` or ``"S"`` from a bipartite matrix.

    ``backend`` may be ``"python"`` or ``"cython"`` to bypass the import-time
    choice (used by tests and the benchmark).
    """
    if trace_out not in ("E", "S"):
        raise ValueError(f"trace_out must be 'E' or 'S', got {trace_out!r}")
    impl = _select(backend)
    return impl.partial_trace(_c128(rho), int(dim_s), int(dim_e), trace_out)


def purity_rate_trace(rho, h, dim_s, dim_e, backend=None):
    """``Tr((rho_S (x) I_E) [H, rho])``; the reduced-purity rate is ``-2i`` times this."""
    impl = _select(backend)
    return impl.purity_rate_trace(_c128(rho), _c128(h), int(dim_s), int(dim_e))


def _select(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _pykernels
    if backend == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {backend!r}")
