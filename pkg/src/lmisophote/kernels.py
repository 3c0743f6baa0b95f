"""Backend selection for the contouring kernels.

The compiled extension is used when it imports; set ``LMISOPHOTE_PURE=1``
to force the pure-Python implementation.
"""

import os

import numpy as np

from . import _purekernels as pure
from ._purekernels import case_codes, grid_counts

compiled = None
if os.environ.get("LMISOPHOTE_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled
    except ImportError:
        compiled = None

BACKEND = "cython" if compiled is not None else "python"


def march_cells(G, wrap_u, wrap_v, center_sign, backend=None):
    impl = _pick(backend)
    G = np.ascontiguousarray(G, dtype=np.float64)
    cs = np.ascontiguousarray(center_sign, dtype=np.int8)
    return impl.march_cells(G, bool(wrap_u), bool(wrap_v), cs)


def chain_segments(segs, n_edges, backend=None):
    return _pick(backend).chain_segments(segs, int(n_edges))


def _pick(backend):
    if backend is None:
        backend = BACKEND
    if backend == "cython":
        if compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return compiled
    if backend == "python":
        return pure
    raise ValueError(f"unknown backend {backend!r}")


__all__ = ["BACKEND", "case_codes", "chain_segments", "grid_counts", "march_cells"]
