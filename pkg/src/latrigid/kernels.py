"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise, or when
``LATRIGID_PURE=1`` is set, the pure-Python module takes over.
"""

import os

import numpy as np

if os.environ.get("LATRIGID_PURE") == "1":
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _kernels_py as _impl

        BACKEND = "python"

removal_labels = _impl.removal_labels
suff_scan = _impl.suff_scan


def csr(config):
    """Coordinate and CSR adjacency arrays for a configuration."""
    adj = config.adjacency
    ptr = np.zeros(config.n + 1, dtype=np.int64)
    for i, a in enumerate(adj):
        ptr[i + 1] = ptr[i] + len(a)
    idx = np.fromiter((w for a in adj for w in a), dtype=np.int64, count=int(ptr[-1]))
    c = config.coords
    return np.ascontiguousarray(c[:, 0]), np.ascontiguousarray(c[:, 1]), ptr, idx
