"""Pure-Python versions of the hot loops. Same signatures as ``_kernels``."""

import numpy as np


def removal_labels(x1, x2, ptr, idx, vertical, offset):
    """Remove on-axis points with at most one off-axis neighbor, label the rest.

    Returns (number of components, labels) where removed points get -1 and
    components are numbered in order of their smallest point index.
    """
    n = len(x1)
    coord = x1 if vertical else x2
    labels = np.full(n, -2, dtype=np.int64)
    for i in range(n):
        if coord[i] == offset:
            off = 0
            for e in range(ptr[i], ptr[i + 1]):
                if coord[idx[e]] != offset:
                    off += 1
            if off <= 1:
                labels[i] = -1
    ncomp = 0
    stack = []
    for s in range(n):
        if labels[s] != -2:
            continue
        labels[s] = ncomp
        stack.append(s)
        while stack:
            u = stack.pop()
            for e in range(ptr[u], ptr[u + 1]):
                w = idx[e]
                if labels[w] == -2:
                    labels[w] = ncomp
                    stack.append(w)
        ncomp += 1
    return ncomp, labels


def suff_scan(x1, x2, ptr, idx, first_only=True):
    """Axes (vertical flag, offset) whose removal disconnects, in scan order."""
    out = []
    for vertical, coord in ((1, x1), (0, x2)):
        for off in np.unique(coord):
            k, _ = removal_labels(x1, x2, ptr, idx, vertical, int(off))
            if k >= 2:
                out.append((vertical, int(off)))
                if first_only:
                    return out
    return out
