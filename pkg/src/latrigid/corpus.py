"""Connected configurations: exhaustive enumeration and random accretion."""

from __future__ import annotations

from typing import Iterator

import numpy as np

from .lattice_core import Configuration, canonical_form

STEPS = ((1, 0), (0, 1), (-1, 0), (0, -1))


def _grow(shapes: set) -> set:
    out = set()
    for s in shapes:
        occ = set(s)
        for x, y in s:
            for dx, dy in STEPS:
                q = (x + dx, y + dy)
                if q not in occ:
                    out.add(canonical_form(s + (q,)))
    return out


def exhaustive(max_n: int) -> Iterator[tuple]:
    """Canonical forms of all connected configurations with <= max_n points.

    Level n+1 is obtained from level n by adding one neighbouring point;
    every connected set has a point whose removal keeps it connected, so
    nothing is missed. Output is sorted by size, then lexicographically.
    """
    if max_n < 1:
        return
    level = {((0, 0),)}
    for n in range(1, max_n + 1):
        yield from sorted(level)
        if n < max_n:
            level = _grow(level)


def counts(max_n: int) -> list:
    c = [0] * max_n
    for s in exhaustive(max_n):
        c[len(s) - 1] += 1
    return c


def random_cluster(n: int, rng: np.random.Generator) -> tuple:
    """Grow a cluster from the origin, adding a uniform boundary point each step."""
    pts = [(0, 0)]
    occ = {(0, 0)}
    while len(pts) < n:
        border = sorted({(x + dx, y + dy) for x, y in pts for dx, dy in STEPS} - occ)
        q = border[int(rng.integers(len(border)))]
        pts.append(q)
        occ.add(q)
    return tuple(pts)


def random_clusters(count: int, max_n: int, seed: int = 0) -> Iterator[tuple]:
    """``count`` clusters with sizes uniform in [1, max_n], reproducible by seed."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        yield random_cluster(n, rng)


def configurations(max_n: int) -> Iterator[Configuration]:
    for s in exhaustive(max_n):
        yield Configuration(s)


def simple_cycles(max_len: int) -> Iterator[tuple]:
    """Chordless lattice cycles (simple cells as standalone sets) with <= max_len points.

    Depth-first search over closed self-avoiding walks that start at their
    lexicographically smallest point; a walk is kept when no two points other
    than cyclic neighbours are at distance one. Canonical forms, sorted.
    """
    seen = set()
    origin = (0, 0)

    def rec(path, occ):
        x, y = path[-1]
        m = len(path)
        for dx, dy in STEPS:
            q = (x + dx, y + dy)
            if q == origin and m >= 4:
                if _chordless(path):
                    seen.add(canonical_form(path))
                continue
            if q in occ or q < origin or m >= max_len:
                continue
            if abs(q[0]) + abs(q[1]) > max_len - m:
                continue
            # q may only touch its predecessor (and the origin when closing)
            nb = sum((q[0] + a, q[1] + b) in occ for a, b in STEPS)
            if nb > 1 and not (nb == 2 and abs(q[0]) + abs(q[1]) == 1 and m >= 3):
                continue
            occ.add(q)
            path.append(q)
            rec(path, occ)
            path.pop()
            occ.discard(q)

    rec([origin], {origin})
    yield from sorted(seen, key=lambda s: (len(s), s))


def _chordless(cycle) -> bool:
    n = len(cycle)
    pos = {p: i for i, p in enumerate(cycle)}
    for i, (x, y) in enumerate(cycle):
        for dx, dy in STEPS:
            j = pos.get((x + dx, y + dy))
            if j is not None and (j - i) % n not in (1, n - 1):
                return False
    return True
