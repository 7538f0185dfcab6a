"""Bond structure of a configuration: components, bridges, faces, k-cells."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional

import networkx as nx
import numpy as np

from .errors import NotConnected
from .lattice_core import DIRECTIONS, Axis, Configuration, Orientation, neighbors

_DIR_INDEX = {d: i for i, d in enumerate(DIRECTIONS)}


@dataclass(frozen=True)
class BondGraph:
    adjacency: tuple
    bonds: tuple
    bridge_flags: tuple
    component_ids: tuple

    @property
    def n_components(self) -> int:
        return len(set(self.component_ids))

    @property
    def bridges(self) -> list:
        return [b for b, f in zip(self.bonds, self.bridge_flags) if f]


def components(adjacency, keep=None) -> list:
    """Connected components (lists of indices) of the graph restricted to ``keep``."""
    n = len(adjacency)
    alive = [True] * n if keep is None else [False] * n
    if keep is not None:
        for i in keep:
            alive[i] = True
    seen = [False] * n
    out = []
    for s in range(n):
        if not alive[s] or seen[s]:
            continue
        seen[s] = True
        comp = [s]
        q = deque([s])
        while q:
            u = q.popleft()
            for w in adjacency[u]:
                if alive[w] and not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    q.append(w)
        out.append(sorted(comp))
    return out


def build(config: Configuration) -> BondGraph:
    adj = config.adjacency
    bonds = tuple(neighbors(config))
    g = nx.Graph()
    g.add_nodes_from(range(config.n))
    g.add_edges_from(bonds)
    br = {tuple(sorted(e)) for e in nx.bridges(g)}
    comp = [0] * config.n
    for c, members in enumerate(components(adj)):
        for i in members:
            comp[i] = c
    return BondGraph(adj, bonds, tuple(b in br for b in bonds), tuple(comp))


def is_connected(config: Configuration) -> bool:
    if config.n <= 1:
        return True
    return len(components(config.adjacency)) == 1


@dataclass(frozen=True)
class Cell:
    """Points on the boundary of one bounded face.

    ``boundary_points`` is the closed face walk (a point is listed twice when
    the walk passes it twice), started at the lexicographically smallest
    point and running counterclockwise. ``face_polygon`` keeps the corners of
    that walk.
    """

    boundary_points: tuple
    face_polygon: tuple
    face_id: int = -1
    area: float = 0.0

    @property
    def points(self) -> frozenset:
        return frozenset(self.boundary_points)

    def sorted_points(self) -> list:
        return sorted(self.points)


@dataclass(frozen=True)
class FaceStructure:
    cells: tuple
    edge_face: dict = field(repr=False)  # directed bond -> face id, -1 for unbounded


@dataclass(frozen=True)
class KCell:
    base: Cell
    k: int
    points: tuple


def _next_edge(config: Configuration, u: int, v: int) -> int:
    p = config.points
    idx = config.index
    rev = (p[u][0] - p[v][0], p[u][1] - p[v][1])
    r = _DIR_INDEX[rev]
    for s in (1, 2, 3, 0):
        d = DIRECTIONS[(r - s) % 4]
        w = idx.get((p[v][0] + d[0], p[v][1] + d[1]))
        if w is not None:
            return w
    raise AssertionError("unreachable: u is a neighbor of v")


def _signed_area(pts) -> float:
    a = 0.0
    m = len(pts)
    for i in range(m):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % m]
        a += x0 * y1 - x1 * y0
    return 0.5 * a


def _canonical_rotation(config: Configuration, walk: list) -> list:
    pts = config.points
    m = len(walk)
    lo = min(pts[i] for i in walk)
    best = None
    for s in range(m):
        if pts[walk[s]] != lo:
            continue
        cand = walk[s:] + walk[:s]
        key = [pts[i] for i in cand]
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def corners(config: Configuration, walk) -> tuple:
    pts = config.points
    m = len(walk)
    out = []
    for i in range(m):
        a, b, c = pts[walk[i - 1]], pts[walk[i]], pts[walk[(i + 1) % m]]
        if (b[0] - a[0], b[1] - a[1]) != (c[0] - b[0], c[1] - b[1]):
            out.append(walk[i])
    return tuple(out)


def trace_walks(config: Configuration, bonds=None):
    """All closed face walks of the bond embedding as (walk, signed area)."""
    if bonds is None:
        adj = config.adjacency
    else:
        adj = [[] for _ in range(config.n)]
        for i, j in bonds:
            adj[i].append(j)
            adj[j].append(i)
    allowed = None if bonds is None else {(i, j) for i, j in bonds} | {(j, i) for i, j in bonds}

    def nxt(u, v):
        if allowed is None:
            return _next_edge(config, u, v)
        p = config.points
        rev = (p[u][0] - p[v][0], p[u][1] - p[v][1])
        r = _DIR_INDEX[rev]
        for s in (1, 2, 3, 0):
            d = DIRECTIONS[(r - s) % 4]
            w = config.index.get((p[v][0] + d[0], p[v][1] + d[1]))
            if w is not None and (v, w) in allowed:
                return w
        raise AssertionError("unreachable")

    used = set()
    walks = []
    for u in range(config.n):
        for v in adj[u]:
            if (u, v) in used:
                continue
            walk = []
            a, b = u, v
            while (a, b) not in used:
                used.add((a, b))
                walk.append(a)
                a, b = b, nxt(a, b)
            walks.append((walk, _signed_area([config.points[i] for i in walk])))
    return walks


@lru_cache(maxsize=4096)
def _faces_cached(config: Configuration) -> FaceStructure:
    cells = []
    edge_face = {}
    raw = []
    for walk, area in trace_walks(config):
        if area > 0.5 * 1e-9:
            raw.append((walk, area))
        else:
            m = len(walk)
            for i in range(m):
                edge_face[(walk[i], walk[(i + 1) % m])] = -1
    raw.sort(key=lambda wa: [config.points[i] for i in _canonical_rotation(config, wa[0])])
    for fid, (walk, area) in enumerate(raw):
        m = len(walk)
        for i in range(m):
            edge_face[(walk[i], walk[(i + 1) % m])] = fid
        w = _canonical_rotation(config, walk)
        cells.append(Cell(tuple(w), corners(config, w), fid, float(area)))
    return FaceStructure(tuple(cells), edge_face)


def face_structure(config: Configuration) -> FaceStructure:
    return _faces_cached(config)


def faces(config: Configuration) -> list:
    """One Cell per bounded face, in canonical order."""
    return list(_faces_cached(config).cells)


def manhattan(config: Configuration, a: int, cell: Cell) -> int:
    p = config.points[a]
    return min(abs(p[0] - config.points[i][0]) + abs(p[1] - config.points[i][1]) for i in cell.points)


def k_cell(config: Configuration, cell: Cell, k: int) -> KCell:
    if k < 0:
        raise ValueError("k must be nonnegative")
    c = config.coords
    cp = c[sorted(cell.points)]
    d = np.abs(c[:, None, :] - cp[None, :, :]).sum(axis=2).min(axis=1)
    pts = tuple(int(i) for i in np.nonzero(d <= k)[0])
    return KCell(cell, k, pts)


# ---------------------------------------------------------------- bridges


@dataclass(frozen=True)
class BridgeBranch:
    """A tree of acyclic bonds hanging between cycle points."""

    case: str  # "a", "b", "c", "d" or "tree"
    points: tuple  # all points of the branch, attachments included
    bonds: tuple
    attachments: tuple
    axis: Optional[Axis] = None
    validated: bool = False


@dataclass(frozen=True)
class AcyclicReport:
    branches: tuple
    core: Configuration
    core_index: tuple  # core point i is config point core_index[i]

    @property
    def witness_axis(self) -> Optional[Axis]:
        for b in self.branches:
            if b.case in ("a", "b", "d") and b.validated and b.axis is not None:
                return b.axis
        return None

    @property
    def cases(self) -> list:
        return [b.case for b in self.branches]


def _axis_of_bond(config: Configuration, i: int, j: int) -> Axis:
    p, q = config.points[i], config.points[j]
    if p[0] == q[0]:
        return Axis(Orientation.Vertical, p[0])
    return Axis(Orientation.Horizontal, p[1])


def _branches(config: Configuration, g: BondGraph):
    bridges = g.bridges
    on_cycle = [False] * config.n
    for (i, j), f in zip(g.bonds, g.bridge_flags):
        if not f:
            on_cycle[i] = on_cycle[j] = True
    # split the bridge forest at cycle points
    parent = {}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for e in bridges:
        parent[e] = e
    by_vertex = {}
    for e in bridges:
        for v in e:
            if not on_cycle[v]:
                by_vertex.setdefault(v, []).append(e)
    for es in by_vertex.values():
        for e in es[1:]:
            parent[find(e)] = find(es[0])
    groups = {}
    for e in bridges:
        groups.setdefault(find(e), []).append(e)
    out = []
    for es in groups.values():
        es = sorted(es)
        pts = sorted({v for e in es for v in e})
        att = tuple(v for v in pts if on_cycle[v])
        out.append((tuple(es), tuple(pts), att))
    out.sort(key=lambda t: t[1])
    return out, on_cycle


def acyclic_reduction(config: Configuration) -> AcyclicReport:
    """Classify every branch of acyclic bonds and strip the removable ones.

    Branch cases: (a) one attachment, bonds not on a common axis;
    (b) one attachment, bonds on a common axis A, attachment has a single
    bond on A; (c) like (b) but the attachment has two bonds on A, so the
    branch continues a straight line and can be dropped; (d) two or more
    attachments. Claims (a), (b), (d) are re-checked with the (suff) test
    on the stated axis.
    """
    from .folding import suff_on_axis

    if not is_connected(config):
        raise NotConnected("acyclic_reduction needs a connected configuration")
    g = build(config)
    groups, on_cycle = _branches(config, g)
    if not any(on_cycle):
        br = BridgeBranch("tree", tuple(range(config.n)), tuple(g.bonds), ())
        return AcyclicReport((br,) if g.bonds else (), config, tuple(range(config.n)))
    branches = []
    drop = set()
    for es, pts, att in groups:
        axes = {_axis_of_bond(config, i, j) for i, j in es}
        candidates = []
        if len(att) >= 2:
            case = "d"
        else:
            x = att[0]
            if len(axes) == 1:
                ax = next(iter(axes))
                on_a = [w for w in config.adjacency[x] if ax.contains(config.points[w])]
                if len(on_a) >= 2:
                    case = "c"
                else:
                    case = "b"
                    px = config.points[x]
                    if ax.orientation is Orientation.Vertical:
                        candidates.append(Axis(Orientation.Horizontal, px[1]))
                    else:
                        candidates.append(Axis(Orientation.Vertical, px[0]))
            else:
                case = "a"
                i, j = es[0]
                candidates.append(_axis_of_bond(config, i, j))
        axis = None
        ok = False
        if case == "c":
            drop.update(v for v in pts if v not in att)
        else:
            more = []
            for v in pts:
                p = config.points[v]
                more.append(Axis(Orientation.Vertical, p[0]))
                more.append(Axis(Orientation.Horizontal, p[1]))
            for ax in candidates + sorted(set(more) - set(candidates), key=lambda a: a.sort_key):
                if suff_on_axis(config, ax) is not None:
                    axis, ok = ax, True
                    break
        branches.append(BridgeBranch(case, pts, es, att, axis, ok))
    keep = tuple(i for i in range(config.n) if i not in drop)
    core = config.subset(keep) if drop else config
    return AcyclicReport(tuple(branches), core, keep)

