"""Explicit deformations: the four-circle construction, the piecewise
rotation shear of a simple cell, translation shears and component splits."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bond_graph import Cell, components
from .errors import DegenerateGeometry, InvalidRegion, NoBracket, WitnessInvalid
from .family import DEFAULT_GRID, DeformationFamily, make_family, tetra_volume
from .lattice_core import DEFAULT_TOL, Configuration, is_angle_preserving, is_congruent

__all__ = [
    "CircleSolution",
    "DeformationFamily",
    "circle_solve",
    "build_shear",
    "find_shear",
    "build_translation_shear",
    "translation_family",
    "find_translation_shear",
    "build_split",
]


@dataclass(frozen=True)
class CircleSolution:
    t: float
    s: float
    x3: float
    y_tilde_3: np.ndarray  # (second, third) coordinates
    y_tilde_4: np.ndarray
    residuals: tuple  # the three distance residuals

    @property
    def max_residual(self) -> float:
        return max(self.residuals)


def _bisect(h, lo, hi, iters=128):
    flo = h(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = h(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 4e-16 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def _residuals(y, Y3, Y4):
    y1, y2, y3, y4 = y
    P1, P2 = np.array([y1, 0.0]), np.array([y2, 0.0])
    return (
        abs(np.linalg.norm(P1 - Y4) - abs(y4 - y1)),
        abs(np.linalg.norm(P2 - Y3) - abs(y3 - y2)),
        abs(np.linalg.norm(Y3 - Y4) - abs(y4 - y3)),
    )


def circle_solve(y1, y2, y3, y4, t: float, case: str = "a") -> CircleSolution:
    """Move y4 up by t on its circle about y1 and find y3 on its circle about y2
    keeping |y3 - y4|.

    Case (a): y1 < y4 <= y2 < y3. Case (b): y1 <= y3 < y4 <= y2.
    """
    y = (float(y1), float(y2), float(y3), float(y4))
    y1, y2, y3, y4 = y
    if t <= 0:
        raise ValueError("t must be positive")
    r14 = abs(y4 - y1)
    if case == "a":
        if not (y1 < y4 <= y2 < y3):
            raise DegenerateGeometry("ordering y1 < y4 <= y2 < y3 violated")
        a, b = y3 - y4, y3 - y2
    elif case == "b":
        if not (y1 <= y3 < y4 <= y2):
            raise DegenerateGeometry("ordering y1 <= y3 < y4 <= y2 violated")
        a, b = y4 - y3, y2 - y3
    else:
        raise ValueError("case must be 'a' or 'b'")
    if b == 0.0:
        raise DegenerateGeometry("b = 0")
    if t >= r14:
        raise NoBracket("t exceeds |y4 - y1|")
    s = -r14 + math.sqrt(r14 * r14 - t * t)
    Y4 = np.array([y4 + s, t])

    if case == "a":
        def h(x):
            return -2 * t * x + t * t + s * s + 2 * (b + s) * (b - a) + 2 * (a - b - s) * math.sqrt(max(b * b - x * x, 0.0))

        h0, hb = h(0.0), h(b)
        if not (h0 > 0 and hb < 0):
            raise NoBracket(f"no sign change on [0, b]: h(0)={h0:.3g}, h(b)={hb:.3g}")
        x = _bisect(h, 0.0, b)
        Y3 = np.array([y2 + math.sqrt(max(b * b - x * x, 0.0)), x])
    else:
        c = b - a - s

        def h(x):
            return -2 * t * x + t * t + b * b - a * a + c * c - 2 * c * math.sqrt(max(b * b - x * x, 0.0))

        def valid(x):
            return math.sqrt(max(b * b - x * x, 0.0)) >= c - 1e-15

        # scan for the first sign change away from the trivial root x = 0
        lo = 1e-3 * t if abs(h(0.0)) <= 1e-13 * max(1.0, b * b) else 0.0
        grid = np.linspace(lo, b, 4097)
        vals = [h(g) for g in grid]
        root = None
        for g0, g1, v0, v1 in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
            if v0 == 0.0 and g0 > 0.0 and valid(g0):
                root = g0
                break
            if (v0 > 0) != (v1 > 0) and valid(g0) and valid(g1):
                root = _bisect(h, g0, g1)
                break
        if root is None:
            raise NoBracket("no admissible root of the case (b) equation")
        x = root
        Y3 = np.array([y2 - math.sqrt(max(b * b - x * x, 0.0)), x])
    res = _residuals(y, Y3, Y4)
    if max(res) > 1e-9:
        raise NoBracket(f"root does not satisfy the distance equations (residual {max(res):.2e})")
    return CircleSolution(float(t), float(s), float(x), Y3, Y4, res)


# ---------------------------------------------------------------- shear


def _motion_fix_map(P, Q, Pt, Qt):
    """Proper planar motion sending P -> Pt and Q -> Qt (|P-Q| = |Pt-Qt|)."""
    u, v = Q - P, Qt - Pt
    ang = math.atan2(v[1], v[0]) - math.atan2(u[1], u[0])
    c, s = math.cos(ang), math.sin(ang)
    R = np.array([[c, -s], [s, c]])
    return R, Pt - R @ P


def _polygon_order(cell: Cell, verts):
    poly = list(cell.face_polygon)
    pos = []
    for v in verts:
        if v not in poly:
            raise WitnessInvalid(f"point {v} is not a polygon vertex")
        pos.append(poly.index(v))
    n = len(poly)
    for direction in (1, -1):
        rel = [((p - pos[0]) * direction) % n for p in pos]
        if rel[0] == 0 and rel[1] < rel[2] < rel[3]:
            return direction
    raise WitnessInvalid("witness vertices are not in cyclic order")


def _ordering_case(y) -> Optional[str]:
    y1, y2, y3, y4 = y
    if y1 < y4 <= y2 < y3:
        return "a"
    if y1 <= y3 < y4 <= y2:
        return "b"
    return None


def shear_placement(config: Configuration, cell: Cell, verts, t: float, coord: int = 2,
                    case: Optional[str] = None) -> np.ndarray:
    """Placement of ``config`` (the standalone cell) for amplitude t."""
    cidx = coord - 1  # coordinate the shear acts on
    direction = _polygon_order(cell, verts)
    pts = config.coords
    y = tuple(float(pts[v, cidx]) for v in verts)
    c = _ordering_case(y)
    if c is None or (case is not None and c != case):
        raise WitnessInvalid(f"second coordinates {y} match neither ordering")
    sol = circle_solve(*y, t, c)
    P = {i: np.array([y[i], 0.0]) for i in range(4)}
    R23 = _motion_fix_map(P[1], P[2], P[1], sol.y_tilde_3)
    R34 = _motion_fix_map(P[2], P[3], sol.y_tilde_3, sol.y_tilde_4)
    R14 = _motion_fix_map(P[0], P[3], P[0], sol.y_tilde_4)
    ident = (np.eye(2), np.zeros(2))
    motions = [ident, R23, R34, R14]
    walk = list(cell.boundary_points)
    if direction < 0:
        walk = [walk[0]] + walk[:0:-1]
    start = walk.index(verts[0])
    walk = walk[start:] + walk[:start]
    x = config.embedding()
    arc = 0
    for j, p in enumerate(walk):
        if j > 0 and arc < 3 and p == verts[arc + 1]:
            arc += 1
        R, d = motions[arc]
        yz = np.array([x[p, cidx], x[p, 2]])
        yz = R @ yz + d
        x[p, cidx], x[p, 2] = yz
    return x


def build_shear(config: Configuration, cell: Cell, witness_vertices, case: Optional[str] = None,
                *, coord: int = 2, grid=DEFAULT_GRID, tol: float = 1e-10) -> DeformationFamily:
    """Four-piece rotation shear of a simple cell, on the cell's own points.

    ``config`` must be the standalone cell configuration and ``cell`` its
    face. ``coord`` names the coordinate the shear acts on (2: rotations about axes
    parallel to x1).
    """
    from .shear import is_simple_cell, paraxial_rectangles

    if not is_simple_cell(config, cell):
        raise WitnessInvalid("cell is not simple")
    verts = tuple(witness_vertices)
    if len(verts) != 4 or len(set(verts)) != 4:
        raise WitnessInvalid("need four distinct polygon vertices")
    shear_placement(config, cell, verts, min(grid), coord, case)  # validates the witness
    rects = paraxial_rectangles(config, cell)

    def fn(t):
        return shear_placement(config, cell, verts, t, coord, case)

    fam = make_family("shear", config, fn, grid, tol, witness=list(verts), coord=coord)
    vols = []
    for x in fam.placements:
        vols.append(max((tetra_volume(*x[list(r.corners)]) for r in rects), default=0.0))
    fam.meta["rectangle_volumes"] = vols
    fam.meta["rectangles"] = [list(r.corners) for r in rects]
    return fam


def rectangle_volume(x, rects) -> tuple:
    best, arg = 0.0, None
    for r in rects:
        v = tetra_volume(*x[list(r.corners)])
        if v > best:
            best, arg = v, r
    return best, arg


def shear_witnesses(config: Configuration, cell: Cell):
    """Candidate (vertices, coord) tuples in a fixed order."""
    from .shear import isets

    poly = list(cell.face_polygon)
    n = len(poly)
    s = isets(config, poly)
    c = s.counts
    coords = []
    if min(c[2], c[3]) >= 2:
        coords.append(2)
    if min(c[0], c[1]) >= 2:
        coords.append(1)
    pts = config.coords
    for coord in coords:
        for combo in itertools.combinations(range(n), 4):
            for rot in range(4):
                order = combo[rot:] + combo[:rot]
                for direction in (1, -1):
                    seq = order if direction == 1 else (order[0],) + tuple(reversed(order[1:]))
                    verts = tuple(poly[i] for i in seq)
                    y = tuple(int(pts[v, coord - 1]) for v in verts)
                    if _ordering_case(y) is not None:
                        yield verts, coord


def find_shear(config: Configuration, cell: Cell, t: float = 0.05, min_volume: float = 1e-6,
               grid=DEFAULT_GRID, tol: float = 1e-10) -> Optional[DeformationFamily]:
    """First witness whose shear is valid and twists some paraxial rectangle."""
    from .shear import paraxial_rectangles

    rects = paraxial_rectangles(config, cell)
    if not rects:
        return None
    for verts, coord in shear_witnesses(config, cell):
        try:
            x = shear_placement(config, cell, verts, t, coord)
        except (NoBracket, DegenerateGeometry, WitnessInvalid):
            continue
        rep = is_angle_preserving(config, x, tol, require_ball=False)
        if not rep.preserving:
            continue
        vol, _ = rectangle_volume(x, rects)
        if vol < min_volume:
            continue
        grid = tuple(sorted(set(grid) | {t}, reverse=True))
        try:
            fam = build_shear(config, cell, verts, coord=coord, grid=grid, tol=tol)
        except (NoBracket, DegenerateGeometry):
            continue
        if fam.validated:
            return fam
    return None


# ---------------------------------------------------------- translations


def build_translation_shear(config: Configuration, moving_region, t: float, *, axis: int = 2,
                            sign: int = 1, tol: float = 1e-10) -> np.ndarray:
    """Translate ``moving_region`` by (0, sign(1 - cos t), sin t).

    ``axis=1`` uses (sign(1 - cos t), 0, sin t) instead. Raises InvalidRegion
    when the result is not angle-preserving.
    """
    mv = sorted(set(moving_region))
    x = config.embedding()
    v = np.zeros(3)
    v[axis - 1] = sign * (1.0 - math.cos(t))
    v[2] = math.sin(t)
    x[mv] += v
    rep = is_angle_preserving(config, x, tol, require_ball=False)
    if not rep.preserving:
        raise InvalidRegion(
            f"translation breaks constraints (bond {rep.bond_residual:.2e}, angle {rep.angle_residual:.2e})"
        )
    return x


def translation_family(config: Configuration, moving_region, *, axis: int = 2, sign: int = 1,
                       grid=DEFAULT_GRID, tol: float = 1e-10) -> DeformationFamily:
    mv = sorted(set(moving_region))
    build_translation_shear(config, mv, min(grid), axis=axis, sign=sign, tol=tol)

    def fn(t):
        x = config.embedding()
        v = np.zeros(3)
        v[axis - 1] = sign * (1.0 - math.cos(t))
        v[2] = math.sin(t)
        x[mv] += v
        return x

    return make_family("translate", config, fn, grid, tol, moving=mv, axis=axis, sign=sign)


def translation_regions(config: Configuration, axis: int = 2, sign: int = 1):
    """Moving regions compatible with a translation shear, smallest first.

    A cut bond runs along ``axis``; its fixed end sits on the ``+sign`` side
    and has no further bond that way, its moving end has no bond on the far
    side.
    """
    c = axis - 1
    pts = config.points
    idx = config.index
    step = [0, 0]
    step[c] = sign
    cut = []
    for i, p in enumerate(pts):
        q = idx.get((p[0] - step[0], p[1] - step[1]))
        if q is None:
            continue
        if (p[0] + step[0], p[1] + step[1]) in idx:
            continue
        if (pts[q][0] - step[0], pts[q][1] - step[1]) in idx:
            continue
        cut.append((i, q))  # i fixed end, q moving end
    if not cut:
        return []
    cutset = {frozenset(e) for e in cut}
    adj = [[w for w in a if frozenset((u, w)) not in cutset] for u, a in enumerate(config.adjacency)]
    comps = components(adj)
    comp_of = {}
    for k, cc in enumerate(comps):
        for i in cc:
            comp_of[i] = k
    # moving(comp of fixed end) implies moving(comp of moving end)
    succ = {k: set() for k in range(len(comps))}
    for i, q in cut:
        a, b = comp_of[i], comp_of[q]
        if a != b:
            succ[a].add(b)
    regions = []
    seen = set()
    for k in range(len(comps)):
        todo, close = [k], {k}
        while todo:
            u = todo.pop()
            for w in succ[u]:
                if w not in close:
                    close.add(w)
                    todo.append(w)
        if len(close) == len(comps):
            continue
        region = frozenset(i for kk in close for i in comps[kk])
        if region not in seen:
            seen.add(region)
            regions.append(region)
    regions.sort(key=lambda r: (len(r), sorted(r)))
    return regions


def find_translation_shear(config: Configuration, grid=DEFAULT_GRID,
                           tol: float = 1e-10) -> Optional[DeformationFamily]:
    for axis in (2, 1):
        for sign in (1, -1):
            for region in translation_regions(config, axis, sign):
                try:
                    fam = translation_family(config, region, axis=axis, sign=sign, grid=grid, tol=tol)
                except InvalidRegion:
                    continue
                if fam.validated and fam.nontrivial:
                    return fam
    return None


def build_split(config: Configuration, grid=DEFAULT_GRID, tol: float = DEFAULT_TOL) -> DeformationFamily:
    """Lift one component of a disconnected configuration by (0, 0, t)."""
    comps = components(config.adjacency)
    if len(comps) < 2:
        raise InvalidRegion("configuration is connected")
    mv = comps[0]

    def fn(t):
        x = config.embedding()
        x[mv, 2] += t
        return x

    return make_family("split", config, fn, grid, tol, moving=mv)
