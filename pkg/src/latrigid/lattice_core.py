"""Lattice configurations, bonds, triplets, angles and congruence.

A configuration is a finite set of distinct points of Z^2, embedded in
3-space at height zero. Bonds are never given by the user: two points are
bonded exactly when they are at distance one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DegenerateAngle,
    DuplicatePoint,
    InvalidPlacement,
    OutOfPerturbationBall,
)

EPSILON = (math.sqrt(2.0) - 1.0) / 4.0
DEFAULT_TOL = 1e-9

# the four lattice directions in counterclockwise order starting east
DIRECTIONS = ((1, 0), (0, 1), (-1, 0), (0, -1))


class LatticePoint(NamedTuple):
    x1: int
    x2: int


class Orientation(enum.Enum):
    Vertical = "vertical"
    Horizontal = "horizontal"


@dataclass(frozen=True)
class Axis:
    """A full lattice line: ``{offset} x Z`` (vertical) or ``Z x {offset}``."""

    orientation: Orientation
    offset: int

    @property
    def sort_key(self) -> tuple:
        # scan order: vertical axes first, each family by increasing offset
        return (self.orientation is not Orientation.Vertical, self.offset)

    def contains(self, p: Sequence[int]) -> bool:
        if self.orientation is Orientation.Vertical:
            return p[0] == self.offset
        return p[1] == self.offset

    def __str__(self) -> str:
        if self.orientation is Orientation.Vertical:
            return f"x1={self.offset}"
        return f"x2={self.offset}"

    def to_dict(self) -> dict:
        return {"orientation": self.orientation.value, "offset": self.offset}


@dataclass(frozen=True)
class Configuration:
    """Ordered tuple of distinct lattice points.

    The order is the input order and every reported index refers to it.
    """

    points: tuple = ()
    _eps: float = field(default=EPSILON, repr=False, compare=False)

    def __post_init__(self):
        pts = tuple(LatticePoint(int(p[0]), int(p[1])) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(set(pts)) != len(pts):
            seen = set()
            for p in pts:
                if p in seen:
                    raise DuplicatePoint(f"point {tuple(p)} listed twice")
                seen.add(p)
        if not 0.0 < self._eps <= EPSILON:
            raise ValueError("epsilon must lie in (0, (sqrt(2)-1)/4]")

    @classmethod
    def from_points(cls, pts: Iterable[Sequence[int]]) -> "Configuration":
        return cls(tuple(pts))

    @property
    def epsilon(self) -> float:
        return self._eps

    @property
    def n(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @cached_property
    def index(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def coords(self) -> np.ndarray:
        """Integer array of shape (n, 2)."""
        return np.array(self.points, dtype=np.int64).reshape(-1, 2)

    def embedding(self) -> np.ndarray:
        """Identity placement as a float array of shape (n, 3)."""
        out = np.zeros((self.n, 3))
        out[:, :2] = self.coords
        return out

    def subset(self, idx: Iterable[int]) -> "Configuration":
        return Configuration(tuple(self.points[i] for i in idx))

    @cached_property
    def bond_array(self) -> np.ndarray:
        b = neighbors(self)
        return np.array(b, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def adjacency(self) -> tuple:
        adj = [[] for _ in range(self.n)]
        for i, j in neighbors(self):
            adj[i].append(j)
            adj[j].append(i)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def triplet_array(self) -> np.ndarray:
        """Unordered triplets (a, v, b) with a < b, shape (m, 3)."""
        rows = []
        for v, nb in enumerate(self.adjacency):
            for i, a in enumerate(nb):
                for b in nb[i + 1:]:
                    rows.append((a, v, b))
        return np.array(rows, dtype=np.int64).reshape(-1, 3)

    def digest(self) -> str:
        import hashlib

        text = "\n".join(f"{p[0]} {p[1]}" for p in self.points)
        return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class Placement:
    """Image of every point of a configuration, stored as an (n, 3) array."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 2 or c.shape[1] != 3:
            raise InvalidPlacement("placement must have shape (n, 3)")
        if not np.all(np.isfinite(c)):
            raise InvalidPlacement("placement contains non-finite values")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @classmethod
    def identity(cls, config: Configuration) -> "Placement":
        return cls(config.embedding())

    def __len__(self) -> int:
        return self.coords.shape[0]

    def __getitem__(self, i: int) -> np.ndarray:
        return self.coords[i]


def _as_array(placement) -> np.ndarray:
    if isinstance(placement, Placement):
        return placement.coords
    return np.asarray(placement, dtype=float)


def neighbors(config: Configuration) -> list:
    """Unordered bonded index pairs (i, j), i < j, sorted."""
    idx = config.index
    out = []
    for i, p in enumerate(config.points):
        for d in ((1, 0), (0, 1), (-1, 0), (0, -1)):
            j = idx.get((p[0] + d[0], p[1] + d[1]))
            if j is not None and i < j:
                out.append((i, j))
    out.sort()
    return out


def triplets(config: Configuration) -> list:
    """Ordered triplets (k, k', k'') with k' bonded to both ends, k != k''."""
    out = []
    for a, v, b in config.triplet_array.tolist():
        out.append((a, v, b))
        out.append((b, v, a))
    out.sort()
    return out


def angle(a, v, b, *, tagged: bool = False):
    """Angle at ``v`` from ``a - v`` to ``b - v``.

    Triples lying in the plane x3 = 0 get the clockwise oriented angle in
    [0, 2pi). Other triples have no preferred orientation; they get the
    unsigned angle in [0, pi]. With ``tagged=True`` a pair
    ``(value, oriented)`` is returned.
    """
    a = np.asarray(a, dtype=float)
    v = np.asarray(v, dtype=float)
    b = np.asarray(b, dtype=float)
    a = np.pad(a, (0, 3 - a.size))
    v = np.pad(v, (0, 3 - v.size))
    b = np.pad(b, (0, 3 - b.size))
    u, w = a - v, b - v
    if not np.any(u) or not np.any(w):
        raise DegenerateAngle("angle undefined: an end point equals the vertex")
    if a[2] == 0.0 and v[2] == 0.0 and b[2] == 0.0:
        ccw = math.atan2(u[0] * w[1] - u[1] * w[0], u[0] * w[0] + u[1] * w[1])
        th = (-ccw) % (2.0 * math.pi)
        if th >= 2.0 * math.pi:
            th = 0.0
        return (th, True) if tagged else th
    th = math.atan2(float(np.linalg.norm(np.cross(u, w))), float(u @ w))
    return (th, False) if tagged else th


def unsigned_angles(x: np.ndarray, trip: np.ndarray) -> np.ndarray:
    """Unsigned angles in [0, pi] at the middle of each (a, v, b) row."""
    if len(trip) == 0:
        return np.zeros(0)
    u = x[trip[:, 0]] - x[trip[:, 1]]
    w = x[trip[:, 2]] - x[trip[:, 1]]
    cr = np.linalg.norm(np.cross(u, w), axis=1)
    return np.arctan2(cr, np.einsum("ij,ij->i", u, w))


def is_congruent(config: Configuration, placement, tol: float = DEFAULT_TOL) -> bool:
    """All pairwise distances agree with the lattice ones within ``tol``."""
    x = _as_array(placement)
    x0 = config.embedding()
    if x.shape != x0.shape:
        raise InvalidPlacement("placement does not cover the configuration")
    n = x.shape[0]
    if n < 2:
        return True
    iu, ju = np.triu_indices(n, 1)
    d = np.linalg.norm(x[iu] - x[ju], axis=1)
    d0 = np.linalg.norm(x0[iu] - x0[ju], axis=1)
    return bool(np.max(np.abs(d - d0)) <= tol)


@dataclass(frozen=True)
class ResidualReport:
    bond_residual: float
    angle_residual: float
    max_displacement: float
    tol: float

    @property
    def preserving(self) -> bool:
        return self.bond_residual <= self.tol and self.angle_residual <= self.tol

    def to_dict(self) -> dict:
        return {
            "bond_residual": self.bond_residual,
            "angle_residual": self.angle_residual,
            "max_displacement": self.max_displacement,
            "preserving": self.preserving,
        }


def residuals(config: Configuration, placement) -> tuple:
    """(max bond-length residual, max angle residual) of a placement.

    Angles are compared as unsigned values in [0, pi], which is the same as
    comparing the unordered pair {theta, 2pi - theta}.
    """
    x = _as_array(placement)
    b = config.bond_array
    rb = 0.0
    if len(b):
        rb = float(np.max(np.abs(np.linalg.norm(x[b[:, 0]] - x[b[:, 1]], axis=1) - 1.0)))
    t = config.triplet_array
    ra = 0.0
    if len(t):
        x0 = config.embedding()
        ra = float(np.max(np.abs(unsigned_angles(x, t) - unsigned_angles(x0, t))))
    return rb, ra


def is_angle_preserving(
    config: Configuration,
    placement,
    tol: float = DEFAULT_TOL,
    *,
    require_ball: bool = True,
) -> ResidualReport:
    """Bond and angle residuals of ``placement`` against the lattice values.

    Raises OutOfPerturbationBall when ``require_ball`` is set and some point
    moved by epsilon or more.
    """
    x = _as_array(placement)
    if x.shape != (config.n, 3):
        raise InvalidPlacement("placement does not cover the configuration")
    disp = float(np.max(np.linalg.norm(x - config.embedding(), axis=1))) if config.n else 0.0
    if require_ball and disp >= config.epsilon:
        raise OutOfPerturbationBall(
            f"a point moved by {disp:.6g} >= epsilon = {config.epsilon:.6g}"
        )
    rb, ra = residuals(config, x)
    return ResidualReport(rb, ra, disp, tol)


def lattice_symmetries():
    """The 8 linear symmetries of Z^2 as 2x2 integer matrices."""
    mats = []
    for a, b, c, d in ((1, 0, 0, 1), (0, -1, 1, 0), (-1, 0, 0, -1), (0, 1, -1, 0)):
        mats.append(np.array([[a, b], [c, d]]))
        mats.append(np.array([[a, b], [c, d]]) @ np.array([[1, 0], [0, -1]]))
    return mats


def transform(config: Configuration, mat, shift=(0, 0)) -> Configuration:
    c = config.coords @ np.asarray(mat).T + np.asarray(shift)
    return Configuration(tuple(map(tuple, c.tolist())))


def canonical_form(points) -> tuple:
    """Smallest sorted point tuple over the 8 symmetries, anchored at the origin."""
    arr = np.asarray(list(points), dtype=np.int64).reshape(-1, 2)
    best = None
    for m in lattice_symmetries():
        c = arr @ m.T
        c = c - c.min(axis=0)
        key = tuple(sorted(map(tuple, c.tolist())))
        if best is None or key < best:
            best = key
    return best if best is not None else ()
