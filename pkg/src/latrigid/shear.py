"""Cell classification and the rigidity verdict.

Cells are decomposed into an outer cell and inner cells, classified by
their I-sets, and combined with the folding test into the verdict pipeline.
Membership in S_k for k >= 1 has no combinatorial test here; it is decided
numerically by :mod:`latrigid.flex_oracle`.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bond_graph import (
    Cell,
    acyclic_reduction,
    build,
    corners,
    face_structure,
    faces,
    is_connected,
    trace_walks,
)
from .errors import BridgeOnBoundary, NotSimple
from .folding import SuffWitness, build_folding, check_suff
from .lattice_core import DEFAULT_TOL, Configuration


@dataclass(frozen=True)
class ISets:
    i1_plus: tuple
    i1_minus: tuple
    i2_plus: tuple
    i2_minus: tuple

    @property
    def counts(self) -> tuple:
        return (len(self.i1_plus), len(self.i1_minus), len(self.i2_plus), len(self.i2_minus))

    def min_counts(self) -> tuple:
        c = self.counts
        return (min(c[0], c[1]), min(c[2], c[3]))


@dataclass(frozen=True)
class CellDecomposition:
    cell: Cell
    is_simple: bool
    outer_cell: Cell
    inner_cells: tuple
    isets_per_cell: tuple  # outer first, then inner cells in order


class RectOrientation(enum.Enum):
    min_width_horizontal = "min-width-horizontal"
    min_width_vertical = "min-width-vertical"


@dataclass(frozen=True)
class ParaxialRectangle:
    """Corners (p00, p10, p01, p11) as point indices, p10 = p00 + a e1 etc."""

    corners: tuple
    orientation: RectOrientation
    size: tuple  # (a, b)

    def twist(self, z) -> float:
        a, b, c, d = self.corners
        return float(z[a] - z[b] - z[c] + z[d])


class Status(enum.Enum):
    AngleRigid = "AngleRigid"
    NotAngleRigid = "NotAngleRigid"
    Undecided = "Undecided"


class Route(enum.Enum):
    Trivial = "Trivial"
    Disconnected = "Disconnected"
    FoldingClass = "FoldingClass"
    S0Corollary = "S0Corollary"
    SkOracle = "SkOracle"
    FlexOracle = "FlexOracle"


@dataclass
class RigidityVerdict:
    status: Status
    route: Route
    evidence: object = None
    k_used: Optional[int] = None
    witness: Optional[SuffWitness] = None
    family: object = None
    cells: list = field(default_factory=list)
    oracle: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    timing: float = 0.0

    @property
    def exit_code(self) -> int:
        return {Status.AngleRigid: 0, Status.NotAngleRigid: 1, Status.Undecided: 2}[self.status]


# ------------------------------------------------------------ cells


def cell_config(config: Configuration, cell: Cell):
    """The cell's points as a standalone configuration plus index map."""
    idx = sorted(cell.points)
    return config.subset(idx), idx


def is_simple_cell(config: Configuration, cell: Cell) -> bool:
    w = cell.boundary_points
    m = len(w)
    if len(set(w)) != m:
        return False
    pts = config.coords[list(w)]
    for i in range(m):
        for j in range(i + 2, m):
            if i == 0 and j == m - 1:
                continue
            if abs(pts[i, 0] - pts[j, 0]) + abs(pts[i, 1] - pts[j, 1]) <= 1:
                return False
    return True


def _walk_edges(walk) -> set:
    m = len(walk)
    return {(walk[i], walk[(i + 1) % m]) for i in range(m)}


def _check_bridges(config: Configuration, cell: Cell) -> None:
    g = build(config)
    br = {b for b, f in zip(g.bonds, g.bridge_flags) if f}
    for u, v in _walk_edges(cell.boundary_points):
        if (min(u, v), max(u, v)) in br:
            raise BridgeOnBoundary(f"bond {(u, v)} on the cell boundary is acyclic")


def _as_cell(config: Configuration, walk, fid=-1) -> Cell:
    from .bond_graph import _canonical_rotation, _signed_area

    w = _canonical_rotation(config, list(walk))
    area = _signed_area([config.points[i] for i in w])
    return Cell(tuple(w), corners(config, w), fid, float(area))


def isets(config: Configuration, polygon) -> ISets:
    """Right, left, up and down sets of a counterclockwise polygon."""
    pts = [config.points[i] for i in polygon]
    n = len(pts)
    s = ([], [], [], [])
    for i in range(n):
        dx = pts[(i + 1) % n][0] - pts[i][0]
        dy = pts[(i + 1) % n][1] - pts[i][1]
        if dx > 0:
            s[0].append(i)
        elif dx < 0:
            s[1].append(i)
        elif dy > 0:
            s[2].append(i)
        else:
            s[3].append(i)
    return ISets(*(tuple(x) for x in s))


def decompose(config: Configuration, cell: Cell) -> CellDecomposition:
    _check_bridges(config, cell)
    if is_simple_cell(config, cell):
        return CellDecomposition(cell, True, cell, (), (isets(config, cell.face_polygon),))
    zc, idx = cell_config(config, cell)
    walks = trace_walks(zc)
    mine = _walk_edges(cell.boundary_points)
    outer = None
    inner = []
    for walk, area in walks:
        orig = [idx[i] for i in walk]
        if area < 0 and outer is None:
            outer = list(reversed(orig))
        elif area > 0 and _walk_edges(orig) != mine:
            inner.append(_as_cell(config, orig))
    outer_cell = _as_cell(config, outer)
    inner.sort(key=lambda c: [config.points[i] for i in c.boundary_points])
    sets = [isets(config, outer_cell.face_polygon)] + [isets(config, c.face_polygon) for c in inner]
    return CellDecomposition(cell, False, outer_cell, tuple(inner), tuple(sets))


def min_count_test(s: ISets) -> bool:
    return s.min_counts() == (1, 1)


def is_0_shear_resistant_simple(config: Configuration, cell: Cell) -> bool:
    if not is_simple_cell(config, cell):
        raise NotSimple("cell is not simple")
    return min_count_test(isets(config, cell.face_polygon))


def is_0_shear_resistant(config: Configuration, cell: Cell, dec: CellDecomposition = None) -> bool:
    dec = dec or decompose(config, cell)
    zc, _ = cell_config(config, cell)
    if check_suff(zc) is not None:
        return False
    return all(min_count_test(s) for s in dec.isets_per_cell)


def classify_cells(config: Configuration) -> list:
    """Per-cell table used by reports."""
    rows = []
    for c in faces(config):
        dec = decompose(config, c)
        rows.append(
            {
                "boundary": [list(config.points[i]) for i in c.boundary_points],
                "simple": dec.is_simple,
                "isets": [list(s.counts) for s in dec.isets_per_cell],
                "inner_cells": len(dec.inner_cells),
                "shear_resistant_0": is_0_shear_resistant(config, c, dec),
            }
        )
    return rows


def in_s0(config: Configuration) -> bool:
    """Every cell of the reduced configuration is 0-shear-resistant."""
    core = acyclic_reduction(config).core if is_connected(config) else config
    return all(is_0_shear_resistant(core, c) for c in faces(core))


def paraxial_rectangles(config: Configuration, cell: Cell) -> list:
    """Width-one rectangles spanned by facing bonds, open interior in the face."""
    fs = face_structure(config)
    fid = cell.face_id
    pset = cell.points
    idx = config.index
    pts = config.points
    out = {}
    for u in sorted(pset):
        p = pts[u]
        # horizontal bond p -> p+e1, rectangle above it
        r = idx.get((p[0] + 1, p[1]))
        if r is not None and r in pset and fs.edge_face.get((u, r)) == fid:
            a = 1
            while True:
                top_l = idx.get((p[0], p[1] + a))
                top_r = idx.get((p[0] + 1, p[1] + a))
                if top_l is not None and top_r is not None:
                    if top_l in pset and top_r in pset:
                        key = frozenset((u, r, top_l, top_r))
                        out.setdefault(key, ParaxialRectangle(
                            (u, r, top_l, top_r), RectOrientation.min_width_horizontal, (1, a)))
                    break  # the bond crosses or closes the strip
                if p[1] + a > config.coords[:, 1].max():
                    break
                a += 1
        # vertical bond p -> p+e2, rectangle to its right (face left of p+e2 -> p)
        s = idx.get((p[0], p[1] + 1))
        if s is not None and s in pset and fs.edge_face.get((s, u)) == fid:
            a = 1
            while True:
                rb = idx.get((p[0] + a, p[1]))
                rt = idx.get((p[0] + a, p[1] + 1))
                if rb is not None and rt is not None:
                    if rb in pset and rt in pset:
                        key = frozenset((u, rb, s, rt))
                        out.setdefault(key, ParaxialRectangle(
                            (u, rb, s, rt), RectOrientation.min_width_vertical, (a, 1)))
                    break
                if p[0] + a > config.coords[:, 0].max():
                    break
                a += 1
    return sorted(out.values(), key=lambda r: sorted(r.corners))


# ------------------------------------------------------------ verdict


def verdict(
    config: Configuration,
    k_cap: int = 3,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    oracle: bool = True,
) -> RigidityVerdict:
    """Angle-rigidity verdict with its evidence chain.

    Steps: trivial sizes, disconnected inputs, the (suff) test, branch
    reduction, the S0 corollary, then numerical S_k tests for k <= k_cap and
    a numerical search for a finite flex. ``oracle=False`` stops after the
    combinatorial steps and reports Undecided there.
    """
    from . import deform, flex_oracle

    t0 = time.perf_counter()

    def done(v):
        v.timing = time.perf_counter() - t0
        return v

    if config.n <= 1:
        return done(RigidityVerdict(Status.AngleRigid, Route.Trivial, "at most one point"))
    if not is_connected(config):
        fam = deform.build_split(config, tol=tol)
        return done(RigidityVerdict(Status.NotAngleRigid, Route.Disconnected, fam, family=fam))
    w = check_suff(config)
    if w is not None:
        fam = build_folding(config, w, tol=max(tol, 1e-10))
        return done(RigidityVerdict(Status.NotAngleRigid, Route.FoldingClass, w, witness=w, family=fam))
    red = acyclic_reduction(config)
    core = red.core
    notes = []
    if red.branches:
        notes.append("branches: " + ",".join(red.cases))
    cw = check_suff(core) if core.n != config.n else None
    if cw is not None:
        notes.append(f"reduced core folds about {cw.axis}")
    cells = faces(core)
    table = classify_cells(core)
    bad = [c for c, row in zip(cells, table) if not row["shear_resistant_0"]]
    if not bad:
        summary = {}
        if oracle:
            fs = flex_oracle.flex_space(config, seed=seed)
            summary = {"flex_dim": fs.flex_dim, "certificate": fs.certificate}
        return done(RigidityVerdict(Status.AngleRigid, Route.S0Corollary, "in S0, no (suff) axis",
                                    k_used=0, cells=table, oracle=summary, notes=notes))
    if not oracle:
        return done(RigidityVerdict(Status.Undecided, Route.SkOracle, None, cells=table, notes=notes))
    summary = {}
    for k in range(1, k_cap + 1):
        results = [flex_oracle.numeric_k_shear(core, c, k, seed=seed) for c in bad]
        summary[f"k={k}"] = [None if r is None else bool(r) for r in results]
        if all(r is True for r in results):
            return done(RigidityVerdict(Status.AngleRigid, Route.SkOracle, summary, k_used=k,
                                        cells=table, oracle=summary, notes=notes))
    fam = deform.find_translation_shear(config, tol=max(tol, 1e-10))
    if fam is not None:
        return done(RigidityVerdict(Status.NotAngleRigid, Route.FlexOracle, fam, family=fam,
                                    cells=table, oracle=summary, notes=notes))
    fs = flex_oracle.flex_space(config, seed=seed)
    summary["flex_dim"] = fs.flex_dim
    summary["certificate"] = fs.certificate
    for z in fs.second_order:
        fam = flex_oracle.continue_flex(config, z, tol=max(tol, 1e-10))
        if fam is not None:
            return done(RigidityVerdict(Status.NotAngleRigid, Route.FlexOracle, fam, family=fam,
                                        cells=table, oracle=summary, notes=notes))
    if fs.flex_dim == 0 and fs.certificate in ("first-order", "prestress"):
        return done(RigidityVerdict(Status.AngleRigid, Route.FlexOracle, summary,
                                    cells=table, oracle=summary, notes=notes))
    return done(RigidityVerdict(Status.Undecided, Route.SkOracle, summary,
                                cells=table, oracle=summary, notes=notes))
