"""Condition (suff), the folding class and the folding deformation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .bond_graph import is_connected
from .errors import InvalidWitness, NotConnected
from .family import DEFAULT_GRID, DeformationFamily, make_family, rotation_about_line
from .lattice_core import DEFAULT_TOL, Axis, Configuration, Orientation


@dataclass(frozen=True)
class SuffWitness:
    axis: Axis
    removed: frozenset
    components_after: int
    moving_component: frozenset
    components: tuple = ()

    def to_dict(self) -> dict:
        return {
            "axis": self.axis.to_dict(),
            "removed": sorted(self.removed),
            "components_after": self.components_after,
            "moving_component": sorted(self.moving_component),
        }


def suff_on_axis(config: Configuration, axis: Axis) -> Optional[SuffWitness]:
    """Witness for one axis, or None when removal leaves < 2 components."""
    x1, x2, ptr, idx = kernels.csr(config)
    vertical = axis.orientation is Orientation.Vertical
    k, labels = kernels.removal_labels(x1, x2, ptr, idx, int(vertical), int(axis.offset))
    if k < 2:
        return None
    return _witness(config, axis, k, labels)


def _witness(config, axis, k, labels) -> SuffWitness:
    removed = frozenset(int(i) for i in np.nonzero(labels == -1)[0])
    comps = [[] for _ in range(k)]
    for i, lab in enumerate(labels.tolist()):
        if lab >= 0:
            comps[lab].append(i)
    pts = config.points
    comps.sort(key=lambda c: min(pts[i] for i in c))
    comps = tuple(frozenset(c) for c in comps)
    return SuffWitness(axis, removed, k, comps[0], comps)


def _axis_from_code(vertical: int, off: int) -> Axis:
    return Axis(Orientation.Vertical if vertical else Orientation.Horizontal, off)


def check_suff(config: Configuration) -> Optional[SuffWitness]:
    """First axis (vertical by offset, then horizontal) fulfilling (suff)."""
    if not is_connected(config):
        raise NotConnected("check_suff needs a connected configuration")
    if config.n == 0:
        return None
    x1, x2, ptr, idx = kernels.csr(config)
    hits = kernels.suff_scan(x1, x2, ptr, idx, True)
    if not hits:
        return None
    return suff_on_axis(config, _axis_from_code(*hits[0]))


def all_suff_axes(config: Configuration) -> list:
    if not is_connected(config):
        raise NotConnected("all_suff_axes needs a connected configuration")
    x1, x2, ptr, idx = kernels.csr(config)
    return [_axis_from_code(v, o) for v, o in kernels.suff_scan(x1, x2, ptr, idx, False)]


def in_folding_class(config: Configuration) -> Optional[SuffWitness]:
    """Membership in the folding class; same answer as :func:`check_suff`."""
    return check_suff(config)


def moving_set(config: Configuration, witness: SuffWitness) -> frozenset:
    """Moving component plus the removed axis points that ride with it."""
    move = set(witness.moving_component)
    ax = witness.axis
    for i in witness.removed:
        off = [w for w in config.adjacency[i] if not ax.contains(config.points[w])]
        if len(off) == 1 and off[0] in witness.moving_component:
            move.add(i)
    return frozenset(move)


def validate_witness(config: Configuration, witness: SuffWitness) -> None:
    ax = witness.axis
    for i in witness.removed:
        if not ax.contains(config.points[i]):
            raise InvalidWitness(f"removed point {i} is off the axis")
        off = sum(1 for w in config.adjacency[i] if not ax.contains(config.points[w]))
        if off > 1:
            raise InvalidWitness(f"removed point {i} has {off} off-axis neighbors")
    fresh = suff_on_axis(config, ax)
    if fresh is None or fresh.removed != witness.removed:
        raise InvalidWitness("axis removal does not disconnect as claimed")
    if witness.moving_component not in fresh.components:
        raise InvalidWitness("moving component is not a component of the reduced set")


def fold_placement(config: Configuration, witness: SuffWitness, rho: float) -> np.ndarray:
    x = config.embedding()
    ax = witness.axis
    if ax.orientation is Orientation.Vertical:
        origin, direction = (ax.offset, 0.0, 0.0), (0.0, 1.0, 0.0)
    else:
        origin, direction = (0.0, ax.offset, 0.0), (1.0, 0.0, 0.0)
    mv = sorted(moving_set(config, witness))
    x[mv] = rotation_about_line(x[mv], origin, direction, rho)
    return x


def build_folding(
    config: Configuration,
    witness: SuffWitness,
    rho=None,
    *,
    grid=DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
) -> DeformationFamily:
    """Rotate the moving side about the witness axis by rho.

    ``rho`` may be a single amplitude or None for the default grid.
    """
    validate_witness(config, witness)
    if rho is not None:
        grid = tuple(np.atleast_1d(rho).astype(float).tolist())
    for r in grid:
        if not 0.0 < r <= np.pi / 2 + 1e-15:
            raise ValueError("fold amplitude must lie in (0, pi/2]")
    return make_family(
        "fold",
        config,
        lambda r: fold_placement(config, witness, r),
        grid,
        tol,
        axis=str(witness.axis),
        moving=sorted(moving_set(config, witness)),
    )
