"""One-parameter families of placements and their validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .lattice_core import DEFAULT_TOL, Configuration, is_angle_preserving, is_congruent

DEFAULT_GRID = (0.2, 0.1, 0.05, 0.025, 0.0125)


@dataclass
class DeformationFamily:
    """Placements t -> phi_t evaluated on a parameter grid.

    ``generator`` evaluates the family at any parameter value so callers can
    go beyond the stored grid.
    """

    kind: str
    config: Configuration
    parameter_grid: tuple
    placements: list
    residuals: list  # (bond, angle) per grid value
    congruent_flags: list
    displacements: list
    tol: float = DEFAULT_TOL
    generator: Optional[Callable[[float], np.ndarray]] = field(default=None, repr=False)
    meta: dict = field(default_factory=dict)

    @property
    def validated(self) -> bool:
        return all(max(r) <= self.tol for r in self.residuals)

    @property
    def nontrivial(self) -> bool:
        return not any(self.congruent_flags)

    @property
    def max_residual(self) -> float:
        return max((max(r) for r in self.residuals), default=0.0)

    def at(self, t: float) -> np.ndarray:
        if self.generator is None:
            i = self.parameter_grid.index(t)
            return self.placements[i]
        return self.generator(t)

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "grid": list(self.parameter_grid),
            "bond_residuals": [r[0] for r in self.residuals],
            "angle_residuals": [r[1] for r in self.residuals],
            "congruent": list(self.congruent_flags),
            "max_displacement": list(self.displacements),
            "validated": self.validated,
            "meta": {k: v for k, v in self.meta.items() if isinstance(v, (int, float, str, bool, list))},
        }


def make_family(
    kind: str,
    config: Configuration,
    fn: Callable[[float], np.ndarray],
    grid: Sequence[float] = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
    **meta,
) -> DeformationFamily:
    placements, res, cong, disp = [], [], [], []
    for t in grid:
        x = np.asarray(fn(t), dtype=float)
        rep = is_angle_preserving(config, x, tol, require_ball=False)
        placements.append(x)
        res.append((rep.bond_residual, rep.angle_residual))
        cong.append(is_congruent(config, x, tol))
        disp.append(rep.max_displacement)
    return DeformationFamily(kind, config, tuple(grid), placements, res, cong, disp, tol, fn, dict(meta))


def rotation_about_line(points: np.ndarray, origin, direction, angle: float) -> np.ndarray:
    """Rotate rows of ``points`` about the line origin + s*direction (Rodrigues)."""
    k = np.asarray(direction, dtype=float)
    k = k / np.linalg.norm(k)
    p = np.asarray(points, dtype=float) - np.asarray(origin, dtype=float)
    c, s = np.cos(angle), np.sin(angle)
    rot = p * c + np.cross(k, p) * s + np.outer(p @ k, k) * (1.0 - c)
    return rot + np.asarray(origin, dtype=float)


def tetra_volume(a, b, c, d) -> float:
    """Volume of the tetrahedron spanned by four points."""
    m = np.array([np.asarray(b) - a, np.asarray(c) - a, np.asarray(d) - a], dtype=float)
    return abs(float(np.linalg.det(m))) / 6.0
