"""Angle-rigidity of finite Z^2 configurations embedded in 3-space."""

from .lattice_core import (
    EPSILON,
    Axis,
    Configuration,
    LatticePoint,
    Orientation,
    Placement,
    angle,
    is_angle_preserving,
    is_congruent,
    neighbors,
    triplets,
)

__version__ = "0.1.0"
