import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latrigid import corpus
from latrigid.errors import DegenerateAngle, DuplicatePoint, InvalidPlacement, OutOfPerturbationBall
from latrigid.lattice_core import (
    EPSILON,
    Axis,
    Configuration,
    Orientation,
    Placement,
    angle,
    canonical_form,
    is_angle_preserving,
    is_congruent,
    lattice_symmetries,
    neighbors,
    residuals,
    transform,
    triplets,
)

SQUARE = Configuration(((0, 0), (1, 0), (0, 1), (1, 1)))


def random_rotation(rng):
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


clusters = st.builds(
    lambda n, seed: Configuration(corpus.random_cluster(n, np.random.default_rng(seed))),
    st.integers(1, 14),
    st.integers(0, 2**31),
)


def test_epsilon_value():
    assert EPSILON == pytest.approx((math.sqrt(2) - 1) / 4)
    assert 0.1035 < EPSILON < 0.1036


def test_square_bonds_and_triplets():
    assert neighbors(SQUARE) == [(0, 1), (0, 2), (1, 3), (2, 3)]
    t = triplets(SQUARE)
    # two neighbours per point, both orientations
    assert len(t) == 8
    assert (1, 0, 2) in t and (2, 0, 1) in t


def test_no_diagonal_bonds():
    c = Configuration(((0, 0), (1, 1)))
    assert neighbors(c) == []


def test_duplicate_point():
    with pytest.raises(DuplicatePoint):
        Configuration(((0, 0), (1, 0), (0, 0)))


def test_clockwise_angle_in_plane():
    # from +e1 to +e2 is a quarter turn counterclockwise, so 3pi/2 clockwise
    assert angle((1, 0, 0), (0, 0, 0), (0, 1, 0)) == pytest.approx(1.5 * math.pi)
    assert angle((0, 1, 0), (0, 0, 0), (1, 0, 0)) == pytest.approx(0.5 * math.pi)
    assert angle((1, 0, 0), (0, 0, 0), (-1, 0, 0)) == pytest.approx(math.pi)


def test_off_plane_angle_unsigned():
    th, oriented = angle((1, 0, 0), (0, 0, 0), (0, 0, 1), tagged=True)
    assert not oriented
    assert th == pytest.approx(0.5 * math.pi)


def test_degenerate_angle():
    with pytest.raises(DegenerateAngle):
        angle((0, 0, 0), (0, 0, 0), (1, 0, 0))


def test_identity_preserving_and_congruent():
    rep = is_angle_preserving(SQUARE, SQUARE.embedding())
    assert rep.bond_residual == 0 and rep.angle_residual == 0 and rep.preserving
    assert is_congruent(SQUARE, SQUARE.embedding())


def test_rigid_motion_is_trivial():
    rng = np.random.default_rng(3)
    x = SQUARE.embedding() @ random_rotation(rng).T + rng.standard_normal(3)
    rep = is_angle_preserving(SQUARE, x, require_ball=False)
    assert rep.preserving
    assert is_congruent(SQUARE, x)


def test_perturbation_ball():
    x = SQUARE.embedding()
    x[0, 2] = 0.2
    with pytest.raises(OutOfPerturbationBall):
        is_angle_preserving(SQUARE, x)
    rep = is_angle_preserving(SQUARE, x, require_ball=False)
    assert not rep.preserving


def test_placement_validation():
    with pytest.raises(InvalidPlacement):
        Placement(np.zeros((3, 2)))
    with pytest.raises(InvalidPlacement):
        Placement(np.full((2, 3), np.nan))
    with pytest.raises(InvalidPlacement):
        is_angle_preserving(SQUARE, np.zeros((3, 3)))


def test_axis_text_and_order():
    v0 = Axis(Orientation.Vertical, 0)
    h0 = Axis(Orientation.Horizontal, 0)
    vm = Axis(Orientation.Vertical, -2)
    assert str(v0) == "x1=0" and str(h0) == "x2=0"
    assert sorted([h0, v0, vm], key=lambda a: a.sort_key) == [vm, v0, h0]
    assert v0.contains((0, 5)) and not v0.contains((1, 0))


def test_lattice_symmetries_are_the_dihedral_group():
    mats = lattice_symmetries()
    assert len({m.tobytes() for m in mats}) == 8
    for m in mats:
        assert abs(round(np.linalg.det(m))) == 1


@settings(max_examples=60, deadline=None)
@given(clusters, st.integers(0, 7), st.integers(-5, 5), st.integers(-5, 5))
def test_canonical_form_invariant(c, k, dx, dy):
    m = lattice_symmetries()[k]
    assert canonical_form(transform(c, m, (dx, dy)).points) == canonical_form(c.points)


@settings(max_examples=40, deadline=None)
@given(clusters, st.integers(0, 2**31))
def test_isometries_preserve(c, seed):
    rng = np.random.default_rng(seed)
    x = c.embedding() @ random_rotation(rng).T + rng.uniform(-3, 3, 3)
    rb, ra = residuals(c, x)
    assert rb < 1e-12 and ra < 1e-7
    assert is_congruent(c, x, 1e-9)


@settings(max_examples=40, deadline=None)
@given(clusters, st.integers(0, 2**31))
def test_random_perturbation_breaks_constraints(c, seed):
    if not len(c.bond_array):
        return
    rng = np.random.default_rng(seed)
    x = c.embedding() + rng.uniform(-0.05, 0.05, (c.n, 3))
    rep = is_angle_preserving(c, x, require_ball=False)
    assert not rep.preserving
