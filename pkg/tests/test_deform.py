import math

import numpy as np
import pytest
from scipy.optimize import fsolve

from latrigid import fixtures
from latrigid.bond_graph import faces
from latrigid.deform import (
    build_shear,
    build_split,
    build_translation_shear,
    circle_solve,
    find_shear,
    find_translation_shear,
    translation_family,
    translation_regions,
)
from latrigid.errors import DegenerateGeometry, InvalidRegion, NoBracket, WitnessInvalid
from latrigid.lattice_core import is_angle_preserving, is_congruent


def fsolve_y3(y, t, sol):
    # independent root of the two remaining distance equations
    y1, y2, y3, y4 = y
    Y4 = sol.y_tilde_4

    def f(p):
        return [math.hypot(p[0] - y2, p[1]) - abs(y3 - y2),
                math.hypot(p[0] - Y4[0], p[1] - Y4[1]) - abs(y4 - y3)]

    return fsolve(f, [y3, 0.5 * t], xtol=1e-14)


@pytest.mark.parametrize("y,case,x3", [
    ((0, 1, 2, 1), "a", 0.1),
    ((0, 2, 3, 1), "a", 0.1),
    ((0, 3, 1, 2), "b", 0.026818272941198984),
])
def test_circle_solve_frozen(y, case, x3):
    sol = circle_solve(*y, 0.1, case)
    assert sol.x3 == pytest.approx(x3, abs=1e-12)
    assert sol.max_residual < 1e-12
    r14 = abs(y[3] - y[0])
    assert sol.s == pytest.approx(-r14 + math.sqrt(r14 ** 2 - 0.01))
    np.testing.assert_allclose(sol.y_tilde_3, fsolve_y3(y, 0.1, sol), atol=1e-10)


def test_circle_solve_errors():
    with pytest.raises(NoBracket):
        circle_solve(0, 2, 0, 2, 0.1, "b")
    with pytest.raises(DegenerateGeometry):
        circle_solve(0, 1, 0.5, 1, 0.1, "a")
    with pytest.raises(DegenerateGeometry):
        circle_solve(0, 1, 2, 3, 0.1, "b")
    with pytest.raises(NoBracket):
        circle_solve(0, 1, 2, 1, 1.5, "a")
    with pytest.raises(ValueError):
        circle_solve(0, 1, 2, 1, 0.0, "a")


def test_cookie_shear():
    c = fixtures.load("cookie")
    fam = find_shear(c, faces(c)[0])
    assert fam is not None and fam.validated and fam.nontrivial
    assert fam.meta["witness"] == [0, 9, 6, 3]
    assert fam.meta["coord"] == 2
    i = list(fam.parameter_grid).index(0.05)
    assert fam.meta["rectangle_volumes"][i] == pytest.approx(1 / 60, rel=1e-9)
    for x in fam.placements:
        assert is_angle_preserving(c, x, 1e-10, require_ball=False).preserving
        assert not is_congruent(c, x)


def test_staircase_shear():
    c = fixtures.load("staircase")
    fam = find_shear(c, faces(c)[0])
    assert fam.validated and fam.meta["witness"] == [0, 11, 8, 3]
    assert max(fam.meta["rectangle_volumes"]) > 1e-3


def test_square_has_no_shear():
    c = fixtures.load("square")
    assert find_shear(c, faces(c)[0]) is None


def test_bad_witness():
    c = fixtures.load("cookie")
    with pytest.raises(WitnessInvalid):
        build_shear(c, faces(c)[0], [0, 0, 1, 2])


def test_translation_regions_cookie():
    c = fixtures.load("cookie")
    assert [sorted(r) for r in translation_regions(c)] == [[0, 1, 2, 9, 10, 11]]
    fam = find_translation_shear(c)
    assert fam.kind == "translate" and fam.meta["moving"] == [0, 1, 2, 9, 10, 11]
    assert fam.validated and fam.nontrivial
    x = fam.at(0.1)
    assert x[0, 2] == pytest.approx(math.sin(0.1))
    assert x[0, 1] == pytest.approx(1 - math.cos(0.1))


def test_invalid_region():
    c = fixtures.load("square")
    with pytest.raises(InvalidRegion):
        build_translation_shear(c, [0], 0.1)
    with pytest.raises(InvalidRegion):
        translation_family(c, [0, 2])
    # lifting a whole edge just tilts the square
    assert not translation_family(c, [0, 1]).nontrivial


def test_build_split():
    c = fixtures.load("split")
    fam = build_split(c)
    assert fam.validated and fam.nontrivial
    with pytest.raises(InvalidRegion):
        build_split(fixtures.load("square"))
