import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latrigid import corpus, fixtures
from latrigid import flex_oracle as fo
from latrigid.bond_graph import faces
from latrigid.lattice_core import Configuration, is_angle_preserving, is_congruent

clusters = st.builds(
    lambda n, seed: Configuration(corpus.random_cluster(n, np.random.default_rng(seed))),
    st.integers(2, 16),
    st.integers(0, 2**31),
)


def cell_with(c, pts):
    want = set(pts)
    (f,) = [f for f in faces(c) if {tuple(c.points[i]) for i in f.points} == want]
    return f


@pytest.mark.parametrize("name,trivial,fo_dim,flex,cert", [
    ("point", 3, 0, 0, "first-order"),
    ("path", 5, 0, 0, "first-order"),
    ("square", 6, 1, 0, "prestress"),
    ("ring8", 6, 1, 0, "prestress"),
    ("rect31", 6, 1, 0, "prestress"),
    ("bridge", 6, 3, 1, None),
])
def test_flex_space(name, trivial, fo_dim, flex, cert):
    fs = fo.flex_space(fixtures.load(name))
    assert fs.trivial_dim == trivial
    assert fs.first_order_dim == fo_dim
    assert fs.flex_dim == flex
    assert fs.certificate == cert


def test_square_first_order_flex_is_the_twist():
    # the lone first-order flex of the square lifts one diagonal pair
    c = fixtures.load("square")
    fs = fo.flex_space(c)
    z = fs.z_space[:, 0]
    z = z / z[0]
    np.testing.assert_allclose(z, [1, -1, -1, 1], atol=1e-9)
    assert fs.prestress_margin > 1.0


def test_trivial_motions_span():
    c = fixtures.load("square")
    x = c.embedding()
    T = fo.trivial_motions(x)
    J = fo.ConstraintSystem.from_config(c).jacobian(x)
    assert np.abs(J @ T).max() < 1e-12
    np.testing.assert_allclose(T.T @ T, np.eye(T.shape[1]), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(clusters, st.integers(0, 2**31))
def test_jacobian_matches_finite_differences(c, seed):
    cs = fo.ConstraintSystem.from_config(c)
    rng = np.random.default_rng(seed)
    x = c.embedding().ravel() + rng.uniform(-0.05, 0.05, 3 * c.n)
    J = cs.jacobian(x)
    h = 1e-6
    fd = np.empty_like(J)
    for k in range(3 * c.n):
        e = np.zeros(3 * c.n)
        e[k] = h
        fd[:, k] = (cs.residual(x + e) - cs.residual(x - e)) / (2 * h)
    np.testing.assert_allclose(J, fd, atol=1e-7)


def test_residual_zero_at_identity():
    c = fixtures.load("fig8")
    cs = fo.ConstraintSystem.from_config(c)
    assert np.abs(cs.residual(c.embedding())).max() == 0.0
    assert cs.n_rows == cs.jacobian(c.embedding()).shape[0]


def test_prestress_certificate_definite_form():
    F = np.array([np.eye(2)])
    margin, _ = fo.prestress_certificate(F)
    assert margin > 0.5
    F = np.array([np.diag([1.0, -1.0])])
    margin, _ = fo.prestress_certificate(F)
    assert margin < 1e-6


def test_second_order_search_indefinite():
    F = np.array([np.diag([1.0, -1.0])])
    sols = fo.second_order_search(F, seed=0)
    assert sols
    for c in sols:
        assert abs(c @ F[0] @ c) < 1e-9
        assert np.linalg.norm(c) == pytest.approx(1.0)


def test_aligned_deviation_ignores_rotations():
    rng = np.random.default_rng(0)
    x0 = rng.standard_normal((6, 3))
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    assert fo.aligned_deviation(x0 @ q.T + 1.0, x0) < 1e-12
    # a mirror image is not a proper motion
    assert fo.aligned_deviation(x0 * np.array([1, 1, -1]), x0) > 1e-3


def test_cookie_continuation():
    c = fixtures.load("cookie")
    fs = fo.flex_space(c)
    assert fs.flex_dim > 0
    fam = fo.continue_flex(c, fs.basis[:, 0])
    assert fam is not None and fam.validated and fam.nontrivial
    assert fam.meta["deviation"] >= 0.05
    xf = fam.placements[-1]
    assert is_angle_preserving(c, xf, 1e-10, require_ball=False).preserving
    assert not is_congruent(c, xf)


def test_continuation_rejects_trivial_seed():
    c = fixtures.load("square")
    T = fo.trivial_motions(c.embedding())
    assert fo.continue_flex(c, T[:, 0]) is None


def test_k_shear_square_has_no_room():
    c = fixtures.load("square")
    r = fo.k_shear_report(c, faces(c)[0], 0)
    assert r.status is True and r.certificate == "prestress"


def test_k_shear_cookie_all_k():
    c = fixtures.load("cookie")
    for k in range(4):
        assert fo.numeric_k_shear(c, faces(c)[0], k) is False


def test_k_shear_pinned_cookies():
    cookie = set(map(tuple, fixtures.load("cookie").points))
    c4 = fixtures.load("c4")
    f = cell_with(c4, cookie)
    assert [fo.numeric_k_shear(c4, f, k) for k in range(4)] == [False, True, True, True]
    c5 = fixtures.load("c5")
    f = cell_with(c5, cookie)
    rep = [fo.k_shear_report(c5, f, k) for k in range(4)]
    assert [r.status for r in rep] == [False, False, True, True]
    # the k = 1 failure comes with a validated twisting flex
    assert rep[1].family.validated and rep[1].volume >= 1e-6
    assert rep[2].certificate == "prestress"


def test_rigid_n_point_configs_lie_in_s_n():
    # rigid configurations with n points are n-shear-resistant cell by cell
    from latrigid.corpus import configurations
    from latrigid.folding import check_suff

    checked = 0
    for c in configurations(9):
        if check_suff(c) is not None:
            continue
        for f in faces(c):
            assert fo.numeric_k_shear(c, f, c.n) is True, c.points
            checked += 1
    assert checked > 100
