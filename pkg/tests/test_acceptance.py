"""Acceptance criteria 1-7. Each test records one PASS/FAIL line, printed at
the end of the session by conftest."""

import time
from collections import Counter

import numpy as np
import pytest

from _acc import record
from latrigid import fixtures
from latrigid.bond_graph import faces, is_connected
from latrigid.corpus import simple_cycles
from latrigid.deform import circle_solve, find_shear
from latrigid.energy import ZERO_ENERGY, energy, strict_local_min_probe
from latrigid.family import tetra_volume
from latrigid.flex_oracle import flex_space, k_shear_report
from latrigid.folding import build_folding, check_suff
from latrigid.lattice_core import Configuration, canonical_form, is_congruent
from latrigid.shear import (
    Route,
    Status,
    in_s0,
    is_0_shear_resistant_simple,
    is_simple_cell,
    paraxial_rectangles,
    verdict,
)

K_CAP = 3


def test_criterion_1_folding_equivalence(corpus11):
    t0 = time.time()
    n = bad = 0
    worst = 0.0
    for c in corpus11:
        w = check_suff(c)
        if w is None:
            continue
        fam = build_folding(c, w, tol=1e-10)
        n += 1
        worst = max(worst, fam.max_residual)
        if not (fam.validated and fam.nontrivial):
            bad += 1
    ok = bad == 0 and n > 0
    record(1, "folding equivalence", ok,
           f"{n} folding families on {len(corpus11)} configs (n<=11), {bad} counterexamples, "
           f"worst residual {worst:.2e}, {time.time() - t0:.0f}s")
    assert ok


def test_criterion_2_corollary_consistency(corpus11):
    t0 = time.time()
    cnt = Counter()
    bad = []
    for c in corpus11:
        if not in_s0(c):
            cnt["outside S0"] += 1
            continue
        w = check_suff(c)
        v = verdict(c)
        rigid = v.status is Status.AngleRigid
        if rigid != (w is None):
            bad.append(("verdict", c.points))
        if rigid:
            fd = v.oracle.get("flex_dim") if v.oracle else None
            cert = v.oracle.get("certificate") if v.oracle else None
            if fd is None:
                fs = flex_space(c)
                fd, cert = fs.flex_dim, fs.certificate
            cnt[cert] += 1
            if fd != 0:
                bad.append(("flex_dim", c.points, fd))
        else:
            cnt["not rigid"] += 1
    ok = not bad
    record(2, "corollary consistency on S0", ok,
           f"{len(corpus11) - cnt['outside S0']} configs in S0, {cnt['not rigid']} not rigid, "
           f"{cnt['prestress']} rigid by prestress, {cnt['first-order']} rigid first-order, "
           f"{len(bad)} disagreements, {time.time() - t0:.0f}s")
    assert ok, bad[:5]


def test_criterion_3_simple_cells(corpus11):
    cycles = list(simple_cycles(14))
    # every simple cell met in the corpus is one of the enumerated cycles
    seen = set()
    for c in corpus11:
        for f in faces(c):
            if len(f.boundary_points) <= 14 and is_simple_cell(c, f):
                seen.add(canonical_form(tuple(c.points[i] for i in f.points)))
    extra = seen - set(cycles)
    bad = []
    vols = []
    for s in cycles:
        c = Configuration(s)
        (f,) = faces(c)
        mc = is_0_shear_resistant_simple(c, f)
        fs = flex_space(c)
        if mc != (fs.flex_dim == 0):
            bad.append(("flex", s, mc, fs.flex_dim))
        if not mc:
            fam = find_shear(c, f)
            if fam is None or not (fam.validated and fam.nontrivial):
                bad.append(("shear", s))
                continue
            x = fam.at(0.05)
            v = max(tetra_volume(*x[list(r.corners)]) for r in paraxial_rectangles(c, f))
            vols.append(v)
            if v < 1e-6:
                bad.append(("volume", s, v))
    ok = not bad and not extra
    record(3, "simple-cell characterization", ok,
           f"{len(cycles)} simple cells (<=14 boundary points, {len(seen)} seen in corpus), "
           f"{len(vols)} sheared, min volume at t=0.05 {min(vols):.4f}, {len(bad)} failures")
    assert ok, (bad, extra)


def _sample(rng, case):
    y1 = rng.uniform(-3, 3)
    if case == "a":
        y4 = y1 + rng.uniform(0.5, 3)
        y2 = y4 + (0.0 if rng.random() < 0.2 else rng.uniform(0, 3))
        y3 = y2 + rng.uniform(0.5, 3)
    else:
        y3 = y1 + (0.0 if rng.random() < 0.3 else rng.uniform(0, 2))
        y4 = y3 + rng.uniform(0.5, 3)
        y2 = y4 + (0.0 if rng.random() < 0.3 else rng.uniform(0, 3))
        if y3 == y1 and y2 == y4:
            y2 += 0.5
    return y1, y2, y3, y4


def test_criterion_4_geometric_construction():
    rng = np.random.default_rng(2024)
    ts = (0.1, 0.05, 0.025)
    worst, fails, nonmono, spread = 0.0, 0, 0, 1.0
    lo, hi = np.inf, 0.0
    for case in "ab":
        for _ in range(100):
            y = _sample(rng, case)
            try:
                sols = [circle_solve(*y, t, case) for t in ts]
            except Exception:
                fails += 1
                continue
            worst = max(worst, max(s.max_residual for s in sols))
            d3 = [np.linalg.norm(s.y_tilde_3 - [y[2], 0.0]) for s in sols]
            d4 = [np.linalg.norm(s.y_tilde_4 - [y[3], 0.0]) for s in sols]
            if not (d3[0] > d3[1] > d3[2] and d4[0] > d4[1] > d4[2]):
                nonmono += 1
            r = [s.x3 / s.t for s in sols]
            lo, hi = min(lo, min(r)), max(hi, max(r))
            spread = max(spread, max(r) / min(r))
    ok = fails == 0 and worst <= 1e-12 and nonmono == 0 and 0 < lo and hi <= 50 and spread <= 1.25
    record(4, "geometric construction", ok,
           f"200 inputs x 3 t, {fails} failures, worst residual {worst:.1e}, {nonmono} non-monotone, "
           f"x3/t in [{lo:.4f}, {hi:.3f}], max per-input spread {spread:.3f}")
    assert ok


def test_criterion_5_energy_equivalence(fixture_configs, fixture_verdicts):
    lines, bad = [], []
    for name, c in fixture_configs.items():
        v = fixture_verdicts[name]
        if v.status is Status.NotAngleRigid:
            fam = v.family
            x0 = c.embedding()
            hits = 0
            for x in fam.placements:
                if np.max(np.linalg.norm(x - x0, axis=1)) >= c.epsilon:
                    continue
                if energy(c, x).total <= ZERO_ENERGY and not is_congruent(c, x):
                    hits += 1
            if not hits:
                bad.append(name)
            lines.append(f"{name}:{hits}")
        elif v.status is Status.AngleRigid:
            rep = strict_local_min_probe(c, delta=0.05, samples=10_000, seed=0)
            if not rep.strict_local_min:
                bad.append(name)
            lines.append(f"{name}:probe{rep.zero_noncongruent}")
        else:
            bad.append(name)
    n_nr = sum(v.status is Status.NotAngleRigid for v in fixture_verdicts.values())
    ok = not bad
    record(5, "energy/rigidity equivalence", ok,
           f"{n_nr} flexible fixtures with zero-energy witnesses in the ball, "
           f"{len(fixture_verdicts) - n_nr} rigid fixtures probed (1e4 samples, delta=0.05), "
           f"violations {bad}")
    assert ok, lines


def _cell_with_bbox(c, lo, hi):
    for f in faces(c):
        p = np.array([c.points[i] for i in f.points])
        if tuple(p.min(axis=0)) == lo and tuple(p.max(axis=0)) == hi:
            return f
    raise LookupError


def test_criterion_6_reference_fixtures(fixture_configs, fixture_verdicts):
    checks = {}
    v = fixture_verdicts["bridge"]
    checks["bridge folds"] = (v.status is Status.NotAngleRigid and v.route is Route.FoldingClass
                              and v.family.validated)
    for name in ("cookie", "annulus"):
        v = fixture_verdicts[name]
        checks[f"{name} no suff + translation"] = (
            check_suff(fixture_configs[name]) is None and v.status is Status.NotAngleRigid
            and v.family.kind == "translate" and v.family.validated and v.family.nontrivial)
    fig8 = fixture_configs["fig8"]
    f1 = _cell_with_bbox(fig8, (-3, -2), (0, 1))
    reps = [k_shear_report(fig8, f1, k) for k in range(K_CAP + 1)]
    checks["fig8 not in S_0..S_3"] = all(
        r.status is False and r.family is not None and r.family.validated and r.volume >= 1e-6 for r in reps)
    cookie = set(map(tuple, fixture_configs["cookie"].points))
    for name, flip in (("c4", 1), ("c5", 2)):
        c = fixture_configs[name]
        (f,) = [f for f in faces(c) if {tuple(c.points[i]) for i in f.points} == cookie]
        st = [k_shear_report(c, f, k).status for k in range(K_CAP + 1)]
        checks[f"{name} flips at k={flip}"] = st == [False] * flip + [True] * (K_CAP + 1 - flip)
    ok = all(checks.values())
    vols = ", ".join(f"{r.volume:.3f}" for r in reps)
    record(6, "reference fixtures", ok,
           "; ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in checks.items()) + f" (fig8 volumes {vols})")
    assert ok, checks


def test_criterion_7_sk_monotonicity(fixture_configs):
    from latrigid.flex_oracle import numeric_k_shear

    n_cells = certified = 0
    bad = []
    for name, c in fixture_configs.items():
        if not is_connected(c):
            continue
        for f in faces(c):
            row = [numeric_k_shear(c, f, k) for k in range(K_CAP + 1)]
            n_cells += 1
            first = next((k for k, s in enumerate(row) if s is True), None)
            if first is None:
                continue
            certified += 1
            if not all(s is True for s in row[first:]):
                bad.append((name, f.face_id, row))
    ok = not bad
    record(7, "S_k monotonicity", ok,
           f"{n_cells} cells over connected fixtures, {certified} certified at some k<={K_CAP}, "
           f"{len(bad)} violations")
    assert ok, bad
