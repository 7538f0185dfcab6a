"""Numerical ground truth: flex spaces, continuation, S_k tests.

Constraints per bond: |x_j - x_i|^2 - 1. Per right-angle triplet (a, v, b):
(x_a - x_v).(x_b - x_v). Per straight triplet: the midpoint equation
x_a + x_b - 2 x_v = 0 (three rows). With unit lengths these say the same as
"cos of the image angle equals cos of the lattice angle", but unlike the
cosine they have a nonzero derivative at the straight angle.

At a planar configuration every out-of-plane motion z with zero midpoint
defect is a first-order flex, so first-order counting alone can never
certify rigidity. The oracle therefore works at second order: with L the
in-plane Jacobian and W a basis of its left kernel (self-stresses), a
first-order flex z extends to second order iff w.Q(z) = 0 for all w in W,
where Q collects the quadratic out-of-plane parts of the constraints.
A combination sum_k l_k w_k.Q that is positive definite on the nontrivial
z-space certifies rigidity (prestress stability).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import null_space, orthogonal_procrustes
from scipy.optimize import least_squares, minimize

from .family import DeformationFamily, tetra_volume
from .lattice_core import DEFAULT_TOL, Configuration, is_angle_preserving, is_congruent

SVD_CUTOFF = 1e-8
PRESTRESS_MARGIN = 1e-6
ROOT_TOL = 1e-10


@dataclass
class ConstraintSystem:
    n: int
    bonds: np.ndarray  # (m, 2)
    right: np.ndarray  # (r, 3) a, v, b
    straight: np.ndarray  # (s, 3) a, v, b

    @classmethod
    def from_config(cls, config: Configuration) -> "ConstraintSystem":
        x = config.coords
        t = config.triplet_array
        if len(t):
            d = np.einsum("ij,ij->i", x[t[:, 0]] - x[t[:, 1]], x[t[:, 2]] - x[t[:, 1]])
            right, straight = t[d == 0], t[d != 0]
        else:
            right = straight = np.zeros((0, 3), dtype=np.int64)
        return cls(config.n, config.bond_array, right, straight)

    @property
    def n_constraints(self) -> int:
        return len(self.bonds) + len(self.right) + len(self.straight)

    @property
    def n_rows(self) -> int:
        return len(self.bonds) + len(self.right) + 3 * len(self.straight)

    def residual(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(self.n, 3)
        b, r, s = self.bonds, self.right, self.straight
        parts = []
        if len(b):
            d = x[b[:, 1]] - x[b[:, 0]]
            parts.append(np.einsum("ij,ij->i", d, d) - 1.0)
        if len(r):
            parts.append(np.einsum("ij,ij->i", x[r[:, 0]] - x[r[:, 1]], x[r[:, 2]] - x[r[:, 1]]))
        if len(s):
            parts.append((x[s[:, 0]] + x[s[:, 2]] - 2.0 * x[s[:, 1]]).ravel())
        return np.concatenate(parts) if parts else np.zeros(0)

    def jacobian(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(self.n, 3)
        J = np.zeros((self.n_rows, 3 * self.n))
        row = 0
        for i, j in self.bonds:
            d = x[j] - x[i]
            J[row, 3 * j:3 * j + 3] += 2 * d
            J[row, 3 * i:3 * i + 3] -= 2 * d
            row += 1
        for a, v, b in self.right:
            da, db = x[a] - x[v], x[b] - x[v]
            J[row, 3 * a:3 * a + 3] += db
            J[row, 3 * b:3 * b + 3] += da
            J[row, 3 * v:3 * v + 3] -= da + db
            row += 1
        for a, v, b in self.straight:
            for c in range(3):
                J[row, 3 * a + c] += 1
                J[row, 3 * b + c] += 1
                J[row, 3 * v + c] -= 2
                row += 1
        return J


def trivial_motions(x: np.ndarray) -> np.ndarray:
    """Columns spanning infinitesimal isometries at placement x (3n rows)."""
    n = x.shape[0]
    cols = []
    for k in range(3):
        t = np.zeros((n, 3))
        t[:, k] = 1.0
        cols.append(t.ravel())
    c = x - x.mean(axis=0)
    for k in range(3):
        w = np.zeros(3)
        w[k] = 1.0
        cols.append(np.cross(w, c).ravel())
    T = np.array(cols).T
    u, s, _ = np.linalg.svd(T, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((3 * n, 0))
    r = int((s > 1e-9 * s[0]).sum())
    return u[:, :r]


def _rank(s: np.ndarray, cutoff: float) -> int:
    if s.size == 0 or s[0] == 0:
        return 0
    return int((s > cutoff * s[0]).sum())


@dataclass
class FlexSpace:
    jacobian_rank: int
    trivial_dim: int
    nullity: int
    first_order_dim: int  # nullity - trivial_dim
    flex_dim: int  # nontrivial flex directions surviving the second-order test
    basis: np.ndarray  # 3n x first_order_dim, orthonormal, orthogonal to trivial motions
    certificate: Optional[str]  # "first-order", "prestress", or None
    z_space: np.ndarray = field(repr=False, default=None)  # n x d out-of-plane flexes mod affine
    n_stresses: int = 0
    forms: np.ndarray = field(repr=False, default=None)  # K x d x d
    prestress_margin: float = float("nan")
    second_order: list = field(default_factory=list)  # 3n unit vectors
    inplane_extra: int = 0

    def summary(self) -> dict:
        return {
            "jacobian_rank": self.jacobian_rank,
            "trivial_dim": self.trivial_dim,
            "first_order_dim": self.first_order_dim,
            "flex_dim": self.flex_dim,
            "certificate": self.certificate,
            "stresses": self.n_stresses,
            "prestress_margin": None if np.isnan(self.prestress_margin) else float(self.prestress_margin),
        }


def second_order_data(config: Configuration, cutoff: float = SVD_CUTOFF):
    """(L rank, W, V, forms, in-plane nullity) at the identity placement."""
    n = config.n
    cs = ConstraintSystem.from_config(config)
    x = config.coords.astype(float)
    rows = []
    quad_u, quad_w, quad_rows = [], [], []
    for i, j in cs.bonds:
        r = np.zeros(2 * n)
        e = x[j] - x[i]
        r[2 * j:2 * j + 2] += 2 * e
        r[2 * i:2 * i + 2] -= 2 * e
        quad_rows.append(len(rows))
        quad_u.append((i, j))
        quad_w.append((i, j))
        rows.append(r)
    for a, v, b in cs.right:
        r = np.zeros(2 * n)
        ea, eb = x[a] - x[v], x[b] - x[v]
        r[2 * a:2 * a + 2] += eb
        r[2 * b:2 * b + 2] += ea
        r[2 * v:2 * v + 2] -= ea + eb
        quad_rows.append(len(rows))
        quad_u.append((a, v))
        quad_w.append((b, v))
        rows.append(r)
    mid = []
    for a, v, b in cs.straight:
        for c in range(2):
            r = np.zeros(2 * n)
            r[2 * a + c] += 1
            r[2 * b + c] += 1
            r[2 * v + c] -= 2
            rows.append(r)
        m = np.zeros(n)
        m[a] += 1
        m[b] += 1
        m[v] -= 2
        mid.append(m)
    L = np.array(rows).reshape(-1, 2 * n)
    if L.shape[0]:
        U, s, _ = np.linalg.svd(L, full_matrices=True)
        rk = _rank(s, cutoff)
        W = U[:, rk:]
    else:
        rk, W = 0, np.zeros((0, 0))
    inplane_null = 2 * n - rk
    A = np.column_stack([np.ones(n), x[:, 0], x[:, 1]])
    C = np.vstack([np.array(mid).reshape(-1, n), A.T])
    V = null_space(C, rcond=cutoff) if n else np.zeros((0, 0))
    d = V.shape[1]
    K = W.shape[1]
    if d and K and quad_rows:
        qr = np.array(quad_rows)
        iu = np.array(quad_u)
        iw = np.array(quad_w)
        Au = V[iu[:, 0]] - V[iu[:, 1]]  # C x d
        Aw = V[iw[:, 0]] - V[iw[:, 1]]
        Wq = W[qr]  # C x K
        F = np.einsum("ck,ci,cj->kij", Wq, Au, Aw)
        F = 0.5 * (F + np.transpose(F, (0, 2, 1)))
    else:
        F = np.zeros((K, d, d))
    return rk, W, V, F, inplane_null


def prestress_certificate(F: np.ndarray, mu: float = 1e-2):
    """Maximise the smallest eigenvalue of sum_k l_k F_k over the box |l_k| <= 1.

    Returns (margin, l). The objective is concave, a smoothed minimum is
    maximised with L-BFGS-B and the margin is the true smallest eigenvalue at
    the optimum.
    """
    K, d, _ = F.shape
    if K == 0 or d == 0:
        return (np.inf if d == 0 else -np.inf), np.zeros(K)
    # cheap start: the best single form, either sign
    best_l, best_val = None, -np.inf
    for k in range(K):
        e = np.linalg.eigvalsh(F[k])
        for sgn, val in ((1.0, e[0]), (-1.0, -e[-1])):
            if val > best_val:
                best_val = val
                best_l = np.zeros(K)
                best_l[k] = sgn
    if best_val > PRESTRESS_MARGIN:
        return best_val, best_l

    def f(l, mu):
        A = np.tensordot(l, F, 1)
        e, U = np.linalg.eigh(A)
        z = np.exp(-(e - e[0]) / mu)
        w = z / z.sum()
        val = e[0] - mu * np.log(z.sum())
        P = (U * w) @ U.T
        g = np.einsum("kij,ij->k", F, P)
        return -val, -g

    l = best_l.copy()
    for m in (mu, mu * 0.1):
        r = minimize(f, l, args=(m,), jac=True, method="L-BFGS-B", bounds=[(-1, 1)] * K,
                     options={"maxiter": 500})
        l = r.x
    margin = float(np.linalg.eigvalsh(np.tensordot(l, F, 1))[0])
    return margin, l


def _starts(d: int, rng, extra: int):
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        yield e
    for _ in range(extra):
        v = rng.standard_normal(d)
        yield v / np.linalg.norm(v)


def second_order_search(F: np.ndarray, seed: int = 0, n_random: Optional[int] = None,
                        tol: float = ROOT_TOL) -> list:
    """Unit vectors c with c.F_k.c = 0 for every k (multistart least squares)."""
    K, d, _ = F.shape
    if d == 0:
        return []
    if K == 0:
        return list(np.eye(d))
    rng = np.random.default_rng(seed)
    n_random = 2 * d + 6 if n_random is None else n_random

    def res(c):
        return np.concatenate([np.einsum("i,kij,j->k", c, F, c), [c @ c - 1.0]])

    def jac(c):
        return np.vstack([2.0 * (F @ c), 2.0 * c[None, :]])

    method = "lm" if K + 1 >= d else "trf"
    found = []
    for c0 in _starts(d, rng, n_random):
        r = least_squares(res, c0, jac=jac, method=method, xtol=1e-15, ftol=1e-15, gtol=1e-15,
                          max_nfev=200 * d)
        c = r.x / np.linalg.norm(r.x)
        if np.linalg.norm(np.einsum("i,kij,j->k", c, F, c)) <= tol:
            if not any(abs(c @ f) > 1 - 1e-8 for f in found):
                found.append(c)
    return found


def twist_search(F: np.ndarray, tau: np.ndarray, seed: int = 0, n_random: int = 8,
                 tol: float = ROOT_TOL) -> Optional[np.ndarray]:
    """A second-order flex c (unit) with tau.c != 0, or None."""
    K, d, _ = F.shape
    nt = float(np.linalg.norm(tau))
    if d == 0 or nt < 1e-9:
        return None
    tau = tau / nt
    if K == 0:
        return tau
    rng = np.random.default_rng(seed)

    def res(c):
        return np.concatenate([np.einsum("i,kij,j->k", c, F, c), [tau @ c - 1.0]])

    def jac(c):
        return np.vstack([2.0 * (F @ c), tau[None, :]])

    method = "lm" if K + 1 >= d else "trf"
    starts = [tau] + [tau + 0.5 * rng.standard_normal(d) for _ in range(n_random)]
    for c0 in starts:
        r = least_squares(res, c0, jac=jac, method=method, xtol=1e-15, ftol=1e-15, gtol=1e-15,
                          max_nfev=200 * d)
        c = r.x
        nc = np.linalg.norm(c)
        if nc > 1e6 or abs(tau @ c - 1.0) > 1e-6:
            continue
        u = c / nc
        if np.linalg.norm(np.einsum("i,kij,j->k", u, F, u)) <= tol:
            return u
    return None


def _embed_z(z: np.ndarray) -> np.ndarray:
    out = np.zeros((z.shape[0], 3))
    out[:, 2] = z
    return out.ravel()


def flex_space(config: Configuration, subset=None, cutoff: float = SVD_CUTOFF, seed: int = 0,
               search: bool = True) -> FlexSpace:
    """Flex space at the identity placement, corrected at second order."""
    if subset is not None:
        config = config.subset(sorted(subset))
    n = config.n
    if n == 0:
        return FlexSpace(0, 0, 0, 0, 0, np.zeros((0, 0)), "first-order")
    cs = ConstraintSystem.from_config(config)
    x0 = config.embedding()
    J = cs.jacobian(x0)
    T = trivial_motions(x0)
    tdim = T.shape[1]
    if J.shape[0]:
        s = np.linalg.svd(J, compute_uv=False)
        jr = _rank(s, cutoff)
    else:
        jr = 0
    nullity = 3 * n - jr
    rk, W, V, F, inull = second_order_data(config, cutoff)
    in_trivial = 3 if n >= 2 else 2
    extra = max(inull - in_trivial, 0)
    basis_cols = [_embed_z(V[:, i]) for i in range(V.shape[1])]
    if extra:
        # relative in-plane motions of separate components
        from .bond_graph import components

        for comp in components(config.adjacency)[1:]:
            for k in range(2):
                v = np.zeros((n, 3))
                v[comp, k] = 1.0
                basis_cols.append(v.ravel())
    B = np.array(basis_cols).T if basis_cols else np.zeros((3 * n, 0))
    if B.shape[1]:
        B = B - T @ (T.T @ B)
        q, rr = np.linalg.qr(B)
        keep = np.abs(np.diag(rr)) > 1e-9
        B = q[:, keep]
    d = V.shape[1]
    fs = FlexSpace(jr, tdim, nullity, nullity - tdim, extra, B, None, V, W.shape[1], F)
    fs.inplane_extra = extra
    if d == 0:
        fs.certificate = "first-order" if extra == 0 else None
        return fs
    margin, _ = prestress_certificate(F)
    fs.prestress_margin = margin
    if margin > PRESTRESS_MARGIN:
        fs.certificate = "prestress" if extra == 0 else None
        return fs
    if not search:
        fs.flex_dim = extra
        return fs
    sols = second_order_search(F, seed=seed)
    fs.second_order = [_embed_z(V @ c) for c in sols]
    if sols:
        S = np.array(sols)
        sv = np.linalg.svd(S, compute_uv=False)
        fs.flex_dim = extra + _rank(sv, 1e-6)
    return fs


# ------------------------------------------------------------ continuation


def aligned_deviation(x: np.ndarray, x0: np.ndarray) -> float:
    """Max point distance between x and x0 after the best rigid alignment."""
    a = x - x.mean(axis=0)
    b = x0 - x0.mean(axis=0)
    R, _ = orthogonal_procrustes(a, b)
    if np.linalg.det(R) < 0:
        u, _, vt = np.linalg.svd(a.T @ b)
        dfix = np.diag([1.0, 1.0, -1.0])
        R = u @ dfix @ vt
    return float(np.max(np.linalg.norm(a @ R - b, axis=1)))


def _correct(cs: ConstraintSystem, x: np.ndarray, tangent: np.ndarray, anchor: np.ndarray,
             tol: float, iters: int = 40):
    for _ in range(iters):
        F = cs.residual(x)
        g = tangent @ (x - anchor)
        if np.max(np.abs(F), initial=0.0) <= 0.1 * tol and abs(g) <= 1e-13:
            return x, True
        J = cs.jacobian(x)
        A = np.vstack([J, tangent[None, :]])
        rhs = -np.concatenate([F, [g]])
        dx = np.linalg.lstsq(A, rhs, rcond=None)[0]
        x = x + dx
        if not np.all(np.isfinite(x)):
            return x, False
    F = cs.residual(x)
    return x, bool(np.max(np.abs(F), initial=0.0) <= tol)


def continue_flex(config: Configuration, seed, steps: int = 500, tol: float = 1e-10,
                  step: float = 0.01, target: float = 0.05, rects=None) -> Optional[DeformationFamily]:
    """Follow a flex direction from the identity until it is 0.05 away from
    every congruent copy, then validate. None means the continuation failed,
    which says nothing about rigidity.
    """
    n = config.n
    cs = ConstraintSystem.from_config(config)
    x0 = config.embedding().ravel()
    T = trivial_motions(x0.reshape(n, 3))
    s = np.asarray(seed, dtype=float).ravel()
    s = s - T @ (T.T @ s)
    if np.linalg.norm(s) < 1e-12:
        return None
    s = s / np.linalg.norm(s)
    # second-order predictor: J w = -q(s), q the quadratic part of the residual
    J0 = cs.jacobian(x0)
    q = cs.residual(x0 + s) - cs.residual(x0) - J0 @ s
    w = np.linalg.lstsq(J0, -q, rcond=None)[0]
    path = [x0.reshape(n, 3).copy()]
    params = [0.0]
    x = x0.copy()
    tangent = s
    for it in range(steps):
        if it == 0:
            pred = x0 + step * s + step * step * w
        else:
            pred = x + step * tangent
        xn, ok = _correct(cs, pred, tangent, pred, tol)
        if not ok:
            return None
        sec = xn - x
        if np.linalg.norm(sec) < 1e-14:
            return None
        tangent = sec / np.linalg.norm(sec)
        x = xn
        path.append(x.reshape(n, 3).copy())
        params.append(params[-1] + float(np.linalg.norm(sec)))
        dev = aligned_deviation(path[-1], path[0])
        if dev >= target:
            break
    else:
        return None
    xf = path[-1]
    rep = is_angle_preserving(config, xf, tol, require_ball=False)
    if not rep.preserving or is_congruent(config, xf, tol):
        return None
    res, cong, disp = [], [], []
    for p in path[1:]:
        r = is_angle_preserving(config, p, tol, require_ball=False)
        res.append((r.bond_residual, r.angle_residual))
        cong.append(is_congruent(config, p, tol))
        disp.append(r.max_displacement)
    fam = DeformationFamily("continuation", config, tuple(params[1:]), path[1:], res, cong, disp, tol,
                            None, {"deviation": aligned_deviation(xf, path[0]), "steps": len(path) - 1})
    if rects:
        fam.meta["rectangle_volumes"] = [max(tetra_volume(*p[list(r.corners)]) for r in rects) for p in path[1:]]
    return fam


# ------------------------------------------------------------ S_k


@dataclass
class KShearResult:
    status: Optional[bool]  # True resistant, False not, None undecided
    k: int
    n_points: int
    certificate: Optional[str] = None
    family: Optional[DeformationFamily] = None
    rectangle: Optional[tuple] = None
    volume: float = 0.0
    notes: list = field(default_factory=list)


def _cell_in_sub(config: Configuration, cell, sub: Configuration, pts: tuple):
    from .bond_graph import face_structure

    pos = {p: i for i, p in enumerate(pts)}
    fs = face_structure(sub)
    w = cell.boundary_points
    fid = fs.edge_face.get((pos[w[0]], pos[w[1]]))
    for c in fs.cells:
        if c.face_id == fid:
            return c
    raise AssertionError("cell lost in its k-neighbourhood")


def k_shear_report(config: Configuration, cell, k: int, seed: int = 0,
                   min_volume: float = 1e-6, tol: float = 1e-10) -> KShearResult:
    """Numerical k-shear-resistance of ``cell`` inside ``config``."""
    from . import deform
    from .bond_graph import k_cell
    from .shear import paraxial_rectangles

    kc = k_cell(config, cell, k)
    sub = config.subset(kc.points)
    zc = _cell_in_sub(config, cell, sub, kc.points)
    rects = paraxial_rectangles(sub, zc)
    out = KShearResult(None, k, sub.n)
    if not rects:
        out.status = True
        out.notes.append("no paraxial rectangles")
        return out
    fs = flex_space(sub, seed=seed, search=False)
    if fs.certificate is not None:
        out.status = True
        out.certificate = fs.certificate
        return out
    V, F = fs.z_space, fs.forms
    stuck = False
    for r in rects:
        tau = np.zeros(sub.n)
        a, b, c, d = r.corners
        tau[[a, d]] += 1.0
        tau[[b, c]] -= 1.0
        cvec = twist_search(F, V.T @ tau, seed=seed)
        if cvec is None:
            continue
        fam = continue_flex(sub, _embed_z(V @ cvec), tol=tol, rects=rects)
        if fam is not None:
            vol = fam.meta["rectangle_volumes"][-1]
            if vol >= min_volume:
                out.status, out.family, out.rectangle, out.volume = False, fam, r.corners, vol
                return out
        stuck = True
    if stuck:
        # explicit constructions as a fallback for hard continuations
        fam = deform.find_translation_shear(sub, tol=tol)
        if fam is not None:
            x = fam.at(0.05)
            vol = max(tetra_volume(*x[list(r.corners)]) for r in rects)
            if vol >= min_volume:
                out.status, out.family, out.volume = False, fam, vol
                return out
        out.notes.append("twisting second-order flex found but not continued")
        return out
    out.status = True
    out.certificate = "no-twisting-second-order-flex"
    return out


def numeric_k_shear(config: Configuration, cell, k: int, seed: int = 0) -> Optional[bool]:
    """True: k-shear-resistant, False: a validated flex twists a rectangle,
    None: undecided."""
    return k_shear_report(config, cell, k, seed=seed).status
