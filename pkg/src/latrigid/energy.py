"""Configurational energy E = E2 + E3 and the strict local minimum probe.

E2 penalises bond lengths away from 1, E3 penalises triplet angles away from
the lattice values pi/2, pi, 3pi/2. Both vanish on the identity placement, so
an angle-rigid configuration is a strict local minimiser modulo isometries
and a flexible one has zero-energy non-congruent placements nearby.

Note that E3 is zero at all three lattice angles, so a right angle that
became straight would cost nothing. Inside the small perturbation ball this
cannot happen, which is why the equivalence is a local statement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import least_squares

from .lattice_core import Configuration, is_congruent, unsigned_angles

HALF_PI = 0.5 * np.pi
ZERO_ENERGY = 1e-16


def default_v2(r):
    return (np.asarray(r, dtype=float) - 1.0) ** 2


def default_v3(theta):
    th = np.asarray(theta, dtype=float)
    d = np.minimum(np.minimum(np.abs(th - HALF_PI), np.abs(th - np.pi)), np.abs(th - 3 * HALF_PI))
    return d * d


@dataclass(frozen=True)
class PotentialPair:
    v2: Callable = default_v2
    v3: Callable = default_v3


DEFAULT_POTENTIALS = PotentialPair()


@dataclass
class EnergyReport:
    e2: float
    e3: float
    total: float
    per_bond: np.ndarray = field(repr=False)
    per_triplet: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {"e2": self.e2, "e3": self.e3, "total": self.total}


def _terms(config: Configuration, x: np.ndarray, pot: PotentialPair):
    b = config.bond_array
    t = config.triplet_array
    if len(b):
        r = np.linalg.norm(x[b[:, 0]] - x[b[:, 1]], axis=1)
        pb = pot.v2(r)
    else:
        pb = np.zeros(0)
    if len(t):
        # unsigned angle in [0, pi]; v3 is symmetric about pi so the
        # reflected value 2pi - theta gives the same contribution
        pt = pot.v3(unsigned_angles(x, t))
    else:
        pt = np.zeros(0)
    return pb, pt


def energy(config: Configuration, placement, potentials: PotentialPair = DEFAULT_POTENTIALS) -> EnergyReport:
    """E2 + E3 with the topology frozen at the lattice configuration.

    The sums run over ordered pairs and ordered triplets with a factor 1/2,
    so every unordered bond and triplet is counted once.
    """
    x = np.asarray(placement, dtype=float).reshape(config.n, 3)
    pb, pt = _terms(config, x, potentials)
    # ordered sums with 1/2 equal the sums over unordered bonds and triplets
    e2 = float(pb.sum())
    e3 = float(pt.sum())
    return EnergyReport(e2, e3, e2 + e3, pb, pt)


@dataclass
class ProbeReport:
    delta: float
    samples: int
    seed: int
    zero_noncongruent: int  # sampled zero-energy non-congruent placements
    min_energy: float  # smallest positive sampled energy
    family_witnesses: int = 0  # zero-energy non-congruent family members
    family_checked: int = 0
    descents: int = 0
    descent_max_deviation: Optional[float] = None
    descent_zero_noncongruent: int = 0

    @property
    def strict_local_min(self) -> bool:
        return self.zero_noncongruent == 0 and self.family_witnesses == 0 and self.descent_zero_noncongruent == 0

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()} | {"strict_local_min": self.strict_local_min}


def _aligned_deviation(x, x0):
    from .flex_oracle import aligned_deviation

    return aligned_deviation(x, x0)


def strict_local_min_probe(
    config: Configuration,
    potentials: PotentialPair = DEFAULT_POTENTIALS,
    delta: float = 0.05,
    samples: int = 10_000,
    *,
    seed: int = 0,
    family=None,
    descents: int = 0,
    tol: float = 1e-9,
) -> ProbeReport:
    """Random placements with every point in its delta-ball.

    Each point moves uniformly inside a cube of side 2 delta / sqrt(3), which
    fits in the ball. ``family`` (a DeformationFamily) adds its members that
    lie inside the ball as deterministic witnesses. ``descents`` > 0 also runs
    that many energy minimisations from sampled starts and records how far
    the zero-energy end points sit from the congruence class of the identity.
    """
    if delta >= config.epsilon:
        raise ValueError("delta must be smaller than epsilon")
    x0 = config.embedding()
    n = config.n
    rng = np.random.default_rng(seed)
    h = delta / np.sqrt(3.0)
    zero_nc = 0
    emin = np.inf
    if delta > 0 and n:
        for _ in range(samples):
            x = x0 + rng.uniform(-h, h, size=(n, 3))
            e = energy(config, x, potentials).total
            if e <= ZERO_ENERGY:
                if not is_congruent(config, x, tol):
                    zero_nc += 1
            elif e < emin:
                emin = e
    rep = ProbeReport(delta, samples, seed, zero_nc, float(emin))
    if family is not None:
        for x in family.placements:
            disp = float(np.max(np.linalg.norm(x - x0, axis=1)))
            if disp >= config.epsilon:
                continue
            rep.family_checked += 1
            if energy(config, x, potentials).total <= ZERO_ENERGY and not is_congruent(config, x, tol):
                rep.family_witnesses += 1
    if descents and delta > 0 and n > 1:
        from .flex_oracle import ConstraintSystem

        # descend on the smooth constraint residuals; near the identity their
        # zero set is the zero set of E
        cs = ConstraintSystem.from_config(config)
        devs = []
        for _ in range(descents):
            start = x0 + rng.uniform(-h, h, size=(n, 3))
            r = least_squares(cs.residual, start.ravel(), jac=cs.jacobian, method="trf",
                              xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=500)
            x = r.x.reshape(n, 3)
            if energy(config, x, potentials).total <= ZERO_ENERGY:
                d = _aligned_deviation(x, x0)
                devs.append(d)
                if d > 1e-6:
                    rep.descent_zero_noncongruent += 1
        rep.descents = len(devs)
        rep.descent_max_deviation = float(max(devs)) if devs else None
    return rep
