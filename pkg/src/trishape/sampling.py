"""Randomized initial conditions for test suites and experiments.

All generators take a numpy Generator so suites are reproducible from a
seed.  Newton states are built with exact zero linear and angular momentum
and the energy set exactly by velocity scaling; moduli states satisfy the
energy integral by construction.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import TriangleState, configuration_from_shape
from .masses import MassDistribution, normalize_masses
from .newton import diagnostics, make_zero_momentum_state
from .potential import critical_points, shape_potential
from .reduced import ModuliState, moduli_state_from_vectors

__all__ = [
    "random_masses", "random_newton_state", "figure_eight_state",
    "random_moduli_state", "ejection_state",
]


def random_masses(rng: np.random.Generator,
                  floor: float = 0.12) -> MassDistribution:
    """Mass triple bounded away from degenerate ratios."""
    u = rng.random(3)
    m = floor + u
    m = m / m.sum()
    return normalize_masses(*m)


def random_newton_state(rng: np.random.Generator, masses: MassDistribution,
                        h: float, min_sep: float = 0.35,
                        max_tries: int = 200) -> TriangleState:
    """Zero-momentum configuration with energy exactly h.

    Positions are drawn in a unit box and rescaled so the potential
    dominates |h| (guaranteeing a positive kinetic budget), then the
    velocity field is momentum-cleaned and scaled to hit the energy.
    """
    m = masses.m
    ma = masses.m_arr
    for _ in range(max_tries):
        pos = rng.uniform(-1.0, 1.0, (3, 2))
        d = [np.linalg.norm(pos[i] - pos[j]) for i, j in ((0, 1), (0, 2),
                                                          (1, 2))]
        if min(d) < min_sep * max(d):
            continue
        U = sum(m[i] * m[j] / np.linalg.norm(pos[i] - pos[j])
                for i, j in ((0, 1), (0, 2), (1, 2)))
        # keep T = U + h comfortably positive
        scale = U / (abs(h) + 1.0)
        pos = pos * scale
        U = U / scale
        vel = rng.normal(0.0, 1.0, (3, 2))
        state = make_zero_momentum_state(pos, vel, masses)
        T = 0.5 * float(np.sum(ma[:, None] * state.velocities ** 2))
        if T < 1e-10:
            continue
        s = math.sqrt((U + h) / T)
        state = TriangleState(state.positions, s * state.velocities)
        dg = diagnostics(state, masses)
        if abs(dg.h - h) < 1e-10 and abs(dg.Omega) < 1e-12:
            return state
    raise RuntimeError("failed to draw a valid configuration")


# Chenciner-Simo figure-eight initial data for unit masses, G = 1.
_EIGHT_R1 = (0.97000436, -0.24308753)
_EIGHT_V3 = (-0.93240737, -0.86473146)


def figure_eight_state(rng: np.random.Generator, masses: MassDistribution,
                       h: float, pert: float = 1e-3) -> TriangleState:
    """Randomly perturbed figure-eight choreography rescaled to energy h.

    Bound zero-momentum triples are free-fall systems: a generic draw runs
    through a close two-body pass within a crossing time, and the flow's
    condition number there swamps double precision.  The eight is the
    standard stable h < 0 orbit; small perturbations of it stay
    encounter-free for many periods, which makes bound-energy suites
    meaningful.  Requires h < 0 and near-equal masses.
    """
    if h >= 0.0:
        raise ValueError("figure-eight family needs h < 0")
    if max(masses.m) - min(masses.m) > 1e-9:
        raise ValueError("figure-eight family needs equal masses")
    r1 = np.asarray(_EIGHT_R1)
    v3 = np.asarray(_EIGHT_V3)
    pos = np.vstack([r1, -r1, [0.0, 0.0]])
    # unit masses -> masses 1/3 keeps the same orbit with velocities /sqrt(3)
    vel = np.vstack([-v3 / 2.0, -v3 / 2.0, v3]) / math.sqrt(3.0)
    scale_r = float(np.max(np.abs(pos)))
    scale_v = float(np.max(np.abs(vel)))
    pos = pos + pert * scale_r * rng.normal(0.0, 1.0, (3, 2))
    vel = vel + pert * scale_v * rng.normal(0.0, 1.0, (3, 2))
    state = make_zero_momentum_state(pos, vel, masses)
    d = diagnostics(state, masses)
    if d.h >= 0.0:
        raise ValueError("perturbation destroyed the bound state")
    c = d.h / h
    return TriangleState(state.positions * c,
                         state.velocities / math.sqrt(c))


def _random_shape_point(rng, masses, b_margin: float = 0.35,
                        pole_margin: float = 0.25):
    while True:
        v = rng.normal(0.0, 1.0, 3)
        p = v / np.linalg.norm(v)
        if math.hypot(p[0], p[1]) < pole_margin:
            continue
        if min(np.linalg.norm(p - masses.b[i]) for i in range(3)) < b_margin:
            continue
        return p


def random_moduli_state(rng: np.random.Generator, masses: MassDistribution,
                        h: float, zeta_range=(0.1, 0.9)) -> ModuliState:
    """Moduli-cone state with energy h, sampled away from the equator
    collision points and the chart poles."""
    p = _random_shape_point(rng, masses)
    t = rng.normal(0.0, 1.0, 3)
    t -= (t @ p) * p
    t /= np.linalg.norm(t)
    U = float(shape_potential(p, masses))
    W = rng.uniform(max(0.0, h) + 0.3, max(0.0, h) + 1.3)
    rho = U / (W - h)
    zeta = rng.uniform(*zeta_range)
    rho1 = math.copysign(math.sqrt(2.0 * zeta * W), rng.choice([-1.0, 1.0]))
    v = math.sqrt(8.0 * (1.0 - zeta) * W) / rho
    return moduli_state_from_vectors(rho, rho1, p, v * t, masses, h=h)


def ejection_state(rng: np.random.Generator, masses: MassDistribution,
                   h: float, eps: float = 1e-3, transversal: float = 0.02,
                   shape_offset: float = 0.0) -> TriangleState:
    """Near-collision ejection state: size eps, shape near the Lagrange
    point, expanding radially with a small transversal shape velocity.

    Time reversal of the returned state gives a genuine triple-collision
    branch (angular momentum is exactly zero).  transversal is the fraction
    of the kinetic budget in the non-radial direction.
    """
    crit = critical_points(masses)
    p = crit.lagrange[0]
    if shape_offset != 0.0:
        t = rng.normal(0.0, 1.0, 3)
        t -= (t @ p) * p
        p = p + shape_offset * t / np.linalg.norm(t)
        p = p / np.linalg.norm(p)
    pos = configuration_from_shape(eps, p, masses)
    m = masses.m
    ma = masses.m_arr

    eta = rng.normal(0.0, 1.0, (3, 2))
    eta = make_zero_momentum_state(pos, eta, masses).velocities
    # mass-orthogonal to the radial (homothety) direction: keeps Idot pure
    c = float(np.sum(ma[:, None] * pos * eta)) / float(np.sum(ma[:, None]
                                                              * pos * pos))
    eta = eta - c * pos
    eta = eta / math.sqrt(float(np.sum(ma[:, None] * eta * eta)))

    U = sum(m[i] * m[j] / np.linalg.norm(pos[i] - pos[j])
            for i, j in ((0, 1), (0, 2), (1, 2)))
    T = U + h
    if T <= 0.0:
        raise ValueError("energy too low for an ejection at this size")
    beta = transversal * math.sqrt(2.0 * T)
    alpha = math.sqrt(2.0 * T - beta ** 2) / eps
    return TriangleState(pos, alpha * pos + beta * eta)
