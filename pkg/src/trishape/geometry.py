"""Configuration space to shape sphere: projection, distances, area.

The moduli space of m-triangles is a cone over the shape sphere.  A planar
configuration with moment of inertia I maps to (rho, p) with rho = sqrt(I)
and p a point of the unit sphere; binary collisions sit at the equatorial
points b_i, equilateral shapes at the poles (positively oriented at the
north pole), and collinear shapes on the equator plane z = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .masses import MassDistribution, _raw_hopf

__all__ = [
    "TriangleState", "ModuliPoint", "angles_to_point", "point_to_angles",
    "tangent_basis", "project_to_shape", "project_with_velocity",
    "mutual_distances", "triangle_area", "chart_from_point",
    "configuration_from_shape",
]


@dataclass
class TriangleState:
    """Planar three-body configuration: positions (3,2), velocities (3,2)."""

    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(3, 2)
        self.velocities = np.asarray(self.velocities, dtype=float).reshape(3, 2)


@dataclass
class ModuliPoint:
    """Point of the moduli cone: size rho = sqrt(I) and shape point p.

    ``p`` is None at the cone vertex (triple collision), where the shape is
    undefined.
    """

    rho: float
    p: np.ndarray | None

    @property
    def defined(self) -> bool:
        return self.p is not None


def angles_to_point(phi, theta):
    """Unit vector for colatitude phi (0 at north pole) and longitude theta."""
    sp = np.sin(phi)
    return np.stack([sp * np.cos(theta), sp * np.sin(theta),
                     np.cos(phi) * np.ones_like(theta)], axis=-1)


def point_to_angles(p):
    """(phi, theta) of unit vector(s) p; theta in (-pi, pi]."""
    p = np.asarray(p)
    phi = np.arccos(np.clip(p[..., 2], -1.0, 1.0))
    theta = np.arctan2(p[..., 1], p[..., 0])
    return phi, theta


def tangent_basis(phi, theta):
    """Orthonormal chart frame (e_phi, e_theta) at (phi, theta).

    e_phi = d p/d phi, e_theta = (1/sin phi) d p/d theta.
    """
    cp, sp = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    e_phi = np.stack([cp * ct, cp * st, -sp], axis=-1)
    e_theta = np.stack([-st, ct, np.zeros_like(st)], axis=-1)
    return e_phi, e_theta


def chart_from_point(p, direction=None):
    """Rotation Q with Q @ (1,0,0) = p, for a chart whose equator holds p.

    Columns of Q are the chart axes expressed in base coordinates: the chart
    point (phi, theta) represents the base point Q @ point(phi, theta).  If a
    tangent ``direction`` at p is given, the chart is oriented so that the
    direction points along increasing theta at (pi/2, 0).
    """
    p = np.asarray(p, dtype=float)
    e1 = p / np.linalg.norm(p)
    if direction is not None:
        w = np.asarray(direction, dtype=float)
        w = w - (w @ e1) * e1
        nw = np.linalg.norm(w)
    else:
        nw = 0.0
    if direction is None or nw < 1e-12:
        trial = np.array([0.0, 0.0, 1.0])
        if abs(e1 @ trial) > 0.9:
            trial = np.array([0.0, 1.0, 0.0])
        w = trial - (trial @ e1) * e1
        nw = np.linalg.norm(w)
    # At chart coords (pi/2, 0): e_theta = (0,1,0), so the second column is
    # the in-chart eastward direction.
    e2 = w / nw
    e3 = np.cross(e1, e2)
    return np.column_stack([e1, e2, e3])


def project_to_shape(state: TriangleState, masses: MassDistribution,
                     rho_tol: float = 1e-12) -> ModuliPoint:
    """Project a configuration to the moduli cone (rho, p)."""
    w = _raw_hopf(masses.m, state.positions)
    rho2 = np.linalg.norm(w)
    rho = math.sqrt(rho2)
    if rho2 <= rho_tol ** 2:
        return ModuliPoint(rho=rho, p=None)
    return ModuliPoint(rho=rho, p=masses.align @ (w / rho2))


def _jacobi(masses, a):
    m1, m2, m3 = masses.m
    z1 = complex(*(a[1] - a[0])) * math.sqrt(m1 * m2 / (m1 + m2))
    z2 = complex(*(a[2] - (m1 * a[0] + m2 * a[1]) / (m1 + m2))) * math.sqrt(
        m3 * (m1 + m2))
    return z1, z2


def project_with_velocity(state: TriangleState, masses: MassDistribution):
    """Project configuration and velocity: returns (rho, rhodot, p, pdot).

    The velocity projection is exact (chain rule through the Hopf map); the
    center-of-mass motion is removed first.
    """
    m = masses.m_arr
    a = state.positions - m @ state.positions
    ad = state.velocities - m @ state.velocities
    z1, z2 = _jacobi(masses, a)
    zd1, zd2 = _jacobi(masses, ad)

    cross = z1.conjugate() * z2
    w = np.array([2.0 * cross.real, 2.0 * cross.imag,
                  abs(z1) ** 2 - abs(z2) ** 2])
    dcross = zd1.conjugate() * z2 + z1.conjugate() * zd2
    wd = np.array([2.0 * dcross.real, 2.0 * dcross.imag,
                   2.0 * (z1.conjugate() * zd1).real
                   - 2.0 * (z2.conjugate() * zd2).real])

    nw = np.linalg.norm(w)           # = I
    rho = math.sqrt(nw)
    rhodot = (w @ wd) / (2.0 * nw * rho)
    p = masses.align @ (w / nw)
    pdot = masses.align @ (wd / nw - w * (w @ wd) / nw ** 3)
    return rho, rhodot, p, pdot


def mutual_distances(p, rho, masses: MassDistribution):
    """Mutual distances (r23, r31, r12) of the configuration at (rho, p).

    r_jk depends on the chord distance from p to the collision point b_i of
    the complementary pair.
    """
    p = np.asarray(p)
    m = masses.m
    out = np.empty(p.shape[:-1] + (3,))
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        chord = np.linalg.norm(p - masses.b[i], axis=-1)
        out[..., i] = 0.5 * rho * math.sqrt(
            (1.0 - m[i]) / (m[j] * m[k])) * chord
    return out


def triangle_area(p, rho, masses: MassDistribution):
    """Euclidean area of the triangle with shape p and size rho."""
    p = np.asarray(p)
    return rho ** 2 * np.abs(p[..., 2]) / (4.0 * math.sqrt(masses.mbar))


def configuration_from_shape(rho, p, masses: MassDistribution) -> np.ndarray:
    """Positions (3, 2) of one configuration with the given size and shape.

    Inverts the Hopf projection with the rotational gauge fixed by a real
    nonnegative first Jacobi coordinate; project_to_shape of the result
    recovers (rho, p) exactly.
    """
    m1, m2, m3 = masses.m
    w = rho ** 2 * (masses.align.T @ np.asarray(p, dtype=float))
    nw = rho ** 2
    z1_sq = max((nw + w[2]) / 2.0, 0.0)
    z1 = math.sqrt(z1_sq)
    if z1 > 1e-14 * rho:
        z2 = complex(w[0], w[1]) / (2.0 * z1)
    else:
        z1 = 0.0
        z2 = complex(math.sqrt(max((nw - w[2]) / 2.0, 0.0)), 0.0)
    zeta1 = z1 / math.sqrt(m1 * m2 / (m1 + m2))
    zeta2 = z2 / math.sqrt(m3 * (m1 + m2))
    v1 = np.array([zeta1, 0.0])
    v2 = np.array([zeta2.real, zeta2.imag])
    a1 = -m3 * v2 - (m2 / (m1 + m2)) * v1
    a2 = -m3 * v2 + (m1 / (m1 + m2)) * v1
    a3 = (1.0 - m3) * v2
    return np.vstack([a1, a2, a3])
