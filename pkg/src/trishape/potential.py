"""The shape potential U* on the sphere and its derived structures.

U*(p) = sum_i k_i / |p - b_i| is the normalized potential: the Newtonian
potential of the configuration (rho, p) is U = U*(p)/rho.  The gradient here
is always the tangential (spherical) gradient unless stated otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .geometry import angles_to_point, tangent_basis
from .masses import MassDistribution

__all__ = [
    "shape_potential", "b_field", "shape_gradient", "ambient_hessian",
    "spherical_partials", "CriticalSet", "critical_points", "hill_radius",
    "southward_frame", "psi_profile",
]


def shape_potential(p, masses: MassDistribution):
    """U*(p) for unit vector(s) p; infinite at the collision points."""
    p = np.asarray(p)
    out = 0.0
    for i in range(3):
        out = out + masses.k[i] / np.linalg.norm(p - masses.b[i], axis=-1)
    return out


def b_field(p, masses: MassDistribution):
    """B(p) = sum_i k_i b_i / |p - b_i|**3 (ambient gradient of U*)."""
    p = np.asarray(p)
    out = np.zeros(p.shape)
    for i in range(3):
        d = np.linalg.norm(p - masses.b[i], axis=-1, keepdims=True)
        out = out + masses.k[i] * masses.b[i] / d ** 3
    return out


def shape_gradient(p, masses: MassDistribution):
    """Tangential gradient of U* at p: B - (B.p) p."""
    p = np.asarray(p)
    B = b_field(p, masses)
    return B - np.sum(B * p, axis=-1, keepdims=True) * p


def ambient_hessian(p, masses: MassDistribution):
    """Hessian of the extension sum_i k_i (2 - 2 x.b_i)^(-1/2) at x = p.

    Consistent with b_field as the gradient of the same extension; used for
    chart second partials and for differentiating the gradient along curves.
    """
    p = np.asarray(p)
    H = np.zeros(p.shape + (3,))
    for i in range(3):
        d2 = 2.0 - 2.0 * (p @ masses.b[i])
        coeff = 3.0 * masses.k[i] * d2 ** -2.5
        H = H + np.multiply.outer(coeff, np.outer(masses.b[i], masses.b[i]))
    return H


def spherical_partials(phi, theta, masses: MassDistribution, chart=None,
                       second=False):
    """Chart partials of U* at (phi, theta).

    Returns (U, U_phi, U_theta) or, with second=True,
    (U, U_phi, U_theta, U_phiphi, U_phitheta, U_thetatheta).
    ``chart`` is an optional rotation matrix Q mapping chart coordinates to
    base coordinates (the chart point x represents Q @ x).
    """
    x = angles_to_point(phi, theta)
    e_phi, e_theta = tangent_basis(phi, theta)
    p = x if chart is None else chart @ x
    B = b_field(p, masses)
    U = shape_potential(p, masses)
    Bc = B if chart is None else chart.T @ B
    sp = math.sin(phi)
    U_phi = Bc @ e_phi
    U_theta = sp * (Bc @ e_theta)
    if not second:
        return U, U_phi, U_theta

    H = ambient_hessian(p, masses)
    Hc = H if chart is None else chart.T @ H @ chart
    cp = math.cos(phi)
    x_phi = e_phi
    x_theta = sp * e_theta
    x_phiphi = -x
    x_phitheta = cp * e_theta
    x_thetatheta = -sp * np.array([math.cos(theta), math.sin(theta), 0.0])
    U_pp = x_phi @ Hc @ x_phi + Bc @ x_phiphi
    U_pt = x_phi @ Hc @ x_theta + Bc @ x_phitheta
    U_tt = x_theta @ Hc @ x_theta + Bc @ x_thetatheta
    return U, U_phi, U_theta, U_pp, U_pt, U_tt


@dataclass(frozen=True)
class CriticalSet:
    """Critical points of U* on the sphere.

    lagrange: (2, 3) array, north then south equilateral point.
    euler: (3, 3) array, e_i on the equatorial arc not touching b_i
    (eastward order on the equator is b1, e3, b2, e1, b3, e2).
    lagrange_value / euler_values: U* there.
    """

    lagrange: np.ndarray
    euler: np.ndarray
    lagrange_value: float
    euler_values: np.ndarray


def critical_points(masses: MassDistribution, tol: float = 1e-13,
                    scan: int = 512) -> CriticalSet:
    """Lagrange points (closed form) and Euler points (1-D root find).

    Each equatorial arc between consecutive collision points is scanned for
    sign changes of the along-equator derivative of U*; a unique minimum per
    arc is required.
    """
    p0 = masses.lagrange_point()
    lagrange = np.vstack([p0, p0 * np.array([1.0, 1.0, -1.0])])

    beta = masses.beta
    ang = [0.0, beta[2], beta[2] + beta[0], 2.0 * math.pi]

    def dU(t):
        p = np.array([math.cos(t), math.sin(t), 0.0])
        tangent = np.array([-math.sin(t), math.cos(t), 0.0])
        return b_field(p, masses) @ tangent

    # Arc (b1,b2) holds e3, (b2,b3) holds e1, (b3,b1) holds e2.
    arc_owner = [2, 0, 1]
    euler = np.empty((3, 3))
    for a in range(3):
        lo, hi = ang[a], ang[a + 1]
        pad = 1e-9 * (hi - lo)
        ts = np.linspace(lo + pad, hi - pad, scan)
        vals = np.array([dU(t) for t in ts])
        sign_changes = np.nonzero(np.diff(np.sign(vals)) != 0)[0]
        if len(sign_changes) != 1:
            raise ArithmeticError(
                f"expected one critical point on equatorial arc {a}, "
                f"found {len(sign_changes)} sign changes")
        i = sign_changes[0]
        root = bisect(dU, ts[i], ts[i + 1], xtol=tol)
        euler[arc_owner[a]] = [math.cos(root), math.sin(root), 0.0]

    return CriticalSet(
        lagrange=lagrange, euler=euler,
        lagrange_value=float(shape_potential(p0, masses)),
        euler_values=np.array([shape_potential(e, masses) for e in euler]),
    )


def hill_radius(p, masses: MassDistribution, h: float):
    """Size rho of the Hill boundary through shape p at energy h < 0.

    On the Hill boundary the motion is at rest: h + U*(p)/rho = 0.
    """
    if h >= 0.0:
        raise ValueError("Hill boundary requires h < 0")
    return shape_potential(p, masses) / (-h)


def southward_frame(p, masses: MassDistribution):
    """The mirror-symmetric frame (T, T') at p.

    T = p x [(p - p0) x (p - p0')] points southward (toward decreasing
    m-modified latitude), T' = p x T eastward; both vanish at the poles
    p0, p0' of the frame.  T . grad U* has the sign of p . (p0 - p0').
    """
    p = np.asarray(p)
    p0 = masses.lagrange_point()
    p0m = p0 * np.array([1.0, 1.0, -1.0])
    T = np.cross(p, np.cross(p - p0, p - p0m))
    return T, np.cross(p, T)


def psi_profile(t, i, masses: MassDistribution):
    """Psi_i(t) from the reorganized B-field sum B = sum_i Psi_i(xi_i) b_i.

    Psi_i(t) = (mhat^1.5 (1-m_i)/4) * (1 - t/c_i)^(-3/2) with
    c_i = b_i . (b_i - p0) = 2 m_j m_k / ((1-m_i) mhat), defined for
    t < c_i, and xi_i = b_i . (p - p0).  Psi_i is strictly increasing.
    """
    m = masses.m
    j, k = (i + 1) % 3, (i + 2) % 3
    c = 2.0 * m[j] * m[k] / ((1.0 - m[i]) * masses.mhat)
    return 0.25 * masses.mhat ** 1.5 * (1.0 - m[i]) * (1.0 - t / c) ** -1.5
