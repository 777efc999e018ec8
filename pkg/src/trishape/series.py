"""Local power-series solutions of the reduced equations at a curve point.

Works with truncated Taylor series in t (plain coefficient ndarrays).  The
three residual forms used for the recursion are the cleared-denominator
equations of motion on the moduli cone,

    R1 = rho^2 rho'' + rho rho'^2 - U* - 2 h rho
    R2 = rho^3 phi'' + 2 rho^2 rho' phi' - rho^3 sin(phi)cos(phi) theta'^2
         - 4 U*_phi
    R3 = rho^3 g theta'' + 2 rho^2 rho' g theta' + rho^3 f phi' theta'
         - 4 U*_theta,     g = sin(phi)^2, f = sin(2 phi),

each linear in the single new coefficient per order, with leading factors
(n+2)(n+1) rho0^2, (n+2)(n+1) rho0^3 and (n+2)(n+1) g0 rho0^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import angles_to_point, point_to_angles, tangent_basis
from .masses import MassDistribution
from .potential import ambient_hessian, b_field, shape_gradient, shape_potential

__all__ = [
    "IntrinsicData", "InitialData", "SeriesCoefficients",
    "InconsistentDataError", "make_intrinsic", "measure_intrinsics",
    "J8", "h0_constraint_residual", "initial_data_from_intrinsics",
    "series_coefficients", "series_residuals", "series_eval",
    "h_min", "CuspData", "cusp_data",
]


class InconsistentDataError(ValueError):
    """Intrinsic data admitting no motion (wrong-sign size, broken h=0 tie)."""


# ---------------------------------------------------------------- series ops

def _mul(a, b, L):
    return np.convolve(a, b)[:L]


def _diff(a):
    n = np.arange(1, len(a))
    return a[1:] * n


def _power(s, alpha, L):
    """Truncated series of s**alpha; requires s[0] > 0."""
    s = s[:L]
    w = np.zeros(L)
    w[0] = s[0] ** alpha
    for n in range(1, L):
        k = np.arange(1, min(n, len(s) - 1) + 1)
        w[n] = np.sum(((alpha + 1.0) * k - n) * s[k] * w[n - k]) / (n * s[0])
    return w


def _sincos(a, L):
    s = np.zeros(L)
    c = np.zeros(L)
    s[0], c[0] = math.sin(a[0]), math.cos(a[0])
    for n in range(1, L):
        k = np.arange(1, min(n, len(a) - 1) + 1)
        s[n] = np.sum(k * a[k] * c[n - k]) / n
        c[n] = -np.sum(k * a[k] * s[n - k]) / n
    return s, c


def potential_series(phi, theta, masses: MassDistribution, L):
    """Taylor series of U*, U*_phi, U*_theta along (phi(t), theta(t)).

    Composes through the embedding x(t) so only 1-D series arithmetic is
    needed: U* = sum_i k_i d_i^{-1/2} with d_i = 2 - 2 x . b_i, and the
    chart partials are B . x_phi, B . x_theta with B = sum_i k_i d_i^{-3/2} b_i.
    """
    sp, cp = _sincos(phi, L)
    st, ct = _sincos(theta, L)
    x = [_mul(sp, ct, L), _mul(sp, st, L), cp]
    x_p = [_mul(cp, ct, L), _mul(cp, st, L), -sp]
    x_t = [-_mul(sp, st, L), _mul(sp, ct, L), np.zeros(L)]
    u = np.zeros(L)
    u_p = np.zeros(L)
    u_t = np.zeros(L)
    for i in range(3):
        b = masses.b[i]
        d = -2.0 * (b[0] * x[0] + b[1] * x[1] + b[2] * x[2])
        d[0] += 2.0
        u = u + masses.k[i] * _power(d, -0.5, L)
        w = masses.k[i] * _power(d, -1.5, L)
        u_p = u_p + _mul(w, b[0] * x_p[0] + b[1] * x_p[1] + b[2] * x_p[2], L)
        u_t = u_t + _mul(w, b[0] * x_t[0] + b[1] * x_t[1] + b[2] * x_t[2], L)
    return u, u_p, u_t


# ------------------------------------------------------------- domain types

@dataclass
class IntrinsicData:
    """Shape-intrinsic germ data at a curve point.

    (J_phi, J_theta) is the unit direction in the spherical chart,
    J_phi^2 + sin(phi)^2 J_theta^2 = 1.  S0, S1 are the Siegel function and
    its arc-length derivative; u0, mu0, eta0 the values of U*, U*_phi,
    U*_theta at the point; ubar1 = dU*/ds along the direction.
    """

    phi: float
    theta: float
    J_phi: float
    J_theta: float
    S0: float
    S1: float
    u0: float
    mu0: float
    eta0: float
    ubar1: float
    h: float
    masses: MassDistribution | None = None


@dataclass
class InitialData:
    rho0: float
    v0: float
    rho1: float


@dataclass
class SeriesCoefficients:
    rho: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    v: np.ndarray
    u: np.ndarray
    order: int


def make_intrinsic(phi, theta, J_phi, J_theta, S0, S1, h,
                   masses: MassDistribution) -> IntrinsicData:
    g0 = math.sin(phi) ** 2
    norm = math.sqrt(J_phi ** 2 + g0 * J_theta ** 2)
    if norm < 1e-12:
        raise ValueError("zero direction")
    J_phi, J_theta = J_phi / norm, J_theta / norm
    u, u_p, u_t = potential_series(np.array([phi]), np.array([theta]),
                                   masses, 1)
    return IntrinsicData(phi=phi, theta=theta, J_phi=J_phi, J_theta=J_theta,
                         S0=S0, S1=S1, u0=float(u[0]), mu0=float(u_p[0]),
                         eta0=float(u_t[0]),
                         ubar1=float(J_phi * u_p[0] + J_theta * u_t[0]), h=h,
                         masses=masses)


def measure_intrinsics(traj, t) -> IntrinsicData:
    """Intrinsic data of a moduli trajectory at time t (global chart)."""
    from .frames import trajectory_frames
    frame = trajectory_frames(traj, [t])[0]
    rho, rho1, p, pdot = traj.state(t)
    phi, theta = point_to_angles(p)
    e_p, e_t = tangent_basis(float(phi), float(theta))
    sp = math.sin(float(phi))
    if sp < 1e-8:
        raise ValueError("sample too close to the chart pole")
    phi1 = float(pdot @ e_p)
    theta1 = float(pdot @ e_t) / sp
    h = 0.5 * rho1 ** 2 + rho ** 2 * frame.v ** 2 / 8.0 - frame.U / rho
    return make_intrinsic(float(phi), float(theta), phi1 / frame.v,
                          theta1 / frame.v, frame.S, frame.S_prime, h,
                          traj.masses)


def J8(d: IntrinsicData) -> float:
    """The slope invariant (2 ubar1 - S1)/S0 = rho1/(rho0 v0)."""
    return (2.0 * d.ubar1 - d.S1) / d.S0


def h0_constraint_residual(d: IntrinsicData) -> float:
    """Residual of the h = 0 compatibility identity u0 = (4 J8^2 + 1) S0 / 2."""
    return d.u0 - 0.5 * (4.0 * J8(d) ** 2 + 1.0) * d.S0


def initial_data_from_intrinsics(d: IntrinsicData, rho0: float | None = None,
                                 h0_tol: float = 1e-6):
    """Recover (rho0, v0, rho1) from intrinsic germ data.

    For h != 0 the size is forced:  rho0 = [S0 (4 J8^2 + 1)/2 - u0]/h.
    For h = 0 the data must satisfy the compatibility identity and any
    rho0 > 0 generates a motion; returns the family as a callable when no
    rho0 is supplied.
    """
    if d.S0 <= 0.0:
        raise InconsistentDataError("regular point requires S0 > 0")
    j = J8(d)
    if d.h != 0.0:
        r0 = (0.5 * d.S0 * (4.0 * j * j + 1.0) - d.u0) / d.h
        if r0 <= 0.0:
            raise InconsistentDataError(
                f"intrinsic data forces nonpositive size rho0 = {r0:.3e}")
        v0 = 2.0 * math.sqrt(d.S0) / r0 ** 1.5
        return InitialData(rho0=r0, v0=v0, rho1=2.0 * j * math.sqrt(d.S0 / r0))

    res = h0_constraint_residual(d)
    if abs(res) > h0_tol * max(1.0, abs(d.u0)):
        raise InconsistentDataError(
            f"h=0 compatibility identity violated by {res:.3e}")

    def family(r0: float) -> InitialData:
        if r0 <= 0.0:
            raise InconsistentDataError("rho0 must be positive")
        v0 = 2.0 * math.sqrt(d.S0) / r0 ** 1.5
        return InitialData(rho0=r0, v0=v0,
                           rho1=2.0 * j * math.sqrt(d.S0 / r0))

    return family(rho0) if rho0 is not None else family


def series_coefficients(d: IntrinsicData, order: int = 4,
                        rho0: float | None = None) -> SeriesCoefficients:
    """Taylor coefficients of (rho, phi, theta) through the given order.

    Orders 0 and 1 come from the intrinsic data; each higher order solves
    the linear leading term of the cleared equations of motion.
    """
    if not 2 <= order <= 4:
        raise ValueError("order must be between 2 and 4")
    init = initial_data_from_intrinsics(d, rho0=rho0)
    L = order + 1
    masses_h = d.h
    rho = np.zeros(L)
    phi = np.zeros(L)
    theta = np.zeros(L)
    rho[0], rho[1] = init.rho0, init.rho1
    phi[0], phi[1] = d.phi, init.v0 * d.J_phi
    theta[0], theta[1] = d.theta, init.v0 * d.J_theta
    masses = d.masses
    if masses is None:
        raise ValueError("intrinsic data lacks mass distribution context")
    for n in range(order - 1):
        u, u_p, u_t = potential_series(phi, theta, masses, L)
        sp, cp = _sincos(phi, L)
        g = _mul(sp, sp, L)
        f = 2.0 * _mul(sp, cp, L)
        r1 = _diff(rho)
        r2 = np.append(_diff(r1), 0.0)
        rho2 = _mul(rho, rho, L)
        rho3 = _mul(rho2, rho, L)
        p1 = _diff(phi)
        p2 = np.append(_diff(p1), 0.0)
        t1 = _diff(theta)
        t2 = np.append(_diff(t1), 0.0)
        p1 = np.append(p1, 0.0)
        t1 = np.append(t1, 0.0)
        r1p = np.append(r1, 0.0)

        R1 = (_mul(rho2, r2, L) + _mul(rho, _mul(r1p, r1p, L), L)
              - u - 2.0 * masses_h * rho)
        R2 = (_mul(rho3, p2, L) + 2.0 * _mul(rho2, _mul(r1p, p1, L), L)
              - 0.5 * _mul(rho3, _mul(f, _mul(t1, t1, L), L), L) - 4.0 * u_p)
        R3 = (_mul(_mul(rho3, g, L), t2, L)
              + 2.0 * _mul(_mul(rho2, g, L), _mul(r1p, t1, L), L)
              + _mul(rho3, _mul(f, _mul(p1, t1, L), L), L) - 4.0 * u_t)

        lead = (n + 2) * (n + 1)
        rho[n + 2] = -R1[n] / (lead * rho[0] ** 2)
        phi[n + 2] = -R2[n] / (lead * rho[0] ** 3)
        theta[n + 2] = -R3[n] / (lead * rho[0] ** 3 * math.sin(d.phi) ** 2)

    u, _, _ = potential_series(phi, theta, masses, L)
    sp, _ = _sincos(phi, L)
    g = _mul(sp, sp, L)
    p1 = np.append(_diff(phi), 0.0)
    t1 = np.append(_diff(theta), 0.0)
    v2 = _mul(p1, p1, L) + _mul(g, _mul(t1, t1, L), L)
    v = _power(v2, 0.5, L)[:order]
    return SeriesCoefficients(rho=rho, phi=phi, theta=theta, v=v, u=u,
                              order=order)


def series_residuals(c: SeriesCoefficients, masses: MassDistribution,
                     h: float):
    """Residual series (R1, R2, R3) of the cleared equations for given
    coefficients; entries through order N-2 should vanish."""
    L = len(c.rho)
    u, u_p, u_t = potential_series(c.phi, c.theta, masses, L)
    sp, cp = _sincos(c.phi, L)
    g = _mul(sp, sp, L)
    f = 2.0 * _mul(sp, cp, L)
    r1 = np.append(_diff(c.rho), 0.0)
    r2 = np.append(np.append(_diff(_diff(c.rho)), 0.0), 0.0)
    p1 = np.append(_diff(c.phi), 0.0)
    p2 = np.append(np.append(_diff(_diff(c.phi)), 0.0), 0.0)
    t1 = np.append(_diff(c.theta), 0.0)
    t2 = np.append(np.append(_diff(_diff(c.theta)), 0.0), 0.0)
    rho2 = _mul(c.rho, c.rho, L)
    rho3 = _mul(rho2, c.rho, L)
    R1 = (_mul(rho2, r2, L) + _mul(c.rho, _mul(r1, r1, L), L)
          - u - 2.0 * h * c.rho)
    R2 = (_mul(rho3, p2, L) + 2.0 * _mul(rho2, _mul(r1, p1, L), L)
          - 0.5 * _mul(rho3, _mul(f, _mul(t1, t1, L), L), L) - 4.0 * u_p)
    R3 = (_mul(_mul(rho3, g, L), t2, L)
          + 2.0 * _mul(_mul(rho2, g, L), _mul(r1, t1, L), L)
          + _mul(rho3, _mul(f, _mul(p1, t1, L), L), L) - 4.0 * u_t)
    return R1, R2, R3


def series_eval(c: SeriesCoefficients, t):
    """(rho, phi, theta) polynomial values at times t."""
    from numpy.polynomial import polynomial as P
    return (P.polyval(t, c.rho), P.polyval(t, c.phi), P.polyval(t, c.theta))


def h_min(point, direction, v0: float, S0: float,
          masses: MassDistribution):
    """Least energy admitting a motion with the given germ and speed.

    rho0 is pinned by rho0^3 v0^2 = 4 S0; h_min = rho0^2 v0^2 / 8 - U*/rho0.
    Returns (h_min, count) where count(h) is the number of expansion-rate
    solutions: 0 below, 1 at (rho1 = 0), 2 above (rho1 = +/-).  The
    direction argument does not enter the threshold; it is part of the germ.
    """
    phi, theta = point
    if v0 <= 0.0 or S0 <= 0.0:
        raise ValueError("regular germ requires v0 > 0 and S0 > 0")
    rho0 = (4.0 * S0 / v0 ** 2) ** (1.0 / 3.0)
    u0 = float(shape_potential(angles_to_point(phi, theta), masses))
    hm = rho0 ** 2 * v0 ** 2 / 8.0 - u0 / rho0

    def count(h: float, tol: float = 0.0) -> int:
        if h < hm - tol:
            return 0
        if h <= hm + tol:
            return 1
        return 2

    return hm, count


@dataclass
class CuspData:
    rho0: float
    K0: float
    direction: np.ndarray
    c: float


def cusp_data(point, h: float, c: float, masses: MassDistribution) -> CuspData:
    """Cusp family data at a non-critical shape point.

    c = rho1^2 = 2 (U*/rho0 + h) parametrizes the cusps at fixed h; c = 0 is
    the rest point on the Hill boundary (h < 0 only).  Both branches leave
    along grad U* with curvature K0 = (1/3) d/dnu ln|grad U*|, independent
    of c.
    """
    if c < 0.0:
        raise ValueError("cusp parameter c must be nonnegative")
    if c - 2.0 * h <= 0.0:
        raise ValueError("no cusp with this (h, c): requires c > 2h")
    p = angles_to_point(*point) if len(point) == 2 else np.asarray(point,
                                                                   dtype=float)
    G = shape_gradient(p, masses)
    gnorm = float(np.linalg.norm(G))
    if gnorm < 1e-10:
        raise ValueError("critical point of U* does not support a cusp")
    u0 = float(shape_potential(p, masses))
    rho0 = 2.0 * u0 / (c - 2.0 * h)
    tau = G / gnorm
    nu = np.cross(p, tau)
    B = b_field(p, masses)
    H = ambient_hessian(p, masses)
    Hnu = H @ nu
    DG = Hnu - (Hnu @ p + B @ nu) * p - (B @ p) * nu
    K0 = float(G @ DG) / (3.0 * gnorm ** 2)
    return CuspData(rho0=rho0, K0=K0, direction=tau, c=c)
