"""Reduced dynamics: the moduli cone ODE and the intrinsic shape ODE.

The moduli equations evolve (rho, phi, theta) with the energy h as a
parameter; the shape ODE is the h-independent third-order system satisfied
by the shape curve alone, integrated as a 6-dimensional first-order system.
Both integrators work in local spherical charts that are rotated whenever
the representative point drifts toward a chart pole (sin phi < 0.05), so
trajectories never see coordinate singularities.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .geometry import (angles_to_point, chart_from_point, point_to_angles,
                       tangent_basis)
from .masses import MassDistribution
from .potential import ambient_hessian, b_field, shape_gradient, shape_potential

__all__ = [
    "ModuliState", "ModuliTrajectory", "moduli_rhs", "integrate_moduli",
    "moduli_state_from_vectors", "hill_start", "energy_residual",
    "IrregularPointError", "shape_ode_rhs", "integrate_shape",
    "ShapeTrajectory", "shape_state_from_moduli", "cone_residuals",
    "rho_from_alpha",
]

_SIN_PHI_MIN = 0.05


class IrregularPointError(ValueError):
    """Raised when the intrinsic shape ODE is evaluated off a regular point."""


# ---------------------------------------------------------------------------
# chart helpers (scalar, tuned for use inside integrator right-hand sides)

def _chart_partials(phi, theta, masses, Q, second=False):
    """U* and chart partials at chart point (phi, theta); Q maps chart->base.

    Returns (U, U_phi, U_theta) or with second=True additionally
    (U_phiphi, U_phitheta, U_thetatheta).
    """
    sp, cp = math.sin(phi), math.cos(phi)
    st, ct = math.sin(theta), math.cos(theta)
    x = (sp * ct, sp * st, cp)
    if Q is None:
        px, py, pz = x
    else:
        px = Q[0][0] * x[0] + Q[0][1] * x[1] + Q[0][2] * x[2]
        py = Q[1][0] * x[0] + Q[1][1] * x[1] + Q[1][2] * x[2]
        pz = Q[2][0] * x[0] + Q[2][1] * x[1] + Q[2][2] * x[2]

    U = 0.0
    Bx = By = Bz = 0.0
    hess = [[0.0] * 3 for _ in range(3)] if second else None
    for i in range(3):
        k = masses.k[i]
        bx, by, bz = masses.b[i]
        d2 = 2.0 - 2.0 * (px * bx + py * by + pz * bz)
        inv = d2 ** -0.5
        U += k * inv
        inv3 = k * inv / d2
        Bx += inv3 * bx
        By += inv3 * by
        Bz += inv3 * bz
        if second:
            c5 = 3.0 * k * inv / (d2 * d2)
            hess[0][0] += c5 * bx * bx
            hess[0][1] += c5 * bx * by
            hess[0][2] += c5 * bx * bz
            hess[1][1] += c5 * by * by
            hess[1][2] += c5 * by * bz
            hess[2][2] += c5 * bz * bz

    if Q is not None:
        # pull the gradient back to the chart: Bc = Q^T B
        Bx, By, Bz = (Q[0][0] * Bx + Q[1][0] * By + Q[2][0] * Bz,
                      Q[0][1] * Bx + Q[1][1] * By + Q[2][1] * Bz,
                      Q[0][2] * Bx + Q[1][2] * By + Q[2][2] * Bz)

    e_phi = (cp * ct, cp * st, -sp)
    e_theta = (-st, ct, 0.0)
    U_phi = Bx * e_phi[0] + By * e_phi[1] + Bz * e_phi[2]
    U_theta = sp * (Bx * e_theta[0] + By * e_theta[1])
    if not second:
        return U, U_phi, U_theta

    hess[1][0], hess[2][0], hess[2][1] = hess[0][1], hess[0][2], hess[1][2]
    H = np.array(hess)
    if Q is not None:
        Qm = np.asarray(Q)
        H = Qm.T @ H @ Qm
    xv = np.array(x)
    x_phi = np.array(e_phi)
    x_theta = sp * np.array(e_theta)
    Bc = np.array([Bx, By, Bz])
    x_phitheta = cp * np.array(e_theta)
    x_thetatheta = -sp * np.array([ct, st, 0.0])
    U_pp = x_phi @ H @ x_phi + Bc @ (-xv)
    U_pt = x_phi @ H @ x_theta + Bc @ x_phitheta
    U_tt = x_theta @ H @ x_theta + Bc @ x_thetatheta
    return U, U_phi, U_theta, U_pp, U_pt, U_tt


def _chart_embed(y, Q):
    """Base-coordinate (p, pdot) of a chart state (rho..theta1 layout aware).

    y = (phi, theta, phi1, theta1); returns 3-vectors in base coordinates.
    """
    phi, theta, phi1, theta1 = y
    x = angles_to_point(phi, theta)
    e_phi, e_theta = tangent_basis(phi, theta)
    xd = phi1 * e_phi + theta1 * math.sin(phi) * e_theta
    if Q is None:
        return x, xd
    Qm = np.asarray(Q)
    return Qm @ x, Qm @ xd


def _chart_read(p, pdot, Q):
    """Chart angles and their rates for base-coordinate (p, pdot)."""
    Qm = np.asarray(Q)
    x = Qm.T @ p
    xd = Qm.T @ pdot
    phi, theta = point_to_angles(x)
    e_phi, e_theta = tangent_basis(phi, theta)
    phi1 = xd @ e_phi
    theta1 = (xd @ e_theta) / math.sin(phi)
    return float(phi), float(theta), float(phi1), float(theta1)


# ---------------------------------------------------------------------------
# moduli cone dynamics

@dataclass
class ModuliState:
    """State on the moduli cone in a spherical chart.

    Angles refer to the chart Q (base point = Q @ chart point); Q = None is
    the base chart.  h is the energy constant of the motion.
    """

    rho: float
    phi: float
    theta: float
    rho1: float
    phi1: float
    theta1: float
    h: float
    chart: np.ndarray | None = None

    def vectors(self):
        """(rho, rho1, p, pdot) in base coordinates."""
        p, pdot = _chart_embed(
            (self.phi, self.theta, self.phi1, self.theta1), self.chart)
        return self.rho, self.rho1, p, pdot


def energy_residual(state: ModuliState, masses: MassDistribution) -> float:
    """Residual of the energy integral at the state."""
    rho, rho1, p, pdot = state.vectors()
    v2 = float(pdot @ pdot)
    U = shape_potential(p, masses)
    return 0.5 * rho1 ** 2 + rho ** 2 * v2 / 8.0 - U / rho - state.h


def moduli_state_from_vectors(rho, rho1, p, pdot, masses, h=None,
                              check_tol=1e-10) -> ModuliState:
    """ModuliState in the base chart from invariant data.

    With h given, the energy integral is checked at check_tol; with h=None
    it is computed from the state.
    """
    phi, theta = point_to_angles(p)
    e_phi, e_theta = tangent_basis(phi, theta)
    sp = math.sin(phi)
    if sp < 1e-12:
        raise ValueError("shape point at base-chart pole; use a rotated chart")
    st = ModuliState(rho=float(rho), phi=float(phi), theta=float(theta),
                     rho1=float(rho1), phi1=float(pdot @ e_phi),
                     theta1=float(pdot @ e_theta) / sp, h=0.0)
    v2 = float(pdot @ pdot)
    U = shape_potential(np.asarray(p), masses)
    h0 = 0.5 * rho1 ** 2 + rho ** 2 * v2 / 8.0 - U / rho
    if h is None:
        st.h = h0
    else:
        if abs(h0 - h) > check_tol:
            raise ValueError(
                f"state violates the energy integral: residual {h0 - h:.3e}")
        st.h = float(h)
    return st


def hill_start(phi, theta, masses: MassDistribution, h: float) -> ModuliState:
    """Rest state on the Hill boundary through shape (phi, theta), h < 0."""
    if h >= 0.0:
        raise ValueError("Hill boundary requires h < 0")
    p = angles_to_point(phi, theta)
    rho = float(shape_potential(p, masses)) / (-h)
    return ModuliState(rho=rho, phi=phi, theta=theta, rho1=0.0, phi1=0.0,
                       theta1=0.0, h=h)


def moduli_rhs(t, y, masses: MassDistribution, h: float, chart=None):
    """Right-hand side of the moduli equations for y=(rho,phi,theta,rates)."""
    rho, phi, theta, rho1, phi1, theta1 = y
    U, U_phi, U_theta = _chart_partials(phi, theta, masses, chart)
    sp, cp = math.sin(phi), math.cos(phi)
    inv_rho = 1.0 / rho
    four_rho3 = 4.0 * inv_rho ** 3
    rho2dd = -rho1 * rho1 * inv_rho + (U * inv_rho + 2.0 * h) * inv_rho
    phi2dd = (-2.0 * rho1 * inv_rho * phi1 + sp * cp * theta1 * theta1
              + four_rho3 * U_phi)
    theta2dd = (-2.0 * rho1 * inv_rho * theta1
                - 2.0 * (cp / sp) * phi1 * theta1
                + four_rho3 * U_theta / (sp * sp))
    return (rho1, phi1, theta1, rho2dd, phi2dd, theta2dd)


@dataclass
class _Segment:
    t_lo: float
    t_hi: float
    sol: object
    chart: np.ndarray | None


@dataclass
class ModuliTrajectory:
    """Piecewise dense solution of the moduli equations."""

    masses: MassDistribution
    h: float
    t0: float
    t1: float
    segments: list
    event: object | None = None

    def _segment(self, t):
        idx = bisect_right([s.t_hi for s in self.segments], t)
        return self.segments[min(idx, len(self.segments) - 1)]

    def state(self, t):
        """(rho, rho1, p, pdot) in base coordinates at time t."""
        seg = self._segment(t)
        y = seg.sol(t)
        p, pdot = _chart_embed(y[[1, 2, 4, 5]], seg.chart)
        return float(y[0]), float(y[3]), p, pdot

    def angles(self, t, chart=None):
        """(rho, phi, theta, rho1, phi1, theta1) in the given chart."""
        rho, rho1, p, pdot = self.state(t)
        if chart is None:
            phi, theta = point_to_angles(p)
            e_phi, e_theta = tangent_basis(phi, theta)
            sp = math.sin(phi)
            return (rho, float(phi), float(theta), rho1,
                    float(pdot @ e_phi), float(pdot @ e_theta) / sp)
        phi, theta, phi1, theta1 = _chart_read(p, pdot, chart)
        return (rho, phi, theta, rho1, phi1, theta1)

    def derivs(self, t):
        """Invariant derivative data (pdd, pddd, rhodd) at time t.

        Computed from the equations of motion, so they are exact for the
        integrated solution (no finite differencing).
        """
        rho, rho1, p, pdot = self.state(t)
        return _invariant_derivs(rho, rho1, p, pdot, self.masses)

    def times(self, n: int) -> np.ndarray:
        return np.linspace(self.t0, self.t1, n)

    def energy_residuals(self, ts):
        out = np.empty(len(ts))
        for i, t in enumerate(ts):
            rho, rho1, p, pdot = self.state(t)
            U = shape_potential(p, self.masses)
            out[i] = (0.5 * rho1 ** 2 + rho ** 2 * float(pdot @ pdot) / 8.0
                      - U / rho - self.h)
        return out


def _invariant_derivs(rho, rho1, p, pdot, masses):
    """(pdd, pddd, rhodd) for a moduli solution through (rho, rho1, p, pdot)."""
    v2 = float(pdot @ pdot)
    B = b_field(p, masses)
    G = B - (B @ p) * p
    U = shape_potential(p, masses)
    rhodd = rho * v2 / 4.0 - U / rho ** 2
    pdd = -2.0 * (rho1 / rho) * pdot + (4.0 / rho ** 3) * G - v2 * p

    H = ambient_hessian(p, masses)
    Bd = H @ pdot
    Gd = Bd - (Bd @ p + B @ pdot) * p - (B @ p) * pdot
    vvd = float(pdot @ pdd)                     # v * vdot
    A = rhodd / rho - (rho1 / rho) ** 2
    pddd = (-2.0 * A * pdot - 2.0 * (rho1 / rho) * pdd
            + (4.0 / rho ** 3) * Gd - 12.0 * (rho1 / rho ** 4) * G
            - 2.0 * vvd * p - v2 * pdot)
    return pdd, pddd, rhodd


def _min_mutual_distance(p, rho, masses):
    m = masses.m
    best = math.inf
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        chord = np.linalg.norm(p - masses.b[i])
        best = min(best, 0.5 * rho * math.sqrt(
            (1.0 - m[i]) / (m[j] * m[k])) * chord)
    return best


def integrate_moduli(state: ModuliState, masses: MassDistribution, t_span,
                     rtol: float = 1e-11, atol: float = 1e-12,
                     r_min: float = 1e-4, rho_min: float = 1e-4,
                     rho_max: float = 1e4, check_energy: float | None = 1e-10,
                     max_segments: int = 200) -> ModuliTrajectory:
    """Integrate the moduli equations with automatic chart rotation.

    The state is recentered into a chart whose equator holds the current
    shape point; whenever sin(phi) in the working chart falls below 0.05 the
    integration restarts in a freshly centered chart.
    """
    if check_energy is not None:
        res = energy_residual(state, masses)
        if abs(res) > check_energy:
            raise ValueError(
                f"initial state violates the energy integral by {res:.3e}")

    h = state.h
    rho, rho1, p, pdot = state.vectors()
    t, t_end = float(t_span[0]), float(t_span[1])
    segments = []
    event = None

    from .newton import EventRecord  # shared record type

    for _ in range(max_segments):
        Q = chart_from_point(p, pdot)
        phi, theta, phi1, theta1 = _chart_read(p, pdot, Q)
        y0 = np.array([rho, phi, theta, rho1, phi1, theta1])

        def ev_chart(tt, y, *a):
            return math.sin(y[1]) - _SIN_PHI_MIN

        def ev_rmin(tt, y, *a):
            pp, _ = _chart_embed(y[[1, 2, 4, 5]], Q)
            return _min_mutual_distance(pp, y[0], masses) - r_min

        def ev_rho_lo(tt, y, *a):
            return y[0] - rho_min

        def ev_rho_hi(tt, y, *a):
            return rho_max - y[0]

        for ev in (ev_chart, ev_rmin, ev_rho_lo, ev_rho_hi):
            ev.terminal = True
            ev.direction = -1

        res = solve_ivp(moduli_rhs, (t, t_end), y0, args=(masses, h, Q),
                        method="DOP853", rtol=rtol, atol=atol,
                        dense_output=True,
                        events=[ev_chart, ev_rmin, ev_rho_lo, ev_rho_hi])
        if res.status == -1:
            raise ArithmeticError(f"integration failed: {res.message}")

        t_hi = float(res.t[-1])
        segments.append(_Segment(t_lo=t, t_hi=t_hi, sol=res.sol, chart=Q))
        y_end = res.sol(t_hi)
        rho, rho1 = float(y_end[0]), float(y_end[3])
        p, pdot = _chart_embed(y_end[[1, 2, 4, 5]], Q)
        t = t_hi

        if res.status == 0:
            break
        kinds = [None, "binary_collision", "rho_min", "rho_max"]
        which = next(i for i, te in enumerate(res.t_events) if len(te))
        if kinds[which] is not None:
            event = EventRecord(kind=kinds[which], t=t_hi)
            break
        # chart event: loop re-centers and continues
    else:
        raise ArithmeticError("too many chart rotations")

    return ModuliTrajectory(masses=masses, h=h, t0=float(t_span[0]), t1=t,
                            segments=segments, event=event)


# ---------------------------------------------------------------------------
# the intrinsic shape ODE (third order in (phi, theta), integrated as 6-dim)

def _intrinsics(phi, theta, phi1, theta1, phi2, theta2, masses, Q,
                v_min=1e-10):
    """Common intrinsic block: returns chart partials and derived scalars."""
    sp, cp = math.sin(phi), math.cos(phi)
    g = sp * sp
    U, U_p, U_t, U_pp, U_pt, U_tt = _chart_partials(
        phi, theta, masses, Q, second=True)
    v2 = phi1 * phi1 + g * theta1 * theta1
    v = math.sqrt(v2)
    if v < v_min:
        raise IrregularPointError("zero shape speed (cusp or rest point)")
    vdot = (phi1 * phi2 + sp * cp * phi1 * theta1 * theta1
            + g * theta1 * theta2) / v
    Kstar = (cp * theta1 * (v2 + phi1 * phi1)
             + sp * (phi1 * theta2 - theta1 * phi2)) / v ** 3
    U_tau = (phi1 * U_p + theta1 * U_t) / v
    U_nu = (-theta1 * sp * U_p + phi1 * U_t / sp) / v
    return (sp, cp, g, U, U_p, U_t, U_pp, U_pt, U_tt, v, v2, vdot, Kstar,
            U_tau, U_nu)


def shape_ode_rhs(t, y, masses: MassDistribution, chart=None,
                  s_min: float = 1e-12):
    """Third-order intrinsic shape ODE as a first-order system.

    y = (phi, theta, phi1, theta1, phi2, theta2).  The scaling variable is
    eliminated through the intrinsic data: S = U*_nu / K* gives rho, the
    tangential component of the motion gives rhodot, and the third
    derivatives follow by differentiating the spherical equations of motion.
    Only regular points (v > 0, 0 < S < inf) are accepted; h never enters.
    """
    phi, theta, phi1, theta1, phi2, theta2 = y
    (sp, cp, g, U, U_p, U_t, U_pp, U_pt, U_tt, v, v2, vdot, Kstar,
     U_tau, U_nu) = _intrinsics(phi, theta, phi1, theta1, phi2, theta2,
                                masses, chart)

    if abs(Kstar) < s_min or not math.isfinite(Kstar):
        raise IrregularPointError("geodesic curvature vanishes at this state")
    S = U_nu / Kstar
    if not (S > s_min):
        raise IrregularPointError(f"Siegel function not positive: {S:.3e}")

    rho3 = 4.0 * S / v2
    rho = rho3 ** (1.0 / 3.0)
    P = -(vdot - (v2 / S) * U_tau) / v
    rho1 = 0.5 * rho * P
    rhodd = rho * v2 / 4.0 - U / rho ** 2

    rr = rho1 / rho
    A = rhodd / rho - rr * rr
    four_rho3 = 4.0 / rho3
    f = 2.0 * sp * cp
    phi3 = (-2.0 * A * phi1 - 2.0 * rr * phi2
            + (cp * cp - sp * sp) * phi1 * theta1 * theta1
            + f * theta1 * theta2
            + four_rho3 * (U_pp * phi1 + U_pt * theta1)
            - 12.0 * rr / rho3 * U_p)
    theta3 = (-2.0 * A * theta1 - 2.0 * rr * theta2
              + (2.0 / g) * phi1 * phi1 * theta1
              - 2.0 * (cp / sp) * (phi2 * theta1 + phi1 * theta2)
              + four_rho3 * ((U_pt * phi1 + U_tt * theta1) / g
                             - U_t * (f / (g * g)) * phi1)
              - 12.0 * rr / rho3 * U_t / g)
    return (phi1, theta1, phi2, theta2, phi3, theta3)


def shape_state_from_moduli(state: ModuliState, masses: MassDistribution):
    """(y6, chart) for the shape ODE from a moduli state.

    The second derivatives come from the spherical equations of motion, so
    the shape state lies on the projection of the given moduli motion.
    """
    rho, rho1, p, pdot = state.vectors()
    Q = chart_from_point(p, pdot)
    phi, theta, phi1, theta1 = _chart_read(p, pdot, Q)
    _, _, _, _, phi2, theta2 = moduli_rhs(
        0.0, (rho, phi, theta, rho1, phi1, theta1), masses, state.h, Q)
    return np.array([phi, theta, phi1, theta1, phi2, theta2]), Q


@dataclass
class ShapeTrajectory:
    """Piecewise dense solution of the intrinsic shape ODE."""

    masses: MassDistribution
    t0: float
    t1: float
    segments: list

    def _segment(self, t):
        idx = bisect_right([s.t_hi for s in self.segments], t)
        return self.segments[min(idx, len(self.segments) - 1)]

    def chart_state(self, t):
        seg = self._segment(t)
        return seg.sol(t), seg.chart

    def state(self, t):
        """(p, pdot, pdd) in base coordinates at time t."""
        y, Q = self.chart_state(t)
        phi, theta, phi1, theta1, phi2, theta2 = y
        p, pdot = _chart_embed(y[:4], Q)
        sp, cp = math.sin(phi), math.cos(phi)
        st, ct = math.sin(theta), math.cos(theta)
        x = angles_to_point(phi, theta)
        e_phi, e_theta = tangent_basis(phi, theta)
        xdd = (phi2 * e_phi + theta2 * sp * e_theta - x * phi1 * phi1
               + 2.0 * cp * phi1 * theta1 * e_theta
               - sp * theta1 * theta1 * np.array([ct, st, 0.0]))
        Qm = np.asarray(Q)
        return p, pdot, Qm @ xdd

    def angles(self, t, chart=None):
        """(phi, theta, phi1, theta1) in the given chart (default base)."""
        p, pdot, _ = self.state(t)
        if chart is None:
            phi, theta = point_to_angles(p)
            e_phi, e_theta = tangent_basis(phi, theta)
            return (float(phi), float(theta), float(pdot @ e_phi),
                    float(pdot @ e_theta) / math.sin(phi))
        return _chart_read(p, pdot, chart)

    def reconstructed(self, t):
        """(rho, rho1) recovered from the intrinsic data at time t."""
        y, Q = self.chart_state(t)
        (sp, cp, g, U, U_p, U_t, U_pp, U_pt, U_tt, v, v2, vdot, Kstar,
         U_tau, U_nu) = _intrinsics(*y, self.masses, Q)
        S = U_nu / Kstar
        rho = (4.0 * S / v2) ** (1.0 / 3.0)
        P = -(vdot - (v2 / S) * U_tau) / v
        return rho, 0.5 * rho * P

    def times(self, n: int) -> np.ndarray:
        return np.linspace(self.t0, self.t1, n)


def integrate_shape(y0, masses: MassDistribution, t_span, chart=None,
                    rtol: float = 1e-10, atol: float = 1e-12,
                    max_segments: int = 200) -> ShapeTrajectory:
    """Integrate the intrinsic shape ODE with automatic chart rotation."""
    y = np.asarray(y0, dtype=float)
    Q = chart if chart is not None else np.eye(3)
    t, t_end = float(t_span[0]), float(t_span[1])
    segments = []

    for _ in range(max_segments):
        def ev_chart(tt, yy, *a):
            return math.sin(yy[0]) - _SIN_PHI_MIN

        ev_chart.terminal = True
        ev_chart.direction = -1

        res = solve_ivp(shape_ode_rhs, (t, t_end), y, args=(masses, Q),
                        method="DOP853", rtol=rtol, atol=atol,
                        dense_output=True, events=[ev_chart])
        if res.status == -1:
            raise ArithmeticError(f"integration failed: {res.message}")
        t_hi = float(res.t[-1])
        segments.append(_Segment(t_lo=t, t_hi=t_hi, sol=res.sol, chart=Q))
        if res.status == 0:
            t = t_hi
            break

        # recenter the chart at the current point and carry (p, pdot, pdd)
        traj = ShapeTrajectory(masses=masses, t0=t, t1=t_hi,
                               segments=[segments[-1]])
        p, pdot, pdd = traj.state(t_hi)
        Qn = chart_from_point(p, pdot)
        phi, theta, phi1, theta1 = _chart_read(p, pdot, Qn)
        xdd = np.asarray(Qn).T @ pdd
        e_phi, e_theta = tangent_basis(phi, theta)
        sp, cp = math.sin(phi), math.cos(phi)
        phi2 = xdd @ e_phi + sp * cp * theta1 * theta1
        theta2 = (xdd @ e_theta - 2.0 * cp * phi1 * theta1) / sp
        y = np.array([phi, theta, phi1, theta1, phi2, theta2])
        Q = Qn
        t = t_hi
    else:
        raise ArithmeticError("too many chart rotations")

    return ShapeTrajectory(masses=masses, t0=float(t_span[0]), t1=t,
                           segments=segments)


# ---------------------------------------------------------------------------
# cone-surface identities along a trajectory

def cone_residuals(traj: ModuliTrajectory, ts, v_tol: float = 1e-9):
    """Residuals of the cone-surface equations along a moduli trajectory.

    Returns a dict of arrays: alpha (angle between the curve and the cone
    rays), res_direction for the alpha evolution law, res_curvature for the
    normal-derivative law, res_siegel for the sine identity
    sin^2(alpha) = S / (2 (rho h + U*)) with S = U*_nu / K* measured
    intrinsically.  Degenerate samples (shape speed below v_tol: rays) give
    zero residuals by convention.
    """
    masses, h = traj.masses, traj.h
    out = {k: np.empty(len(ts)) for k in
           ("alpha", "res_direction", "res_curvature", "res_siegel",
            "v", "Kstar", "U_nu")}
    for i, t in enumerate(ts):
        rho, rho1, p, pdot = traj.state(t)
        v2 = float(pdot @ pdot)
        v = math.sqrt(v2)
        U = float(shape_potential(p, masses))
        twoT = rho1 ** 2 + rho ** 2 * v2 / 4.0
        sin_a = rho * v / (2.0 * math.sqrt(twoT))
        cos_a = rho1 / math.sqrt(twoT)
        out["alpha"][i] = math.atan2(sin_a, cos_a)
        out["v"][i] = v
        if v < v_tol:
            out["res_direction"][i] = 0.0
            out["res_curvature"][i] = 0.0
            out["res_siegel"][i] = 0.0
            out["Kstar"][i] = np.nan
            out["U_nu"][i] = np.nan
            continue

        pdd, _, rhodd = traj.derivs(t)
        vdot = float(pdot @ pdd) / v
        G = shape_gradient(p, masses)
        U_tau = float(G @ pdot) / v
        nu = np.cross(p, pdot / v)
        U_nu = float(G @ nu)
        Kstar = float(p @ np.cross(pdot, pdd)) / v ** 3
        out["Kstar"][i] = Kstar
        out["U_nu"][i] = U_nu

        # d(alpha)/ds on the cone surface, s the cone arc length
        S_num = rho * v / 2.0
        Sd = (rho1 * v + rho * vdot) / 2.0
        alpha_dot = (Sd * rho1 - S_num * rhodd) / twoT
        dsbar = math.sqrt(twoT)
        W = h + U / rho
        dlnW_rho = (-U / rho ** 2) / W
        dlnW_sigma = (2.0 * U_tau / rho) / W
        out["res_direction"][i] = (alpha_dot / dsbar + (v / 2.0) / dsbar
                                   - 0.5 * (-sin_a * dlnW_rho
                                            + (cos_a / rho) * dlnW_sigma))
        out["res_curvature"][i] = (2.0 * sin_a ** 2 * Kstar
                                   - U_nu / (rho * h + U))
        if abs(Kstar) > 1e-12:
            out["res_siegel"][i] = (sin_a ** 2
                                    - (U_nu / Kstar) / (2.0 * (rho * h + U)))
        else:
            out["res_siegel"][i] = np.nan
    return out


def rho_from_alpha(alpha, sigma_span, rho0: float, dense: int = 400,
                   cot_max: float = 1e8):
    """Reconstruct rho(sigma) from the ray angle profile alpha(sigma).

    ``alpha`` is a callable of the kinematic arc length sigma.  Integrates
    d(log rho)/d(sigma) = cot(alpha); a blow-up of cot(alpha) along the way
    (alpha crossing 0 or pi: a cone tangency) raises ArithmeticError.
    """
    def rhs(s, y):
        a = alpha(s)
        c = math.cos(a) / math.sin(a) if math.sin(a) != 0.0 else math.inf
        if not math.isfinite(c) or abs(c) > cot_max:
            raise ArithmeticError(
                f"cot(alpha) blow-up at sigma={s:.6g}: tangent to a cone ray")
        return c

    res = solve_ivp(rhs, sigma_span, [math.log(rho0)], method="DOP853",
                    rtol=1e-12, atol=1e-12, dense_output=True)
    if res.status != 0:
        raise ArithmeticError(f"integration failed: {res.message}")
    grid = np.linspace(sigma_span[0], sigma_span[1], dense)
    return grid, np.exp(res.sol(grid)[0])
