"""Direct Newtonian dynamics of the planar three-body problem.

Positions and velocities are held as (3, 2) arrays.  All public entry
points work in center-of-mass coordinates with total linear momentum zero;
``make_zero_momentum_state`` also removes the angular momentum with a rigid
rotation, which is the regime the reduction theory covers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .geometry import TriangleState, project_with_velocity
from .masses import MassDistribution

__all__ = [
    "Diagnostics", "EventRecord", "NewtonTrajectory", "newton_rhs",
    "integrate_newton", "diagnostics", "diagnostics_along",
    "make_zero_momentum_state",
]

_PAIRS = ((0, 1), (1, 2), (2, 0))


def newton_rhs(t, y, m):
    """Right-hand side for the flattened state y = (positions, velocities).

    y has 12 entries: x1,y1,x2,y2,x3,y3 then the matching velocities.
    Gravitational constant 1, accelerations a_i'' = sum_j m_j (a_j - a_i)/r^3.
    """
    x1, y1, x2, y2, x3, y3 = y[:6]
    m1, m2, m3 = m

    dx12, dy12 = x2 - x1, y2 - y1
    dx23, dy23 = x3 - x2, y3 - y2
    dx31, dy31 = x1 - x3, y1 - y3
    r12 = (dx12 * dx12 + dy12 * dy12) ** -1.5
    r23 = (dx23 * dx23 + dy23 * dy23) ** -1.5
    r31 = (dx31 * dx31 + dy31 * dy31) ** -1.5

    f12x, f12y = dx12 * r12, dy12 * r12
    f23x, f23y = dx23 * r23, dy23 * r23
    f31x, f31y = dx31 * r31, dy31 * r31

    out = np.empty(12)
    out[:6] = y[6:]
    out[6] = m2 * f12x - m3 * f31x
    out[7] = m2 * f12y - m3 * f31y
    out[8] = m3 * f23x - m1 * f12x
    out[9] = m3 * f23y - m1 * f12y
    out[10] = m1 * f31x - m2 * f23x
    out[11] = m1 * f31y - m2 * f23y
    return out


@dataclass
class Diagnostics:
    """Instantaneous mechanical quantities of a configuration."""

    I: float
    Idot: float
    T: float
    U: float
    h: float
    Omega: float
    T_rho: float
    T_sigma: float
    T_omega: float
    wedge: float          # |delta ^ deltadot|^2 = 2 I T - Idot^2 / 4


@dataclass
class EventRecord:
    kind: str             # "binary_collision" | "rho_min" | "rho_max"
    t: float
    detail: dict = field(default_factory=dict)


def _mutual_r(y):
    x1, y1, x2, y2, x3, y3 = y[:6]
    return (math.hypot(x2 - x1, y2 - y1), math.hypot(x3 - x2, y3 - y2),
            math.hypot(x1 - x3, y1 - y3))


def diagnostics(state: TriangleState, masses: MassDistribution) -> Diagnostics:
    m = masses.m_arr
    a = state.positions - m @ state.positions
    v = state.velocities - m @ state.velocities
    I = float(np.sum(m[:, None] * a * a))
    Idot = 2.0 * float(np.sum(m[:, None] * a * v))
    T = 0.5 * float(np.sum(m[:, None] * v * v))
    Omega = float(np.sum(m * (a[:, 0] * v[:, 1] - a[:, 1] * v[:, 0])))
    r12 = np.linalg.norm(a[1] - a[0])
    r23 = np.linalg.norm(a[2] - a[1])
    r31 = np.linalg.norm(a[0] - a[2])
    mm = masses.m
    U = mm[0] * mm[1] / r12 + mm[1] * mm[2] / r23 + mm[2] * mm[0] / r31
    T_rho = Idot ** 2 / (8.0 * I)
    T_omega = Omega ** 2 / (2.0 * I)
    T_sigma = T - T_rho - T_omega
    return Diagnostics(I=I, Idot=Idot, T=T, U=U, h=T - U, Omega=Omega,
                       T_rho=T_rho, T_sigma=T_sigma, T_omega=T_omega,
                       wedge=2.0 * I * T - 0.25 * Idot ** 2)


@dataclass
class NewtonTrajectory:
    """Result of integrate_newton; evaluate anywhere via dense output."""

    masses: MassDistribution
    t0: float
    t1: float                      # last reachable time (event-truncated)
    sol: object                    # scipy OdeSolution
    h: float
    event: EventRecord | None = None

    def state(self, t) -> TriangleState:
        y = self.sol(t)
        return TriangleState(y[:6].reshape(3, 2), y[6:].reshape(3, 2))

    def times(self, n: int) -> np.ndarray:
        return np.linspace(self.t0, self.t1, n)

    def moduli_sample(self, t):
        """(rho, rhodot, p, pdot) of the projected trajectory at time t."""
        return project_with_velocity(self.state(t), self.masses)


def integrate_newton(state: TriangleState, masses: MassDistribution,
                     t_span, rtol: float = 1e-10, atol: float = 1e-12,
                     r_min: float = 1e-4, rho_min: float = 1e-4,
                     rho_max: float = 1e4) -> NewtonTrajectory:
    """Integrate Newton's equations with collision/escape guards.

    Stops early with an EventRecord when any mutual distance drops below
    r_min, or rho leaves [rho_min, rho_max].
    """
    m = masses.m_arr
    a = state.positions - m @ state.positions
    v = state.velocities - m @ state.velocities
    y0 = np.concatenate([a.ravel(), v.ravel()])
    d0 = diagnostics(state, masses)

    def ev_rmin(t, y, _m):
        return min(_mutual_r(y)) - r_min

    def ev_rho(t, y, _m):
        I = (_m[0] * (y[0] ** 2 + y[1] ** 2) + _m[1] * (y[2] ** 2 + y[3] ** 2)
             + _m[2] * (y[4] ** 2 + y[5] ** 2))
        return I - rho_min ** 2

    def ev_rho_max(t, y, _m):
        I = (_m[0] * (y[0] ** 2 + y[1] ** 2) + _m[1] * (y[2] ** 2 + y[3] ** 2)
             + _m[2] * (y[4] ** 2 + y[5] ** 2))
        return rho_max ** 2 - I

    for ev in (ev_rmin, ev_rho, ev_rho_max):
        ev.terminal = True
        ev.direction = -1

    res = solve_ivp(newton_rhs, t_span, y0, args=(masses.m,), method="DOP853",
                    rtol=rtol, atol=atol, dense_output=True,
                    events=[ev_rmin, ev_rho, ev_rho_max])
    if res.status == -1:
        raise ArithmeticError(f"integration failed: {res.message}")

    event = None
    if res.status == 1:
        kinds = ["binary_collision", "rho_min", "rho_max"]
        for which, te in enumerate(res.t_events):
            if len(te):
                event = EventRecord(kind=kinds[which], t=float(te[0]))
                break

    return NewtonTrajectory(masses=masses, t0=t_span[0], t1=float(res.t[-1]),
                            sol=res.sol, h=d0.h, event=event)


def diagnostics_along(traj: NewtonTrajectory, ts=None, n: int = 400):
    """Diagnostics arrays over the trajectory, plus a Lagrange-Jacobi check.

    The residual column is Iddot - 2(U + 2h) with Iddot from a fourth-order
    finite difference of Idot, so it measures the integrated solution, not
    the algebra of the right-hand side.
    """
    if ts is None:
        ts = traj.times(n)
    ts = np.asarray(ts)
    rows = [diagnostics(traj.state(t), traj.masses) for t in ts]
    out = {name: np.array([getattr(r, name) for r in rows])
           for name in ("I", "Idot", "T", "U", "h", "Omega", "T_rho",
                        "T_sigma", "T_omega", "wedge")}
    out["t"] = ts

    # 4th order central differences around each node.  The step follows the
    # fastest pairwise timescale so close passes do not poison the stencil.
    mm = traj.masses.m
    lj = np.empty(len(ts))
    for i, t in enumerate(ts):
        a = traj.state(t).positions
        tau = min(np.linalg.norm(a[ii] - a[jj]) ** 1.5
                  / math.sqrt(mm[ii] + mm[jj])
                  for ii, jj in ((0, 1), (0, 2), (1, 2)))
        dt = float(np.clip(0.005 * tau, 1e-7, 1e-3))
        tt = t + dt * np.array([-2.0, -1.0, 1.0, 2.0])
        if tt[0] < traj.t0 or tt[3] > traj.t1:
            lj[i] = np.nan
            continue
        vals = [diagnostics(traj.state(s), traj.masses).Idot for s in tt]
        iddot = (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12 * dt)
        lj[i] = iddot - 2.0 * (rows[i].U + 2.0 * traj.h)
    out["lj_residual"] = lj
    return out


def make_zero_momentum_state(positions, velocities,
                             masses: MassDistribution) -> TriangleState:
    """Shift to the center of mass and remove momentum and angular momentum.

    The angular momentum is removed by the rigid counter-rotation
    v_i -> v_i - omega x a_i with omega = Omega/I, which leaves I, Idot and
    the configuration unchanged.
    """
    m = masses.m_arr
    a = np.asarray(positions, dtype=float).reshape(3, 2)
    v = np.asarray(velocities, dtype=float).reshape(3, 2)
    a = a - m @ a
    v = v - m @ v
    I = float(np.sum(m[:, None] * a * a))
    Omega = float(np.sum(m * (a[:, 0] * v[:, 1] - a[:, 1] * v[:, 0])))
    w = Omega / I
    v = v - w * np.column_stack([-a[:, 1], a[:, 0]])
    return TriangleState(a, v)
