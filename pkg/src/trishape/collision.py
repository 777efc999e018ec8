"""Triple-collision machinery: rays, asymptotics, magnified frame, rotation.

Ray (homothetic) solutions keep a fixed central-configuration shape; the
size obeys the one-dimensional Kepler-type law I'' = 2 mu / sqrt(I) + 4h
with mu = U* at the shape.  For h = 0 the profile is exactly I = K t^{4/3},
K = (9 mu / 2)^{2/3}, which is also the universal leading behavior of any
triple-collision orbit (all of which have zero angular momentum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .geometry import (TriangleState, configuration_from_shape,
                       project_with_velocity)
from .masses import MassDistribution
from .newton import NewtonTrajectory, diagnostics, make_zero_momentum_state
from .potential import critical_points, shape_gradient, shape_potential

__all__ = [
    "RaySolution", "ray_solution", "AsymptoticProfile", "asymptotic_profile",
    "MagnifiedTrajectory", "log_time_integrate", "magnified_state",
    "lagrange_rest_point", "CollisionBranch", "collision_branch",
    "collision_rotation", "collision_time",
]


@dataclass
class RaySolution:
    point: np.ndarray
    mu: float
    h: float
    K: float
    t: np.ndarray
    I: np.ndarray
    Idot: np.ndarray
    lj_residual: np.ndarray


def _resolve_critical(point, masses: MassDistribution):
    if isinstance(point, str):
        crit = critical_points(masses)
        table = {
            "lagrange": crit.lagrange[0], "lagrange_south": crit.lagrange[1],
            "euler0": crit.euler[0], "euler1": crit.euler[1],
            "euler2": crit.euler[2],
        }
        if point not in table:
            raise ValueError(f"unknown critical point id {point!r}")
        return np.asarray(table[point], dtype=float)
    return np.asarray(point, dtype=float)


def ray_solution(point, h: float, t_grid, masses: MassDistribution,
                 rtol: float = 1e-12, atol: float = 1e-14,
                 numeric: bool = False) -> RaySolution:
    """Homothetic size profile I(t) at a critical shape point.

    h = 0 is closed-form; otherwise the 1-D equation is integrated from a
    three-term series start near t = 0 (I ~ K t^{4/3} + (9h/5) t^2 + ...).
    numeric forces the ODE path even at h = 0, as a cross-check of the
    closed form.  The grid must be increasing and positive.
    """
    p = _resolve_critical(point, masses)
    g = float(np.linalg.norm(shape_gradient(p, masses)))
    if g > 1e-8:
        raise ValueError("ray solutions exist only at critical points of U*")
    mu = float(shape_potential(p, masses))
    K = (4.5 * mu) ** (2.0 / 3.0)
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) == 0 or np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be positive and increasing")

    if h == 0.0 and not numeric:
        I = K * t ** (4.0 / 3.0)
        Idot = (4.0 / 3.0) * K * t ** (1.0 / 3.0)
        Iddot = (4.0 / 9.0) * K * t ** (-2.0 / 3.0)
    else:
        t0 = t[0] * 1e-4
        k1 = 1.8 * h
        k2 = k1 * k1 / (28.0 * K)
        I0 = K * t0 ** (4.0 / 3.0) + k1 * t0 ** 2 + k2 * t0 ** (8.0 / 3.0)
        Id0 = ((4.0 / 3.0) * K * t0 ** (1.0 / 3.0) + 2.0 * k1 * t0
               + (8.0 / 3.0) * k2 * t0 ** (5.0 / 3.0))

        def rhs(_, y):
            return (y[1], 2.0 * mu / math.sqrt(y[0]) + 4.0 * h)

        sol = solve_ivp(rhs, (t0, t[-1]), (I0, Id0), method="DOP853",
                        dense_output=True, rtol=rtol, atol=atol)
        if not sol.success:
            raise ArithmeticError(f"ray integration failed: {sol.message}")
        ys = sol.sol(t)
        I, Idot = ys[0], ys[1]
        Iddot = 2.0 * mu / np.sqrt(I) + 4.0 * h

    res = Iddot - (2.0 * mu / np.sqrt(I) + 4.0 * h)
    return RaySolution(point=p, mu=mu, h=h, K=K, t=t, I=I, Idot=Idot,
                       lj_residual=res)


def collision_time(traj: NewtonTrajectory, n_fit: int = 12) -> float:
    """Extrapolated triple-collision time from the tail of a trajectory.

    rho^{3/2} is asymptotically linear in t near collision, so a linear fit
    of the last samples locates the root.
    """
    t1 = traj.t1
    t0 = max(traj.t0, t1 - 0.05 * (t1 - traj.t0))
    ts = np.linspace(t0, t1, n_fit)
    y = np.empty(n_fit)
    for i, t in enumerate(ts):
        s = traj.state(t)
        y[i] = diagnostics(s, traj.masses).I ** 0.75  # rho^{3/2} = I^{3/4}
    c1, c0 = np.polyfit(ts, y, 1)
    if c1 >= 0.0:
        raise ValueError("trajectory does not approach a collision")
    return -c0 / c1


@dataclass
class AsymptoticProfile:
    s: np.ndarray          # time to collision, decreasing toward cutoff
    R: np.ndarray          # (n, 4) derivative ratios, k = 0..3
    mu: float
    K: float
    t_c: float
    S: np.ndarray          # Siegel values rho^3 v^2 / 4 along the tail
    wedge: np.ndarray      # 2 I T - Idot^2 / 4
    p_limit: np.ndarray


def asymptotic_profile(traj: NewtonTrajectory, n: int = 60,
                       omega_tol: float = 1e-8) -> AsymptoticProfile:
    """Collision asymptotics of a trajectory ending near triple collision.

    Compares the exact derivatives of I (up to third order, all available
    in closed form from the state) with those of the model law K s^{4/3},
    s = time to the extrapolated collision.
    """
    d_end = diagnostics(traj.state(traj.t1), traj.masses)
    if abs(d_end.Omega) > omega_tol:
        raise ValueError(
            f"collision asymptotics require zero angular momentum, "
            f"got {d_end.Omega:.3e}")
    t_c = collision_time(traj)
    if t_c <= traj.t1:
        t_c = traj.t1 + 1e-12
    s_cut = t_c - traj.t1
    s_hi = min(10.0 * s_cut, 0.99 * (t_c - traj.t0))
    s = np.geomspace(s_hi, s_cut, n)

    rho_end, _, p_limit, _ = traj.moduli_sample(traj.t1)
    mu = float(shape_potential(p_limit, traj.masses))
    K = (4.5 * mu) ** (2.0 / 3.0)

    m = traj.masses.m_arr
    R = np.empty((n, 4))
    S = np.empty(n)
    wedge = np.empty(n)
    for i, si in enumerate(s):
        st = traj.state(t_c - si)
        dg = diagnostics(st, traj.masses)
        I, Idot, T, U = dg.I, dg.Idot, dg.T, dg.U
        dr = st.positions[:, None, :] - st.positions[None, :, :]
        dv = st.velocities[:, None, :] - st.velocities[None, :, :]
        r3 = np.linalg.norm(dr, axis=-1) ** 3
        np.fill_diagonal(r3, np.inf)
        mm = m[:, None] * m[None, :]
        Udot = -0.5 * np.sum(mm * np.einsum("ijk,ijk->ij", dr, dv) / r3)
        dIds = (-Idot, 4.0 * T - 2.0 * U, -2.0 * Udot)
        R[i, 0] = I / (K * si ** (4.0 / 3.0))
        R[i, 1] = dIds[0] / ((4.0 / 3.0) * K * si ** (1.0 / 3.0))
        R[i, 2] = dIds[1] / ((4.0 / 9.0) * K * si ** (-2.0 / 3.0))
        R[i, 3] = dIds[2] / ((-8.0 / 27.0) * K * si ** (-5.0 / 3.0))
        rho, _, _, pdot = traj.moduli_sample(t_c - si)
        S[i] = rho ** 3 * float(pdot @ pdot) / 4.0
        wedge[i] = dg.wedge
    return AsymptoticProfile(s=s, R=R, mu=mu, K=K, t_c=t_c, S=S, wedge=wedge,
                             p_limit=p_limit)


def _magnified_rhs(u, y, m):
    a = y[:6].reshape(3, 2)
    ap = y[6:].reshape(3, 2)
    acc = np.zeros((3, 2))
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            d = a[j] - a[i]
            acc[i] += m[j] * d / np.linalg.norm(d) ** 3
    app = acc + ap / 3.0 + (2.0 / 9.0) * a
    return np.concatenate([ap.ravel(), app.ravel()])


@dataclass
class MagnifiedTrajectory:
    masses: MassDistribution
    u0: float
    u1: float
    sol: object
    energy_residual_max: float

    def state(self, u):
        y = self.sol(u)
        return y[:6].reshape(3, 2), y[6:].reshape(3, 2)

    def rho_hat(self, u):
        a, _ = self.state(u)
        return math.sqrt(float(np.sum(self.masses.m_arr[:, None] * a * a)))

    def drho_hat(self, u):
        a, ap = self.state(u)
        r = self.rho_hat(u)
        return float(np.sum(self.masses.m_arr[:, None] * a * ap)) / r

    def untransform(self, u) -> TriangleState:
        """Physical state at t = e^{-u}."""
        t = math.exp(-u)
        a, ap = self.state(u)
        pos = t ** (2.0 / 3.0) * a
        vel = t ** (-1.0 / 3.0) * ((2.0 / 3.0) * a - ap)
        return TriangleState(positions=pos, velocities=vel)


def magnified_state(state: TriangleState, t: float,
                    masses: MassDistribution):
    """(u, y) magnified-frame coordinates of a physical state at time t > 0."""
    u = -math.log(t)
    a = t ** (-2.0 / 3.0) * state.positions
    ap = (2.0 / 3.0) * a - t ** (1.0 / 3.0) * state.velocities
    return u, np.concatenate([a.ravel(), ap.ravel()])


def log_time_integrate(state: TriangleState, t: float,
                       masses: MassDistribution, u_span: float,
                       h: float | None = None, rtol: float = 1e-10,
                       atol: float = 1e-12,
                       rho_hat_max: float = 1e3) -> MagnifiedTrajectory:
    """Integrate the magnified equations in u = -log(t) toward collision.

    The input is a physical state on an explosion branch at physical time t
    (time measured from the collision).  In the magnified frame the motion
    approaches the central configuration with Ihat = K; divergence of
    rho_hat means the state was not on a collision branch.
    """
    m = masses.m_arr
    if h is None:
        dg = diagnostics(state, masses)
        h = dg.h

    def rhs(u, y):
        return _magnified_rhs(u, y, m)

    def blow_up(u, y):
        a = y[:6].reshape(3, 2)
        return float(np.sum(m[:, None] * a * a)) - rho_hat_max ** 2
    blow_up.terminal = True

    u0, y0 = magnified_state(state, t, masses)
    sol = solve_ivp(rhs, (u0, u0 + u_span), y0, method="DOP853",
                    dense_output=True, events=[blow_up], rtol=rtol, atol=atol)
    if not sol.success:
        raise ArithmeticError(f"magnified integration failed: {sol.message}")
    if sol.t_events[0].size:
        raise ArithmeticError(
            "rho_hat diverged: the state is not on a collision branch")

    us = np.linspace(u0, sol.t[-1], 200)
    res = 0.0
    for u in us:
        y = sol.sol(u)
        a = y[:6].reshape(3, 2)
        ap = y[6:].reshape(3, 2)
        w = (2.0 / 3.0) * a - ap
        T_hat = 0.5 * float(np.sum(m[:, None] * w * w))
        U_hat = 0.0
        for i in range(3):
            for j in range(i + 1, 3):
                U_hat += m[i] * m[j] / float(np.linalg.norm(a[i] - a[j]))
        res = max(res, abs(T_hat - U_hat - h * math.exp(-2.0 * u / 3.0)))
    return MagnifiedTrajectory(masses=masses, u0=u0, u1=sol.t[-1],
                               sol=sol.sol, energy_residual_max=res)


def lagrange_rest_point(masses: MassDistribution, which: int = 0):
    """Rest point of the magnified flow: Lagrange shape at rho_hat = sqrt(K).

    Rest points satisfy acc(a) = -(2/9) a, which scales the unit-size
    central configuration by (9 mu / 2)^{1/3}.
    """
    p0 = critical_points(masses).lagrange[which]
    mu = float(shape_potential(p0, masses))
    c = (4.5 * mu) ** (1.0 / 3.0)
    q = configuration_from_shape(c, p0, masses)
    return np.concatenate([q.ravel(), np.zeros(6)])


@dataclass
class CollisionBranch:
    """Collision/ejection branch through a Lagrange rest point.

    Parametrized by u with t = e^{-u} the time since collision; increasing u
    runs toward the collision.  The branch lives on the stable manifold of
    the rest point, so the shape genuinely converges and the Siegel function
    decays to zero, unlike a transversally kicked ejection state whose
    backward continuation misses the collision.
    """
    masses: MassDistribution
    h: float
    eigenvalue: complex
    u_lo: float
    u_hi: float
    sol_lo: object
    sol_hi: object

    def magnified(self, u):
        sol = self.sol_hi if u >= 0.0 else self.sol_lo
        y = sol(u)
        return y[:6].reshape(3, 2), y[6:].reshape(3, 2)

    def physical(self, u):
        """(time since collision, physical state) at log-time u."""
        t = math.exp(-u)
        a, ap = self.magnified(u)
        pos = t ** (2.0 / 3.0) * a
        vel = t ** (-1.0 / 3.0) * ((2.0 / 3.0) * a - ap)
        return t, TriangleState(positions=pos, velocities=vel)

    def rho_hat(self, u):
        a, _ = self.magnified(u)
        return math.sqrt(float(np.sum(self.masses.m_arr[:, None] * a * a)))

    def siegel(self, u):
        _, st = self.physical(u)
        rho, _, _, pdot = project_with_velocity(st, self.masses)
        return rho ** 3 * float(pdot @ pdot) / 4.0


def collision_branch(masses: MassDistribution, delta: float = 1e-3,
                     u_back: float = 20.0, u_fwd: float = 8.0,
                     which: int = 0, rho_hat_max: float = 1e3,
                     r_hat_min: float = 1e-2,
                     rtol: float = 1e-12, atol: float = 1e-14):
    """Construct a genuine collision branch near the Lagrange rest point.

    Displaces the rest point by delta along its slowest stable
    eigendirection (eigenvalues from a finite-difference Jacobian of the
    magnified field) and integrates both ways.  delta controls how far the
    off-manifold quadratic error sits below the on-branch amplitude.
    """
    m = masses.m_arr
    y_rest = lagrange_rest_point(masses, which)
    if np.linalg.norm(_magnified_rhs(0.0, y_rest, m)) > 1e-10:
        raise ArithmeticError("rest point residual too large")
    n = 12
    J = np.empty((n, n))
    step = 1e-7
    for k in range(n):
        e = np.zeros(n)
        e[k] = step
        J[:, k] = (_magnified_rhs(0.0, y_rest + e, m)
                   - _magnified_rhs(0.0, y_rest - e, m)) / (2.0 * step)
    w, V = np.linalg.eig(J)

    def _real_unit(k):
        vec = V[:, k].real
        if np.linalg.norm(vec) < 1e-12:
            vec = V[:, k].imag
        return vec / np.linalg.norm(vec)

    def _shape_rate(vec):
        # how fast the shape point moves per unit of displacement; filters
        # out the pure size / time / rotation modes
        d = 1e-6
        y = y_rest + d * vec
        st = TriangleState(y[:6].reshape(3, 2),
                           ((2.0 / 3.0) * y[:6] - y[6:]).reshape(3, 2))
        _, _, p, _ = project_with_velocity(st, masses)
        _, _, p_rest, _ = project_with_velocity(
            TriangleState(y_rest[:6].reshape(3, 2), np.zeros((3, 2))),
            masses)
        return float(np.linalg.norm(p - p_rest)) / d

    stable = [k for k in range(n)
              if w[k].real < -1e-6 and _shape_rate(_real_unit(k)) > 0.1]
    if not stable:
        raise ArithmeticError("no stable shape eigendirection at the rest"
                              " point")
    k = max(stable, key=lambda i: w[i].real)
    vec = _real_unit(k)

    y0 = y_rest + delta * vec
    # restore exact zero momenta (the magnified map preserves both)
    a = y0[:6].reshape(3, 2)
    vel = (2.0 / 3.0) * a - y0[6:].reshape(3, 2)
    st = make_zero_momentum_state(a, vel, masses)
    y0 = np.concatenate([st.positions.ravel(),
                         ((2.0 / 3.0) * st.positions
                          - st.velocities).ravel()])
    h = diagnostics(st, masses).h

    def blow_up(u, y, *_):
        a = y[:6].reshape(3, 2)
        return float(np.sum(m[:, None] * a * a)) - rho_hat_max ** 2
    blow_up.terminal = True

    def pinch(u, y, *_):
        a = y[:6].reshape(3, 2)
        return min(np.linalg.norm(a[i] - a[j])
                   for i, j in ((0, 1), (0, 2), (1, 2))) - r_hat_min
    pinch.terminal = True

    hi = solve_ivp(_magnified_rhs, (0.0, u_fwd), y0, args=(m,),
                   method="DOP853", dense_output=True, rtol=rtol, atol=atol)
    lo = solve_ivp(_magnified_rhs, (0.0, -u_back), y0, args=(m,),
                   method="DOP853", dense_output=True, events=[blow_up, pinch],
                   rtol=rtol, atol=atol)
    if not (hi.success and lo.success):
        raise ArithmeticError("branch integration failed")
    return CollisionBranch(masses=masses, h=h, eigenvalue=complex(w[k]),
                           u_lo=float(lo.t[-1]), u_hi=float(hi.t[-1]),
                           sol_lo=lo.sol, sol_hi=hi.sol)


def _arc_points(a, b, n):
    dot = float(np.clip(a @ b, -1.0, 1.0))
    ang = math.acos(dot)
    if ang < 1e-12:
        return np.tile(a, (n, 1))
    ts = np.linspace(0.0, 1.0, n)
    pts = (np.sin((1.0 - ts) * ang)[:, None] * a[None, :]
           + np.sin(ts * ang)[:, None] * b[None, :]) / math.sin(ang)
    return pts


def collision_rotation(traj: NewtonTrajectory, t1: float, n: int = 400,
                       arc_n: int = 64, p0_tol: float = 0.05) -> float:
    """Rotation angle psi(t1) of a Lagrange ejection/collision branch.

    The trajectory carries the branch with the collision at its left end:
    the shape at traj.t0 sits at a Lagrange point.  psi(t1) is half the
    signed area bounded by the shape curve on [t0, t1] and the geodesic arc
    from shape(t1) back to the Lagrange point.  By the zero-momentum
    Gauss-Bonnet identity this is the net rotation the triangle performs
    over that window; it decreases to zero as t1 -> t0, which is how the
    triangle settles into a limiting position instead of spinning.
    """
    from .analysis import spherical_polygon_area
    masses = traj.masses
    _, _, p_start, _ = traj.moduli_sample(traj.t0)
    crit = critical_points(masses)
    d0 = np.linalg.norm(p_start - crit.lagrange[0])
    d1 = np.linalg.norm(p_start - crit.lagrange[1])
    p0 = crit.lagrange[0] if d0 <= d1 else crit.lagrange[1]
    if min(d0, d1) > p0_tol:
        raise ValueError("branch does not start at a Lagrange shape")
    ts = np.linspace(traj.t0, t1, n)
    pts = np.empty((n, 3))
    for i, t in enumerate(ts):
        _, _, pts[i], _ = traj.moduli_sample(t)
    loop = np.vstack([pts, _arc_points(pts[-1], p0, arc_n)])
    return 0.5 * spherical_polygon_area(loop)
