"""Intrinsic data along shape curves: frames, curvature, Siegel function.

All quantities live on the unit shape sphere: v is the speed of the curve,
K* its geodesic curvature, U*_tau / U*_nu the tangential and normal
derivatives of the shape potential, and S = U*_nu / K* the Siegel function,
whose cube-root reconstructs the size variable rho.  Primes denote
arc-length derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .masses import MassDistribution
from .potential import ambient_hessian, b_field, shape_gradient, shape_potential
from .reduced import _invariant_derivs

__all__ = [
    "CurveFrame", "frame_from_vectors", "trajectory_frames",
    "chart_frame", "reconstruct_rho", "intrinsic_fit",
    "PointClass", "classify_point",
]


@dataclass
class CurveFrame:
    """Intrinsic quantities of a shape curve at one sample."""

    t: float
    p: np.ndarray
    tau: np.ndarray
    nu: np.ndarray
    v: float
    vdot: float
    U: float
    U_tau: float
    U_nu: float
    U_nu_prime: float
    Kstar: float
    Kstar_prime: float
    S: float
    S_prime: float

    @property
    def regular(self) -> bool:
        return (self.v > 0.0 and math.isfinite(self.S) and self.S > 0.0)


def frame_from_vectors(t, p, pdot, pdd, pddd, masses: MassDistribution,
                       v_min: float = 1e-12) -> CurveFrame:
    """CurveFrame from ambient derivatives of the curve at one time.

    p is a unit vector; pdot, pdd, pddd its time derivatives.  S and its
    arc-length derivative are formed from the ratio U*_nu / K*; at samples
    where K* vanishes they come out non-finite and the caller is expected
    to regularize (see reconstruct_rho).
    """
    v2 = float(pdot @ pdot)
    v = math.sqrt(v2)
    if v < v_min:
        raise ValueError("zero-speed sample has no Frenet frame")
    tau = pdot / v
    nu = np.cross(p, tau)
    vdot = float(pdot @ pdd) / v

    B = b_field(p, masses)
    G = B - (B @ p) * p
    U = float(shape_potential(p, masses))
    U_tau = float(G @ tau)
    U_nu = float(G @ nu)

    Kstar = float(p @ np.cross(pdot, pdd)) / v ** 3
    Kdot = float(p @ np.cross(pdot, pddd)) / v ** 3 - 3.0 * Kstar * vdot / v
    Kstar_prime = Kdot / v

    H = ambient_hessian(p, masses)
    Bd = H @ pdot
    Gd = Bd - (Bd @ p + B @ pdot) * p - (B @ p) * pdot
    taud = pdd / v - pdot * vdot / v2
    nud = np.cross(pdot, tau) + np.cross(p, taud)
    U_nu_dot = float(Gd @ nu + G @ nud)
    U_nu_prime = U_nu_dot / v

    with np.errstate(divide="ignore", invalid="ignore"):
        S = U_nu / Kstar if Kstar != 0.0 else math.inf * np.sign(U_nu)
        if Kstar != 0.0 and U_nu != 0.0:
            S_prime = S * (U_nu_prime / U_nu - Kstar_prime / Kstar)
        elif Kstar != 0.0:
            S_prime = U_nu_prime / Kstar
        else:
            S_prime = math.nan
    return CurveFrame(t=float(t), p=p, tau=tau, nu=nu, v=v, vdot=vdot, U=U,
                      U_tau=U_tau, U_nu=U_nu, U_nu_prime=U_nu_prime,
                      Kstar=Kstar, Kstar_prime=Kstar_prime, S=float(S),
                      S_prime=float(S_prime))


def trajectory_frames(traj, ts) -> list[CurveFrame]:
    """Frames along a moduli trajectory (or any object with state/derivs)."""
    out = []
    for t in ts:
        rho, rho1, p, pdot = traj.state(t)
        pdd, pddd, _ = traj.derivs(t)
        out.append(frame_from_vectors(t, p, pdot, pdd, pddd, traj.masses))
    return out


def newton_frames(traj, ts) -> list[CurveFrame]:
    """Frames along a projected Newton trajectory (zero angular momentum)."""
    out = []
    for t in ts:
        rho, rho1, p, pdot = traj.moduli_sample(t)
        pdd, pddd, _ = _invariant_derivs(rho, rho1, p, pdot, traj.masses)
        out.append(frame_from_vectors(t, p, pdot, pdd, pddd, traj.masses))
    return out


def chart_frame(phi, theta, d1, d2, d3, masses: MassDistribution):
    """Spherical-coordinate form of the frame scalars.

    d1, d2, d3 are the (phi, theta) time-derivative pairs.  Returns a dict
    with v, vdot, Kstar, Kstar_prime, U_tau, U_nu, U_nu_prime, S, S_prime
    computed purely from the coordinate formulary; cross-checks
    frame_from_vectors.
    """
    from .reduced import _chart_partials
    phi1, theta1 = d1
    phi2, theta2 = d2
    phi3, theta3 = d3
    sp, cp = math.sin(phi), math.cos(phi)
    g, f = sp * sp, 2.0 * sp * cp
    U, U_p, U_t, U_pp, U_pt, U_tt = _chart_partials(
        phi, theta, masses, None, second=True)

    v2 = phi1 * phi1 + g * theta1 * theta1
    v = math.sqrt(v2)
    N = phi1 * phi2 + sp * cp * phi1 * theta1 * theta1 + g * theta1 * theta2
    vdot = N / v
    cos2 = cp * cp - sp * sp
    Ndot = (phi2 * phi2 + phi1 * phi3 + cos2 * phi1 * phi1 * theta1 * theta1
            + sp * cp * (phi2 * theta1 * theta1 + 2.0 * phi1 * theta1 * theta2)
            + f * phi1 * theta1 * theta2 + g * (theta2 * theta2 + theta1 * theta3))
    vddot = (Ndot - vdot * vdot) / v

    # arc-length derivatives of the coordinates
    p1 = phi1 / v
    t1 = theta1 / v
    p2 = (phi2 - vdot * p1) / v2
    t2 = (theta2 - vdot * t1) / v2
    p3 = (phi3 - vddot * p1 - 3.0 * v * vdot * p2) / v ** 3
    t3 = (theta3 - vddot * t1 - 3.0 * v * vdot * t2) / v ** 3

    Kstar = cp * t1 * (1.0 + p1 * p1) + sp * (p1 * t2 - t1 * p2)
    Kstar_prime = ((-sp * p1 * t1 + cp * t2) * (1.0 + p1 * p1)
                   + 2.0 * cp * t1 * p1 * p2
                   + cp * p1 * (p1 * t2 - t1 * p2)
                   + sp * (p1 * t3 - t1 * p3))

    U_tau = (phi1 * U_p + theta1 * U_t) / v
    U_nu = (-theta1 * sp * U_p + phi1 * U_t / sp) / v
    dU_p = U_pp * phi1 + U_pt * theta1
    dU_t = U_pt * phi1 + U_tt * theta1
    U_nu_dot = ((-theta2 * sp * U_p - theta1 * cp * phi1 * U_p
                 - theta1 * sp * dU_p + phi2 * U_t / sp + phi1 * dU_t / sp
                 - phi1 * U_t * cp * phi1 / g) / v - U_nu * vdot / v)
    U_nu_prime = U_nu_dot / v

    S = U_nu / Kstar if Kstar != 0.0 else math.nan
    S_prime = (S * (U_nu_prime / U_nu - Kstar_prime / Kstar)
               if Kstar != 0.0 and U_nu != 0.0 else math.nan)
    return {"v": v, "vdot": vdot, "Kstar": Kstar, "Kstar_prime": Kstar_prime,
            "U": U, "U_tau": U_tau, "U_nu": U_nu, "U_nu_prime": U_nu_prime,
            "S": S, "S_prime": S_prime}


def reconstruct_rho(frame: CurveFrame, tol: float = 1e-8):
    """Size rho from one frame: rho**3 = 4 S / v**2.

    At an order-1 point (K* and U*_nu both below tol relative to their
    derivative scale) the Siegel value is taken as the ratio of first
    arc-length derivatives.
    """
    S = frame.S
    scale_K = abs(frame.Kstar) + abs(frame.Kstar_prime)
    scale_U = abs(frame.U_nu) + abs(frame.U_nu_prime)
    if scale_K > 0.0 and scale_U > 0.0:
        small_K = abs(frame.Kstar) < tol * scale_K
        small_U = abs(frame.U_nu) < tol * scale_U
        if small_K and small_U:
            S = frame.U_nu_prime / frame.Kstar_prime
        elif small_K or small_U:
            return math.nan
    if not (math.isfinite(S) and S > 0.0):
        return math.nan
    return (4.0 * S / frame.v ** 2) ** (1.0 / 3.0)


def intrinsic_fit(s, Kstar, U_nu, deg: int = 4, coeff_tol: float = 1e-8):
    """(S0, S1, k) at s = 0 from sampled K*(s) and U*_nu(s).

    Least-squares polynomial fits in the arc length; k is the common order
    of the first coefficients exceeding coeff_tol relative to each series
    scale.  S0 is the ratio of the order-k coefficients and S1 the slope of
    the ratio series, per the l'Hospital limit at points of order k.
    """
    s = np.asarray(s, dtype=float)
    cK = np.polynomial.polynomial.polyfit(s, Kstar, deg)
    cU = np.polynomial.polynomial.polyfit(s, U_nu, deg)
    scale_K = np.max(np.abs(cK)) or 1.0
    scale_U = np.max(np.abs(cU)) or 1.0
    k = 0
    while k <= deg and (abs(cK[k]) < coeff_tol * scale_K
                        and abs(cU[k]) < coeff_tol * scale_U):
        k += 1
    if k > deg or abs(cK[k]) < coeff_tol * scale_K:
        raise ArithmeticError("no common finite order detected")
    S0 = cU[k] / cK[k]
    if k + 1 <= deg:
        S1 = (cU[k + 1] - S0 * cK[k + 1]) / cK[k]
    else:
        S1 = math.nan
    return float(S0), float(S1), int(k)


@dataclass
class PointClass:
    """Classification of a trajectory endpoint or limit point."""

    label: str            # regular | cusp | triple_collision
                          # | binary_collision | escape | inconclusive
    order: int | None = None
    detail: dict | None = None


def classify_point(traj, masses: MassDistribution, t_end=None,
                   window: float = 0.2, n: int = 40,
                   v_tol: float = 1e-3, grad_tol: float = 1e-3,
                   rho_big: float = 1e3) -> PointClass:
    """Classify the behavior of a moduli trajectory near its final time.

    Works on windows of samples approaching t_end and applies the limit
    table: binary collision (shape point reaching a collision point, S
    blowing up), triple collision (rho -> 0 with vanishing gradient at the
    limit shape), escape (rho unbounded, speed -> 0), cusp (speed -> 0 at an
    interior point with nonzero gradient), else a regular point.
    """
    if t_end is None:
        t_end = traj.t1
    t_lo = max(traj.t0, t_end - window)
    ts = np.linspace(t_lo, t_end, n)
    rho = np.empty(n)
    v = np.empty(n)
    for i, t in enumerate(ts):
        r, r1, p, pdot = traj.state(t)
        rho[i] = r
        v[i] = np.linalg.norm(pdot)
    r_end, _, p_end, _ = traj.state(ts[-1])
    grad = float(np.linalg.norm(shape_gradient(p_end, masses)))
    b_dist = min(float(np.linalg.norm(p_end - traj.masses.b[i]))
                 for i in range(3))

    ev = getattr(traj, "event", None)
    if (ev is not None and ev.kind == "binary_collision") or b_dist < 1e-2:
        return PointClass("binary_collision",
                          detail={"b_dist": b_dist, "rho": r_end})
    if (ev is not None and ev.kind == "rho_min") or rho[-1] < 1e-3:
        # near total collapse the limit shape must be central (flat gradient)
        return PointClass(
            "triple_collision" if grad < grad_tol * 10 else "inconclusive",
            detail={"rho": rho[-1], "grad": grad})
    if (ev is not None and ev.kind == "rho_max") or rho[-1] > rho_big:
        return PointClass("escape" if v[-1] < v_tol else "inconclusive",
                          detail={"rho": rho[-1], "v": v[-1]})
    if v[-1] < v_tol and grad > grad_tol:
        return PointClass("cusp", detail={"v": v[-1], "grad": grad})

    frame = trajectory_frames(traj, [ts[-1]])[0]
    order = 0 if abs(frame.Kstar) > 1e-8 * (abs(frame.Kstar_prime) + 1) else 1
    return PointClass("regular", order=order,
                      detail={"S": frame.S, "v": frame.v})
