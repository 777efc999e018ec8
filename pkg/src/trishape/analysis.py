"""Global shape-curve analysis: m-latitude, segments, rotation, chaoticity.

The m-latitude is the latitude after the Mobius normalization that moves the
two Lagrange shape points to the poles while preserving the collinear
equator.  Writing p0 = (x0, y0, z0) for the northern Lagrange point, the
normalization is a Blaschke disk automorphism in the south-pole
stereographic chart, and the latitude collapses to the closed form

    sin(lambda) = z0 * z / (1 - x*x0 - y*y0)

which is regular on the whole sphere (the denominator only vanishes at the
mirrored Lagrange point when z0 = 0, excluded for positive masses).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .frames import CurveFrame, frame_from_vectors
from .masses import MassDistribution
from .potential import shape_potential
from .reduced import ModuliState, _invariant_derivs

__all__ = [
    "m_latitude", "m_latitude_rate", "m_gradient", "east_tangent",
    "Extremum", "MonotonicityReport", "monotonicity_report",
    "SegmentTuple", "FundamentalSegment", "fundamental_segments",
    "reflect_tuple", "state_from_tuple", "energy_sign",
    "spherical_polygon_area", "closed_curve_rotation", "chaoticity",
]


def m_latitude(p, masses: MassDistribution):
    """Latitude of the Mobius-normalized image of shape points p (..., 3)."""
    p = np.asarray(p, dtype=float)
    x0, y0, z0 = masses.lagrange_point()
    den = 1.0 - p[..., 0] * x0 - p[..., 1] * y0
    s = np.clip(z0 * p[..., 2] / den, -1.0, 1.0)
    return np.arcsin(s)


def m_latitude_rate(p, pdot, masses: MassDistribution):
    """(lambda, dlambda/dt) for a moving shape point."""
    x0, y0, z0 = masses.lagrange_point()
    den = 1.0 - p[0] * x0 - p[1] * y0
    q = z0 * p[2] / den
    qdot = z0 * (pdot[2] * den + p[2] * (pdot[0] * x0 + pdot[1] * y0)) / den ** 2
    q = min(1.0, max(-1.0, q))
    lam = math.asin(q)
    c = math.sqrt(max(1.0 - q * q, 0.0))
    return lam, qdot / c if c > 1e-12 else math.inf * np.sign(qdot)


def m_gradient(p, masses: MassDistribution):
    """Surface gradient of the m-latitude at p (points toward increasing)."""
    x0, y0, z0 = masses.lagrange_point()
    den = 1.0 - p[0] * x0 - p[1] * y0
    q = z0 * p[2] / den
    gq = (z0 / den ** 2) * np.array([p[2] * x0, p[2] * y0, den])
    gq -= (gq @ p) * p
    c = math.sqrt(max(1.0 - q * q, 1e-300))
    return gq / c


def east_tangent(p, masses: MassDistribution):
    """Unit tangent of the m-latitude circle through p, eastward oriented."""
    e = np.cross(m_gradient(p, masses), p)
    n = np.linalg.norm(e)
    if n < 1e-14:
        raise ValueError("east direction undefined at an m-pole")
    return e / n


def _pv(traj, t):
    """(p, pdot) shape samples from either trajectory flavor."""
    if hasattr(traj, "moduli_sample"):
        _, _, p, pdot = traj.moduli_sample(t)
        return p, pdot
    out = traj.state(t)
    if len(out) == 4:
        return out[2], out[3]
    return out[0], out[1]


def _frame_at(traj, t) -> CurveFrame:
    if hasattr(traj, "moduli_sample"):
        rho, rho1, p, pdot = traj.moduli_sample(t)
    else:
        rho, rho1, p, pdot = traj.state(t)
    pdd, pddd, _ = _invariant_derivs(rho, rho1, p, pdot, traj.masses)
    return frame_from_vectors(t, p, pdot, pdd, pddd, traj.masses)


@dataclass
class Extremum:
    t: float
    lam: float
    kind: str  # "max" | "min"


@dataclass
class MonotonicityReport:
    extrema: list[Extremum]
    violations: list[dict]
    crossings: list[float]
    n_samples: int
    inconclusive: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations and not self.inconclusive


def _sign_roots(f, ts, xtol):
    """Roots of f located by sign changes on the grid ts (brentq-refined)."""
    vals = np.array([f(t) for t in ts])
    out = []
    sgn = np.sign(vals)
    for i in np.flatnonzero(sgn[:-1] * sgn[1:] < 0):
        out.append(float(brentq(f, ts[i], ts[i + 1], xtol=xtol)))
    return out


def monotonicity_report(traj, n: int = 2000, mtol: float = 1e-6,
                        plateau_tol: float = 1e-12,
                        refine_tol: float = 1e-10,
                        max_refine: int = 3) -> MonotonicityReport:
    """Locate m-latitude extrema along a trajectory and check the rule:
    interior maxima lie on the northern closed hemisphere, minima on the
    southern, with exactly one equator crossing between consecutive extrema.

    Near a binary collision the curve whirls and extrema bunch below any
    fixed grid resolution, so arcs whose crossing count disagrees are
    rescanned at increasing density before being reported as violations.
    """
    masses = traj.masses
    ts = np.linspace(traj.t0, traj.t1, n)
    rate0 = np.empty(n)
    for i, t in enumerate(ts):
        p, pdot = _pv(traj, t)
        rate0[i] = m_latitude_rate(p, pdot, masses)[1]
    inconclusive = bool(np.max(np.abs(rate0)) < plateau_tol)

    def rate_of(t):
        p, pdot = _pv(traj, t)
        return m_latitude_rate(p, pdot, masses)[1]

    def lam_of(t):
        p, _ = _pv(traj, t)
        return float(m_latitude(p, masses))

    ext_ts: list[float] = []
    sgn = np.sign(rate0)
    for i in np.flatnonzero(sgn[:-1] * sgn[1:] < 0):
        ext_ts.append(float(brentq(rate_of, ts[i], ts[i + 1],
                                   xtol=refine_tol)))

    def arc_crossings(a, b, m=32):
        return _sign_roots(lam_of, np.linspace(a, b, m), refine_tol)

    bad_arcs: list[tuple[float, float, int]] = []
    arc_cross: dict[tuple[float, float], list[float]] = {}
    rescanned: set[tuple[float, float]] = set()
    for _ in range(max_refine + 1):
        bad_arcs = []
        for a, b in zip(ext_ts[:-1], ext_ts[1:]):
            if (a, b) not in arc_cross:
                arc_cross[(a, b)] = arc_crossings(a, b)
            if len(arc_cross[(a, b)]) != 1:
                bad_arcs.append((a, b, len(arc_cross[(a, b)])))
        added = 0
        for a, b, _k in bad_arcs:
            if (a, b) in rescanned:
                continue
            rescanned.add((a, b))
            dense = np.linspace(a, b, 512)
            for t_new in _sign_roots(rate_of, dense[1:-1], refine_tol):
                if min(abs(t_new - t) for t in ext_ts) > 10 * refine_tol:
                    ext_ts.append(t_new)
                    added += 1
        if not added:
            break
        ext_ts.sort()
    live = set(zip(ext_ts[:-1], ext_ts[1:]))
    arc_cross = {k: v for k, v in arc_cross.items() if k in live}

    extrema: list[Extremum] = []
    violations: list[dict] = []
    for t_star in ext_ts:
        lam_star = lam_of(t_star)
        kind = "max" if rate_of(t_star - refine_tol * 10) > 0 else "min"
        extrema.append(Extremum(t=t_star, lam=lam_star, kind=kind))
        if kind == "max" and lam_star < -mtol:
            violations.append({"kind": "southern_max", "t": t_star,
                               "lam": lam_star})
        if kind == "min" and lam_star > mtol:
            violations.append({"kind": "northern_min", "t": t_star,
                               "lam": lam_star})
    for a, b, k in bad_arcs:
        violations.append({"kind": "crossing_count", "t": (a + b) / 2,
                           "count": k})

    crossings = [c for cs in arc_cross.values() for c in cs]
    if ext_ts:
        crossings += arc_crossings(traj.t0, ext_ts[0])
        crossings += arc_crossings(ext_ts[-1], traj.t1)
    else:
        crossings += arc_crossings(traj.t0, traj.t1)
    return MonotonicityReport(extrema=extrema, violations=violations,
                              crossings=sorted(crossings), n_samples=n,
                              inconclusive=inconclusive)


@dataclass
class SegmentTuple:
    """Initial data determining a fundamental segment up to scaling.

    eps = 0 for eastward motion along the m-latitude circle, 1 westward.
    """

    phi: float
    theta: float
    S0: float
    S1: float
    eps: int

    def as_array(self):
        return np.array([self.phi, self.theta, self.S0, self.S1, self.eps])


def reflect_tuple(tup: SegmentTuple) -> SegmentTuple:
    """Equator reflection: only the colatitude entry flips."""
    return SegmentTuple(math.pi - tup.phi, tup.theta, tup.S0, tup.S1, tup.eps)


def tuple_at(traj, t) -> SegmentTuple:
    """Segment data of the germ of the curve at time t (a latitude extremum)."""
    from .geometry import point_to_angles
    frame = _frame_at(traj, t)
    if not frame.regular:
        raise ArithmeticError("segment endpoint is not a regular point")
    phi, theta = point_to_angles(frame.p)
    e = east_tangent(frame.p, traj.masses)
    eps = 0 if float(frame.tau @ e) > 0.0 else 1
    return SegmentTuple(float(phi), float(theta), frame.S, frame.S_prime, eps)


@dataclass
class FundamentalSegment:
    t_start: float
    t_end: float
    start: SegmentTuple | None
    end: SegmentTuple | None
    theta_image: SegmentTuple | None = field(default=None)


def fundamental_segments(traj, n: int = 2000) -> list[FundamentalSegment]:
    """Split a trajectory at m-latitude extrema into fundamental segments.

    Irregular endpoints (collisions, cusps) yield None tuples; regular ones
    carry the 5-tuple and the equator-reflected image of the end tuple,
    which is the fundamental-correspondence value of the start tuple.
    """
    report = monotonicity_report(traj, n=n)
    out: list[FundamentalSegment] = []
    ts = [e.t for e in report.extrema]
    for a, b in zip(ts[:-1], ts[1:]):
        try:
            start = tuple_at(traj, a)
        except (ArithmeticError, ValueError):
            start = None
        try:
            end = tuple_at(traj, b)
        except (ArithmeticError, ValueError):
            end = None
        image = reflect_tuple(end) if end is not None else None
        out.append(FundamentalSegment(t_start=a, t_end=b, start=start,
                                      end=end, theta_image=image))
    return out


def state_from_tuple(tup: SegmentTuple, masses: MassDistribution,
                     v0: float = 1.0) -> ModuliState:
    """Representative moduli state generating the segment of a 5-tuple.

    The curve germ determines the motion only up to the homothety scaling,
    fixed here by the initial shape speed v0.  The size data follow from
    rho**3 = 4 S0 / v0**2 and S1 = 2 U*_tau - rho**2 v rhodot / 4.
    """
    from .geometry import angles_to_point
    from .potential import shape_gradient
    if tup.S0 <= 0.0:
        raise ValueError("segment tuple requires S0 > 0")
    p = angles_to_point(tup.phi, tup.theta)
    e = east_tangent(p, masses)
    tau = e if tup.eps == 0 else -e
    pdot = v0 * tau
    rho = (4.0 * tup.S0 / v0 ** 2) ** (1.0 / 3.0)
    G = shape_gradient(p, masses)
    U_tau = float(G @ tau)
    rho1 = 4.0 * (2.0 * U_tau - tup.S1) / (rho ** 2 * v0)
    U = float(shape_potential(p, masses))
    h = 0.5 * rho1 ** 2 + rho ** 2 * v0 ** 2 / 8.0 - U / rho
    from .reduced import moduli_state_from_vectors
    return moduli_state_from_vectors(rho, rho1, p, pdot, masses, h=h)


def energy_sign(frames: list[CurveFrame], band: float = 1e-6):
    """Common sign of Delta = (S/2)(4 J**2 + 1) - U*, J = (2 U*_tau - S')/S.

    Delta equals h*rho pointwise, so its sign is the energy sign and must be
    constant along a curve.  Mixed signs beyond the band raise.
    """
    deltas = np.empty(len(frames))
    for i, f in enumerate(frames):
        J = (2.0 * f.U_tau - f.S_prime) / f.S
        deltas[i] = 0.5 * f.S * (4.0 * J * J + 1.0) - f.U
    pos = np.any(deltas > band)
    neg = np.any(deltas < -band)
    if pos and neg:
        raise ArithmeticError("energy sign is not constant along the curve")
    sign = 1 if pos else (-1 if neg else 0)
    return sign, deltas


def spherical_polygon_area(ps) -> float:
    """Signed area of the spherical polygon with vertices ps (N, 3).

    Fan of oriented spherical triangles from an apex near the enclosed
    region (the mean edge normal, so great-circle loops stay nondegenerate),
    each signed excess from the tangent half-angle formula.  Positive for
    counterclockwise circuits seen from outside the sphere; the value is
    meaningful mod 4*pi, the ambiguity of "enclosed" on a sphere.
    """
    ps = np.asarray(ps, dtype=float)
    v1 = ps
    v2 = np.roll(ps, -1, axis=0)
    apex = np.cross(v1, v2).sum(axis=0)
    norm = np.linalg.norm(apex)
    if norm < 1e-12:
        apex = ps.mean(axis=0)
        norm = np.linalg.norm(apex)
        if norm < 1e-12:
            raise ValueError("degenerate polygon: no usable fan apex")
    c = apex / norm
    triple = np.einsum("ij,ij->i", v1, np.cross(v2, c[None, :]))
    den = 1.0 + v1 @ c + np.einsum("ij,ij->i", v1, v2) + v2 @ c
    return float(np.sum(2.0 * np.arctan2(triple, den)))


def closed_curve_rotation(ps, tol: float = 1e-6) -> dict:
    """Rotation angle of the plane frame after one circuit of a closed
    shape curve: half the enclosed signed spherical area."""
    ps = np.asarray(ps, dtype=float)
    gap = float(np.linalg.norm(ps[0] - ps[-1]))
    if gap > tol:
        raise ValueError(f"curve does not close: endpoint gap {gap:.3e}")
    loop = ps if gap == 0.0 else np.vstack([ps, ps[0]])
    area = spherical_polygon_area(loop[:-1])
    return {"area": area, "delta_psi": 0.5 * area, "gap": gap}


def chaoticity(ps, n_z: int = 16, n_theta: int = 32) -> float:
    """Fraction of equal-area sphere cells visited by the sample points."""
    ps = np.asarray(ps, dtype=float)
    z = np.clip(ps[:, 2], -1.0, 1.0)
    th = np.arctan2(ps[:, 1], ps[:, 0])
    iz = np.minimum((0.5 * (z + 1.0) * n_z).astype(int), n_z - 1)
    it = np.minimum(((th + math.pi) / (2.0 * math.pi) * n_theta).astype(int),
                    n_theta - 1)
    return len(set(zip(iz.tolist(), it.tolist()))) / float(n_z * n_theta)
