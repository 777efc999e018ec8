"""Acceptance suite: the paper-level identities checked at desk scale.

Each criterion function is deterministic given its Generator and returns a
CriterionResult.  run_criteria drives all twelve with independent
deterministic substreams, so a fixed seed reproduces every number bit for
bit (criterion 12 checks exactly that through the CLI).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import analysis, collision, frames, sampling, series
from .geometry import (TriangleState, angles_to_point, mutual_distances,
                       point_to_angles, tangent_basis)
from .masses import normalize_masses
from .newton import diagnostics, diagnostics_along, integrate_newton
from .potential import b_field, critical_points, shape_gradient, \
    shape_potential, southward_frame, psi_profile
from .reduced import (hill_start, integrate_moduli, integrate_shape,
                      moduli_state_from_vectors, shape_state_from_moduli)

__all__ = ["CriterionResult", "run_criteria", "CRITERIA"]


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    metrics: dict
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        keys = ", ".join(f"{k}={_fmt(v)}" for k, v in self.metrics.items())
        return f"[{status}] {self.index:2d} {self.name}: {keys}"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3e}"
    return str(v)


def _masses_cycle(rng, i):
    # mix equal masses with random draws for coverage
    if i % 4 == 0:
        return normalize_masses(1.0, 1.0, 1.0)
    return sampling.random_masses(rng)


def _h_cycle(i):
    return (-1.0, 0.0, 1.0)[i % 3]


def _suite_case(rng, i):
    """(masses, h) for suite slot i.

    Bound slots get equal masses because the h < 0 Newton sampler is the
    perturbed figure-eight family.
    """
    h = _h_cycle(i)
    if h < 0.0:
        return normalize_masses(1.0, 1.0, 1.0), h
    return _masses_cycle(rng, i), h


def _min_separation(traj, n=400):
    ts = np.linspace(traj.t0, traj.t1, n)

    def sep(t):
        rho, _, p, _ = traj.moduli_sample(t)
        return float(min(mutual_distances(p, rho, traj.masses)))

    vals = np.array([sep(t) for t in ts])
    best = float(vals.min())
    # a close pass is much shorter than the grid spacing; refine around the
    # shallowest grid nodes
    for k in np.argsort(vals)[:6]:
        lo = ts[max(0, k - 1)]
        hi = ts[min(n - 1, k + 1)]
        best = min(best, min(sep(t) for t in np.linspace(lo, hi, 40)))
    return best


def _full_newton_run(rng, masses, h, span, max_tries=60, min_sep=0.05, **kw):
    """A zero-momentum run that survives the whole span without events.

    Draws are also rejected when any pair gets closer than min_sep: a
    near-collision blows up the local Lyapunov rate and the two sides of a
    reduction comparison then diverge at integrator noise level no matter
    how the equations are written.
    """
    for _ in range(max_tries):
        if h < 0.0:
            state = sampling.figure_eight_state(rng, masses, h)
        else:
            state = sampling.random_newton_state(rng, masses, h)
        traj = integrate_newton(state, masses, (0.0, span), **kw)
        if traj.event is None and _min_separation(traj) >= min_sep:
            return state, traj
    raise RuntimeError("could not find an event-free run")


def _arc(p, q):
    return math.acos(min(1.0, max(-1.0, float(np.dot(p, q)))))


# ----------------------------------------------------------------- criteria

def c01_conservation(rng, n_runs=20, span=5.0):
    t0 = time.perf_counter()
    drift = omega = lj = 0.0
    for i in range(n_runs):
        masses, h = _suite_case(rng, i)
        state, traj = _full_newton_run(rng, masses, h, span,
                                       rtol=1e-12, atol=1e-13)
        d = diagnostics_along(traj, n=200)
        drift = max(drift, float(np.max(np.abs(d["h"] - h))
                                 / max(1.0, abs(h))))
        omega = max(omega, float(np.max(np.abs(d["Omega"]))))
        lj = max(lj, float(np.nanmax(np.abs(d["lj_residual"]))))
    dt = time.perf_counter() - t0
    passed = drift <= 1e-8 and omega <= 1e-9 and lj <= 1e-6 and dt < 30.0
    return CriterionResult(1, "conservation", passed,
                           {"energy_drift": drift, "omega": omega,
                            "lagrange_jacobi": lj,
                            "within_budget": dt < 30.0}, dt)


def _reduction_suite(rng, n_runs=20, span=3.0):
    """Shared randomized suite: Newton runs plus matched moduli runs."""
    suite = []
    for i in range(n_runs):
        masses, h = _suite_case(rng, i)
        state, ntraj = _full_newton_run(rng, masses, h, span,
                                        rtol=1e-12, atol=1e-13)
        rho, rho1, p, pdot = ntraj.moduli_sample(0.0)
        mstate = moduli_state_from_vectors(rho, rho1, p, pdot, masses, h=h)
        mtraj = integrate_moduli(mstate, masses, (0.0, span),
                                 rtol=1e-12, atol=1e-13)
        suite.append({"masses": masses, "h": h, "newton": ntraj,
                      "moduli": mtraj})
    return suite


def c02_reduction(suite):
    t0 = time.perf_counter()
    worst_rho = worst_arc = 0.0
    for rec in suite:
        ntraj, mtraj = rec["newton"], rec["moduli"]
        t_hi = min(ntraj.t1, mtraj.t1)
        for t in np.linspace(0.0, t_hi, 60):
            rho_n, _, p_n, _ = ntraj.moduli_sample(t)
            rho_m, _, p_m, _ = mtraj.state(t)
            worst_rho = max(worst_rho, abs(rho_n - rho_m))
            worst_arc = max(worst_arc, _arc(p_n, p_m))
    dt = time.perf_counter() - t0
    passed = worst_rho <= 1e-5 and worst_arc <= 1e-5
    return CriterionResult(2, "reduction_equivalence", passed,
                           {"rho_diff": worst_rho, "arc_diff": worst_arc}, dt)


def c03_siegel(suite):
    t0 = time.perf_counter()
    worst_rel = worst_rec = 0.0
    n_used = 0
    for rec in suite:
        mtraj = rec["moduli"]
        ts = np.linspace(mtraj.t0, mtraj.t1, 200)
        fr = frames.trajectory_frames(mtraj, ts)
        ks = np.array([abs(f.Kstar) for f in fr])
        floor = 1e-4 * float(np.median(ks))
        for t, f in zip(ts, fr):
            if abs(f.Kstar) < floor or not (f.S > 0.0):
                continue
            rho, _, _, _ = mtraj.state(t)
            truth = rho ** 3 * f.v ** 2 / 4.0
            worst_rel = max(worst_rel, abs(f.S - truth) / truth)
            rec_rho = frames.reconstruct_rho(f)
            worst_rec = max(worst_rec, abs(rec_rho - rho) / rho)
            n_used += 1
    dt = time.perf_counter() - t0
    passed = worst_rel <= 1e-6 and worst_rec <= 1e-5
    return CriterionResult(3, "siegel_identity", passed,
                           {"siegel_rel": worst_rel, "rho_rel": worst_rec,
                            "samples": n_used}, dt)


def _regular_window(mtraj, window, n_scan=80, k_rel=0.05):
    """Start time of a window where the curve stays regular, or None.

    The intrinsic shape equation degenerates at inflection points, so the
    closure statement only applies to windows where K* keeps its sign and
    stays away from zero.  Fast low-energy orbits circle the sphere in less
    than the window and always contain an inflection; those records are
    skipped.
    """
    for frac in np.arange(0.05, 0.65, 0.05):
        t_star = mtraj.t0 + frac * (mtraj.t1 - mtraj.t0)
        if t_star + window > mtraj.t1:
            return None
        fr = frames.trajectory_frames(
            mtraj, np.linspace(t_star, t_star + window, n_scan))
        ks = np.array([f.Kstar for f in fr])
        if not (np.all(np.isfinite(ks)) and np.all([f.S > 0 for f in fr])):
            continue
        if np.any(np.sign(ks[:-1]) != np.sign(ks[1:])):
            continue
        if np.min(np.abs(ks)) <= k_rel * np.median(np.abs(ks)):
            continue
        return t_star
    return None


def c04_shape_closure(suite, window=1.0):
    t0 = time.perf_counter()
    worst = 0.0
    n_windows = 0
    for rec in suite:
        mtraj = rec["moduli"]
        t_star = _regular_window(mtraj, window)
        if t_star is None:
            continue
        rho, rho1, p, pdot = mtraj.state(t_star)
        mstate = moduli_state_from_vectors(rho, rho1, p, pdot, rec["masses"])
        y0, chart = shape_state_from_moduli(mstate, rec["masses"])
        straj = integrate_shape(y0, rec["masses"], (t_star, t_star + window),
                                chart=chart, rtol=1e-12, atol=1e-13)
        if straj.t1 < t_star + 0.99 * window:
            worst = math.inf
            continue
        for t in np.linspace(t_star, straj.t1, 25):
            p_m = mtraj.state(t)[2]
            p_s = straj.state(t)[0]
            worst = max(worst, _arc(p_m, p_s))
        n_windows += 1
    dt = time.perf_counter() - t0
    passed = worst <= 1e-4 and n_windows >= 3
    return CriterionResult(4, "shape_ode_closure", passed,
                           {"arc_diff": worst, "windows": n_windows}, dt)


def _safe_sample_time(mtraj, sin_min=0.3):
    for frac in (0.35, 0.5, 0.25, 0.65, 0.45):
        t = mtraj.t0 + frac * (mtraj.t1 - mtraj.t0)
        p = mtraj.state(t)[2]
        if math.hypot(p[0], p[1]) >= sin_min:
            return t
    return None


def c05_unique_parametrization(suite):
    t0 = time.perf_counter()
    worst = worst_h0 = worst_curve = 0.0
    n_used = 0
    for rec in suite:
        mtraj, h = rec["moduli"], rec["h"]
        t_star = _safe_sample_time(mtraj)
        if t_star is None:
            continue
        d = series.measure_intrinsics(mtraj, t_star)
        rho, rho1, p, pdot = mtraj.state(t_star)
        v = float(np.linalg.norm(pdot))
        if h != 0.0:
            init = series.initial_data_from_intrinsics(d)
            worst = max(worst, abs(init.rho0 - rho) / rho,
                        abs(init.v0 - v) / v,
                        abs(init.rho1 - rho1) / max(1.0, abs(rho1)))
        else:
            # the measured energy is ~1e-13, never exactly zero; the
            # recovery formula divides by it, so pin the known value
            d = replace(d, h=0.0)
            res = series.h0_constraint_residual(d)
            worst_h0 = max(worst_h0, abs(res) / max(1.0, abs(d.u0)))
            init = series.initial_data_from_intrinsics(d, rho0=rho)
            worst = max(worst, abs(init.v0 - v) / v,
                        abs(init.rho1 - rho1) / max(1.0, abs(rho1)))
        # forward re-integration from the recovered data
        e_p, e_t = tangent_basis(d.phi, d.theta)
        sp = math.sin(d.phi)
        pdir = init.v0 * (d.J_phi * e_p + d.J_theta * sp * e_t)
        st = moduli_state_from_vectors(init.rho0, init.rho1,
                                       angles_to_point(d.phi, d.theta), pdir,
                                       rec["masses"])
        span = min(0.5, mtraj.t1 - t_star)
        rtraj = integrate_moduli(st, rec["masses"], (0.0, span))
        for t in np.linspace(0.0, min(span, rtraj.t1 - rtraj.t0), 12):
            p_true = mtraj.state(t_star + t)[2]
            p_rec = rtraj.state(t)[2]
            worst_curve = max(worst_curve, _arc(p_true, p_rec))
        n_used += 1
    dt = time.perf_counter() - t0
    passed = worst <= 1e-4 and worst_h0 <= 1e-6 and worst_curve <= 1e-4
    return CriterionResult(5, "unique_parametrization", passed,
                           {"recovery_rel": worst, "h0_residual": worst_h0,
                            "reintegration_arc": worst_curve,
                            "samples": n_used}, dt)


def c06_energy_sign(suite):
    t0 = time.perf_counter()
    band_h0 = 0.0
    ok = True
    for rec in suite:
        mtraj, h = rec["moduli"], rec["h"]
        ts = np.linspace(mtraj.t0, mtraj.t1, 120)
        fr = [f for f in frames.trajectory_frames(mtraj, ts)
              if f.S > 0.0 and math.isfinite(f.S_prime)]
        if h == 0.0:
            deltas = analysis.energy_sign(fr, band=math.inf)[1]
            band_h0 = max(band_h0, float(np.max(np.abs(deltas))))
        else:
            sign, _ = analysis.energy_sign(fr, band=1e-6)
            ok = ok and (sign == (1 if h > 0 else -1))
    dt = time.perf_counter() - t0
    passed = ok and band_h0 <= 1e-4
    return CriterionResult(6, "energy_sign", passed,
                           {"signs_ok": ok, "h0_band": band_h0}, dt)


def c07_monotonicity(rng, n_runs=50, span=6.0):
    t0 = time.perf_counter()
    violations = 0
    extrema_total = 0
    alternation_ok = True
    for i in range(n_runs):
        masses = _masses_cycle(rng, i)
        h = _h_cycle(i)
        mstate = sampling.random_moduli_state(rng, masses, h)
        # a coarse r_min ends tight binary whirls instead of grinding
        # through thousands of revolutions below grid resolution
        mtraj = integrate_moduli(mstate, masses, (0.0, span), r_min=2e-3)
        rep = analysis.monotonicity_report(mtraj, n=1200)
        violations += len(rep.violations)
        extrema_total += len(rep.extrema)
        for a, b in zip(rep.extrema[:-1], rep.extrema[1:]):
            if a.kind == b.kind:
                alternation_ok = False
            if abs(a.lam) > 1e-6 and abs(b.lam) > 1e-6 \
                    and a.lam * b.lam > 0.0:
                alternation_ok = False
    dt = time.perf_counter() - t0
    passed = violations == 0 and alternation_ok
    return CriterionResult(7, "m_latitude_monotonicity", passed,
                           {"violations": violations,
                            "extrema": extrema_total,
                            "alternation": alternation_ok}, dt)


def c08_gradient_geometry(rng, n_masses=10, n_points=1000):
    t0 = time.perf_counter()
    worst_46 = worst_psi = worst_413 = 0.0
    positivity_ok = sign_ok = True
    for j in range(n_masses):
        masses = sampling.random_masses(rng) if j else normalize_masses(
            1.0, 1.0, 1.0)
        crit = critical_points(masses)
        p0, p0p = crit.lagrange
        m = masses.m
        for i in range(3):
            jj, kk = (i + 1) % 3, (i + 2) % 3
            target = 2.0 * m[jj] * m[kk] / ((1.0 - m[i]) * masses.mhat)
            for q in (p0, p0p):
                lhs = float(masses.b[i] @ (masses.b[i] - q))
                worst_46 = max(worst_46, abs(lhs - target))
        for _ in range(n_points):
            v = rng.normal(0.0, 1.0, 3)
            p = v / np.linalg.norm(v)
            if min(np.linalg.norm(p - masses.b[i]) for i in range(3)) < 1e-3:
                continue
            if min(np.linalg.norm(p - p0), np.linalg.norm(p - p0p)) < 1e-6:
                continue
            B = b_field(p, masses)
            val = float(B @ (p - p0))
            if val <= 0.0:
                positivity_ok = False
            # reorganized B-field sum; relative to the term scale because
            # the profiles blow up near the binary points
            psi_sum = np.zeros(3)
            scale = 1.0
            for i in range(3):
                xi = float(masses.b[i] @ (p - p0))
                term = psi_profile(xi, i, masses)
                psi_sum += term * masses.b[i]
                scale = max(scale, abs(term))
            worst_psi = max(worst_psi,
                            float(np.linalg.norm(psi_sum - B)) / scale)
            T, _ = southward_frame(p, masses)
            lhs = float(T @ shape_gradient(p, masses))
            rhs = float(p @ (p0 - p0p)) * val
            worst_413 = max(worst_413, abs(lhs - rhs)
                            / max(1.0, abs(rhs)))
            if abs(p[2]) > 1e-6 and np.sign(lhs) != np.sign(p[2]):
                sign_ok = False
    dt = time.perf_counter() - t0
    passed = (worst_46 <= 1e-10 and positivity_ok and sign_ok
              and worst_psi <= 1e-10 and worst_413 <= 1e-10)
    return CriterionResult(8, "gradient_geometry", passed,
                           {"dot_identity": worst_46,
                            "psi_identity": worst_psi,
                            "south_identity": worst_413,
                            "positivity": positivity_ok,
                            "sign_pattern": sign_ok}, dt)


def _collision_run(rng, masses, h=-1.0, eps=1e-3, transversal=0.02):
    state = sampling.ejection_state(rng, masses, h, eps=eps,
                                    transversal=transversal)
    rev = TriangleState(state.positions, -state.velocities)
    return integrate_newton(rev, masses, (0.0, 1.0), rho_min=2e-4,
                            r_min=1e-5)


def c09_collision_asymptotics(rng):
    t0 = time.perf_counter()
    masses = normalize_masses(1.0, 1.0, 1.0)
    # h = 0 ray: numerical 1-D law vs closed form
    tgrid = np.geomspace(1e-3, 1.0, 50)
    ray_a = collision.ray_solution("lagrange", 0.0, tgrid, masses)
    ray_n = collision.ray_solution("lagrange", 0.0, tgrid, masses,
                                   numeric=True)
    ray_rel = float(np.max(np.abs(ray_n.I - ray_a.I) / ray_a.I))

    traj = _collision_run(rng, masses)
    prof = collision.asymptotic_profile(traj)
    r01 = float(np.max(np.abs(prof.R[:, :2] - 1.0)))

    # The size-normalized action S = rho^3 |sigma'|^2 / 4 decays to zero
    # only along true collision branches; a generic near-miss keeps a
    # residual transversal component.  Build the branch through the
    # Lagrange rest point of the magnified flow and sample the final two
    # decades of physical time (u = -log t).  Deeper u is dominated by the
    # quadratic off-manifold error of the linear seed, so stop well short
    # of the integration horizon.
    br = collision.collision_branch(masses, u_back=2.0)
    us = np.linspace(1.0, 1.0 + 2.0 * math.log(10.0), 25)
    Ss = np.array([br.siegel(u) for u in us])
    s_monotone = bool(np.all(np.diff(Ss) < 0.0))
    s_decay = float(Ss[-1] / Ss[0])

    t_mid = traj.t0 + 0.5 * (traj.t1 - traj.t0)
    s0 = prof.t_c - t_mid
    st = traj.state(t_mid)
    expl = TriangleState(st.positions, -st.velocities)
    mag = collision.log_time_integrate(expl, s0, masses,
                                       u_span=math.log(s0 / (prof.t_c
                                                             - traj.t1)))
    rho_hat_end = mag.rho_hat(mag.u1)
    sqrtK = math.sqrt(prof.K)
    rho_hat_rel = abs(rho_hat_end - sqrtK) / sqrtK
    dt = time.perf_counter() - t0
    passed = (ray_rel <= 1e-9 and r01 <= 0.05 and s_monotone
              and s_decay < 0.1 and rho_hat_rel <= 0.02)
    return CriterionResult(9, "collision_asymptotics", passed,
                           {"ray_rel": ray_rel, "R01_dev": r01,
                            "siegel_monotone": s_monotone,
                            "siegel_decay": s_decay,
                            "rho_hat_rel": rho_hat_rel}, dt)


def c10_cusp_curvature(rng, n_points=5, h=-1.0):
    t0 = time.perf_counter()
    masses = sampling.random_masses(rng)
    worst = 0.0
    for _ in range(n_points):
        p = sampling._random_shape_point(rng, masses, b_margin=0.5,
                                         pole_margin=0.35)
        phi, theta = point_to_angles(p)
        cd = series.cusp_data((float(phi), float(theta)), h, 0.0, masses)
        st = hill_start(float(phi), float(theta), masses, h)
        mtraj = integrate_moduli(st, masses, (0.0, 0.35))
        t_hi = min(0.12, mtraj.t1 - mtraj.t0 - 1e-3)
        ts = np.geomspace(0.005, t_hi, 40)
        fr = frames.trajectory_frames(mtraj, ts)
        s = np.concatenate([[0.0], np.cumsum([
            0.5 * (fr[i].v + fr[i + 1].v) * (ts[i + 1] - ts[i])
            for i in range(len(ts) - 1)])])
        ks = np.array([f.Kstar for f in fr])
        # limiting curvature at the cusp: keep the fit local in arc length,
        # otherwise a dive toward a binary collision poisons the window
        keep = s <= 0.2
        if np.count_nonzero(keep) < 8:
            keep = np.zeros_like(keep)
            keep[:8] = True
        coef = np.polyfit(s[keep], ks[keep], 2)
        worst = max(worst, abs(coef[-1] - cd.K0))
    dt = time.perf_counter() - t0
    return CriterionResult(10, "cusp_curvature", worst <= 5e-3,
                           {"K0_dev": worst}, dt)


def c11_rotation_angle(rng):
    t0 = time.perf_counter()
    phi0 = 0.7
    n = 120000
    th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    circle = np.column_stack([np.sin(phi0) * np.cos(th),
                              np.sin(phi0) * np.sin(th),
                              np.full(n, math.cos(phi0))])
    got = analysis.closed_curve_rotation(np.vstack([circle, circle[:1]]))
    want = math.pi * (1.0 - math.cos(phi0))
    cap_err = abs(got["delta_psi"] - want)

    masses = normalize_masses(1.0, 1.0, 1.0)
    state = sampling.ejection_state(rng, masses, -1.0, eps=1e-3,
                                    transversal=0.02)
    traj = integrate_newton(state, masses, (0.0, 0.05), rtol=1e-12,
                            atol=1e-13)
    span = traj.t1 - traj.t0
    t1s = traj.t0 + span * np.geomspace(1.0, 0.01, 6)
    psis = np.array([collision.collision_rotation(traj, t1) for t1 in t1s])
    jitter = 1e-9 * abs(psis[0]) + 1e-12
    mono = bool(np.all(np.diff(np.abs(psis)) < jitter)) \
        and abs(psis[-1]) < 0.2 * abs(psis[0])
    dt = time.perf_counter() - t0
    passed = cap_err <= 1e-8 and mono
    return CriterionResult(11, "rotation_angle", passed,
                           {"cap_err": cap_err, "psi_monotone": mono,
                            "psi_first": float(psis[0]),
                            "psi_last": float(psis[-1])}, dt)


def c12_determinism(seed):
    t0 = time.perf_counter()
    from .cli import verify_payload
    a = verify_payload(seed, fast=True, indices=(8, 9))
    b = verify_payload(seed, fast=True, indices=(8, 9))
    dt = time.perf_counter() - t0
    return CriterionResult(12, "determinism", a == b,
                           {"bytes": len(a), "identical": a == b}, dt)


CRITERIA = [
    "conservation", "reduction_equivalence", "siegel_identity",
    "shape_ode_closure", "unique_parametrization", "energy_sign",
    "m_latitude_monotonicity", "gradient_geometry", "collision_asymptotics",
    "cusp_curvature", "rotation_angle", "determinism",
]


def run_criteria(seed: int = 0, fast: bool = False, indices=None):
    """Run the acceptance criteria; independent substream per criterion."""
    ss = np.random.SeedSequence(seed)
    streams = [np.random.default_rng(s) for s in ss.spawn(16)]
    n_runs = 6 if fast else 20
    n_mono = 10 if fast else 50
    results = []

    def want(i):
        return indices is None or i in indices

    if want(1):
        results.append(c01_conservation(streams[1], n_runs=n_runs))
    suite = None
    if any(want(i) for i in (2, 3, 4, 5, 6)):
        suite = _reduction_suite(streams[2], n_runs=n_runs)
    if want(2):
        results.append(c02_reduction(suite))
    if want(3):
        results.append(c03_siegel(suite))
    if want(4):
        results.append(c04_shape_closure(suite))
    if want(5):
        results.append(c05_unique_parametrization(suite))
    if want(6):
        results.append(c06_energy_sign(suite))
    if want(7):
        results.append(c07_monotonicity(streams[7], n_runs=n_mono))
    if want(8):
        results.append(c08_gradient_geometry(
            streams[8], n_points=200 if fast else 1000))
    if want(9):
        results.append(c09_collision_asymptotics(streams[9]))
    if want(10):
        results.append(c10_cusp_curvature(streams[10],
                                          n_points=2 if fast else 5))
    if want(11):
        results.append(c11_rotation_angle(streams[11]))
    if want(12) and not fast:
        results.append(c12_determinism(seed))
    return results
