"""Acceptance-grade validation checks, shared by the CLI and the test suite.

Every check pits the closed-form pipeline against an independent route
(momentum-space quadrature, spectral weak values, finite differences,
algebraic boost identities) at a pinned tolerance.  The oracle side runs
first; the main pipeline is never validated against itself.  All random
points come from a fixed seed, so the report is byte-reproducible.

Check c02 verifies the wave-identity between the two mass routes with the
mandated stencil and step h: the finite-difference operator is evaluated
at h and h/2 (which also yields the convergence order) and the two-grid
Richardson limit is compared against the spectral mass.  The raw single-h
discrepancy is recorded as a diagnostic; its own truncation floor is
O(h^2 (2 k0)^4), larger than the check tolerance.

Relative errors of squared masses are measured against
max(|m^2|, (hbar k0)^2): a pointwise ratio is meaningless where the mass
crosses zero, and (hbar k0)^2 is the natural squared-mass scale of the
wavepacket family.
"""

import hashlib
import math
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fields
from .dynamics import classify_segments, integrate, initial_positions
from .fields import current_evaluator, mass_scale, mbar_sq, rho_peak
from .model import GridSpec, PhysConfig, SpacetimePoint, validate
from .oracle import (QuadratureSpec, continuity_residual, convergence_check,
                     fd_dalembertian_r_over_r, psi_quadrature, weak_values_spectral)
from .relativity import BoostFrame, boost_trajectory, detect_retropropagation
from .wavepacket import jet_evaluator, peak_amplitude

SEED = 20240811

FIG1_PHYSICS = PhysConfig(k0=10.0, sigma=1.0, alpha=0.83)
FIG1_THETA = 0.4


@dataclass
class CheckResult:
    criterion: str
    passed: bool
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"criterion": self.criterion, "passed": self.passed, "details": self.details}


def _filtered_points(config: PhysConfig, rng, n: int, box: float,
                     min_psi4_rel: float = 0.0) -> list[SpacetimePoint]:
    """n seeded random points in [-box, box]^2, optionally above a |psi|^4 cut."""
    jet = jet_evaluator(config)
    cut = min_psi4_rel * peak_amplitude(config) ** 4
    pts = []
    while len(pts) < n:
        p = SpacetimePoint(float(rng.uniform(-box, box)), float(rng.uniform(-box, box)))
        if min_psi4_rel == 0.0 or abs(jet(p.t, p.x)[0]) ** 4 > cut:
            pts.append(p)
    return pts


def check_closed_form_vs_quadrature(config: PhysConfig, n_side: int = 41) -> CheckResult:
    """c01: |psi_closed - psi_quadrature| < 1e-8 max|psi| on the window grid."""
    sigma = config.sigma
    jet = jet_evaluator(config)
    spec = QuadratureSpec(abs_tol=1e-10)
    max_abs_psi = 0.0
    max_err = 0.0
    for t in np.linspace(-3.0 / sigma, 3.0 / sigma, n_side):
        for x in np.linspace(-3.0 / sigma, 3.0 / sigma, n_side):
            closed = jet(float(t), float(x))[0]
            quadd = psi_quadrature(config, SpacetimePoint(float(t), float(x)), spec).c
            max_abs_psi = max(max_abs_psi, abs(closed))
            max_err = max(max_err, abs(closed - quadd))
    return CheckResult(
        "c01_closed_form_vs_quadrature",
        passed=max_err < 1e-8 * max_abs_psi,
        details={"grid": f"{n_side}x{n_side}", "max_err": max_err,
                 "bound": 1e-8 * max_abs_psi},
    )


def check_mass_theorem(config: PhysConfig, n_points: int = 50) -> CheckResult:
    """c02: spectral local mass^2 equals the -box R / R operator on the
    quadrature amplitude (h = 1e-3/sigma, two-grid limit), rel < 1e-4;
    FD order 2.0 +/- 0.5 per point."""
    rng = np.random.default_rng(SEED)
    pts = _filtered_points(config, rng, n_points, 2.0 / config.sigma, min_psi4_rel=1e-3)
    h = 1e-3 / config.sigma
    spec_r = QuadratureSpec(abs_tol=1e-11)
    m2_floor = (config.hbar * config.k0) ** 2

    def r_quad(q: SpacetimePoint) -> float:
        return psi_quadrature(config, q, spec_r).amplitude

    rel_limit = []
    rel_raw = []
    orders = []
    for p in pts:
        wv = weak_values_spectral(config, p)
        m2 = wv.H_w.real**2 - config.c**2 * wv.p_w.real**2
        f_h = fd_dalembertian_r_over_r(r_quad, p, h)
        f_h2 = fd_dalembertian_r_over_r(r_quad, p, h / 2.0)
        limit = (4.0 * f_h2 - f_h) / 3.0
        floor = max(abs(m2), m2_floor)
        rel_limit.append(abs(limit - m2) / floor)
        rel_raw.append(abs(f_h - m2) / floor)
        orders.append(math.log2(abs(f_h - m2) / abs(f_h2 - m2)))
    orders_ok = all(1.5 <= o <= 2.5 for o in orders)
    return CheckResult(
        "c02_mass_theorem",
        passed=max(rel_limit) < 1e-4 and orders_ok,
        details={"n_points": n_points, "h": h,
                 "max_rel_err_two_grid_limit": max(rel_limit),
                 "max_rel_err_raw_h": max(rel_raw),
                 "order_min": min(orders), "order_max": max(orders)},
    )


def check_continuity_order(config: PhysConfig, n_points: int = 50) -> CheckResult:
    """c03: exact-mode d_t rho + d_x j converges to 0 at order 2.0 +/- 0.5."""
    rng = np.random.default_rng(SEED + 1)
    pts = _filtered_points(config, rng, n_points, 1.5 / config.sigma)
    h = 1e-3 / config.sigma
    orders = []
    for p in pts:
        rep = convergence_check(lambda q, hh: continuity_residual(config, q, hh, "exact"), p, h)
        orders.append(rep.estimated_order)
    return CheckResult(
        "c03_continuity_order",
        passed=all(1.5 <= o <= 2.5 for o in orders),
        details={"n_points": n_points, "h": h,
                 "order_min": min(orders), "order_max": max(orders)},
    )


def check_lorentz_invariance(config: PhysConfig, theta: float = FIG1_THETA,
                             n_side: int = 101) -> CheckResult:
    """c04: mbar^2 invariance under the two-vector boost and the velocity
    addition ratio identity, both to 1e-12."""
    cur = current_evaluator(config, "exact")
    g = 1.0 / math.sqrt(1.0 - theta * theta)
    scale = mass_scale(config)
    peak = rho_peak(config)
    sigma = config.sigma
    max_dm = 0.0
    max_dv = 0.0
    for t in np.linspace(-3.0 / sigma, 3.0 / sigma, n_side):
        for x in np.linspace(-3.0 / sigma, 3.0 / sigma, n_side):
            rho, j = cur(float(t), float(x))
            rho_p = g * (rho - theta * j)
            j_p = g * (j - theta * rho)
            max_dm = max(max_dm, abs((rho_p**2 - j_p**2) - (rho**2 - j**2)))
            if abs(rho) >= fields.RHO_MIN_REL * peak and abs(rho_p) > 1e-10:
                v = j / rho
                v_p = (v - theta) / (1.0 - v * theta)
                max_dv = max(max_dv, abs(v_p - j_p / rho_p))
    return CheckResult(
        "c04_lorentz_invariance",
        passed=max_dm < 1e-12 * scale and max_dv < 1e-12,
        details={"theta": theta, "grid": f"{n_side}x{n_side}",
                 "max_mbar_sq_deviation": max_dm, "mbar_bound": 1e-12 * scale,
                 "max_velocity_identity_deviation": max_dv},
    )


def check_limits(config: PhysConfig, n_side: int = 101, far_side: int = 121) -> CheckResult:
    """c05: mbar^2 vanishes for alpha in {0, 1} everywhere, and outside the
    interference region (min(|t-x|, |t+x|) sigma > 6) for the given alpha."""
    sigma = config.sigma
    scale = mass_scale(config)
    worst_pure = 0.0
    for alpha in (0.0, 1.0):
        pure = PhysConfig(k0=config.k0, sigma=sigma, alpha=alpha)
        for mode in ("exact", "printed"):
            for t in np.linspace(-3.0 / sigma, 3.0 / sigma, n_side):
                for x in np.linspace(-3.0 / sigma, 3.0 / sigma, n_side):
                    m = mbar_sq(pure, SpacetimePoint(float(t), float(x)), mode).mbar_sq
                    worst_pure = max(worst_pure, abs(m))
    worst_far = 0.0
    n_far = 0
    for mode in ("exact", "printed"):
        for t in np.linspace(-9.0 / sigma, 9.0 / sigma, far_side):
            for x in np.linspace(-9.0 / sigma, 9.0 / sigma, far_side):
                if min(abs(t - x), abs(t + x)) * sigma > 6.0:
                    n_far += 1
                    m = mbar_sq(config, SpacetimePoint(float(t), float(x)), mode).mbar_sq
                    worst_far = max(worst_far, abs(m))
    return CheckResult(
        "c05_limits",
        passed=worst_pure < 1e-14 * scale and worst_far < 1e-12 * scale,
        details={"max_abs_mbar_sq_alpha01": worst_pure, "bound_alpha01": 1e-14 * scale,
                 "max_abs_mbar_sq_far": worst_far, "bound_far": 1e-12 * scale,
                 "n_far_points": n_far},
    )


def check_causal_sign(config: PhysConfig, n_side: int = 101,
                      require_points: int = 10**4) -> CheckResult:
    """c06: sign(mbar^2) == sign(1 - v^2/c^2) at every non-node grid point."""
    cur = current_evaluator(config, "exact")
    peak = rho_peak(config)
    sigma = config.sigma
    n_checked = 0
    mismatches = 0
    for t in np.linspace(-3.0 / sigma, 3.0 / sigma, n_side):
        for x in np.linspace(-3.0 / sigma, 3.0 / sigma, n_side):
            rho, j = cur(float(t), float(x))
            if abs(rho) < fields.RHO_MIN_REL * peak:
                continue
            n_checked += 1
            v = config.c**2 * j / rho
            s_m = (rho * rho - j * j > 0) - (rho * rho - j * j < 0)
            one_m_v2 = 1.0 - (v / config.c) ** 2
            s_v = (one_m_v2 > 0) - (one_m_v2 < 0)
            if s_m != s_v:
                mismatches += 1
    return CheckResult(
        "c06_causal_sign",
        passed=mismatches == 0 and n_checked >= min(require_points, n_side * n_side),
        details={"n_checked": n_checked, "mismatches": mismatches},
    )


def fig1_trajectories(config: PhysConfig, grid: GridSpec, n_traj: int, t0: float):
    """The reference trajectory family: quantile starts at t0, integrated to
    just past the window top so interpolation at t_max stays interior."""
    window = (grid.x_min, grid.x_max)
    t1 = grid.t_max + 0.2 / config.sigma
    starts = initial_positions(config, n_traj, t0, window)
    return [integrate(config, float(x0), t0, t1, window=window) for x0 in starts]


def check_fig1(config: PhysConfig, grid: GridSpec, n_traj: int = 100,
               t0: float | None = None, trajectories=None) -> CheckResult:
    """c07: interference window shows both mass signs; the trajectory family
    has a spacelike run, follows the density, and never crosses."""
    sigma = config.sigma
    if t0 is None:
        t0 = -2.0 / sigma
    if trajectories is None:
        trajectories = fig1_trajectories(config, grid, n_traj, t0)
    cur = current_evaluator(config, "exact")

    # (a) both causal signs present inside the interference zone
    scale = mass_scale(config)
    n_pos = n_neg = 0
    for t in np.linspace(-1.5 / sigma, 1.5 / sigma, 101):
        for x in np.linspace(-1.5 / sigma, 1.5 / sigma, 101):
            rho, j = cur(float(t), float(x))
            m = rho * rho - j * j
            if m > fields.EPS_LIGHT * scale:
                n_pos += 1
            elif m < -fields.EPS_LIGHT * scale:
                n_neg += 1
    both_signs = n_pos > 0 and n_neg > 0

    # (b) at least one spacelike run
    spacelike = sum(1 for tr in trajectories if classify_segments(tr).n_spacelike > 0)

    # (c) endpoint histogram correlates with the density at t = +2/sigma
    t_slice = 2.0 / sigma
    ends = []
    for tr in trajectories:
        ts = tr.times()
        if ts[-1] >= t_slice >= ts[0]:
            ends.append(tr.position_at(t_slice))
    hist, edges = np.histogram(ends, bins=32, range=(grid.x_min, grid.x_max))
    centers = 0.5 * (edges[1:] + edges[:-1])
    dens = np.array([cur(t_slice, float(c))[0] for c in centers])
    corr = float(np.corrcoef(hist, dens)[0, 1])

    # (d) pairwise ordering preserved at common times
    t_common = np.linspace(t0, t_slice, 81)
    interp = []
    for tr in trajectories:
        ts, xs = tr.times(), tr.positions()
        interp.append(np.interp(t_common, ts, xs, left=np.nan, right=np.nan))
    crossings = 0
    for a, b in zip(interp, interp[1:]):
        m = ~np.isnan(a) & ~np.isnan(b)
        if m.any() and not (a[m] < b[m]).all():
            crossings += 1

    return CheckResult(
        "c07_fig1_reproduction",
        passed=both_signs and spacelike >= 1 and corr > 0.9 and crossings == 0,
        details={"n_traj": len(trajectories), "t0": t0,
                 "mass_pos_cells": n_pos, "mass_neg_cells": n_neg,
                 "trajs_with_spacelike_run": spacelike,
                 "density_correlation": corr, "crossing_pairs": crossings},
    )


def check_fig2(config: PhysConfig, grid: GridSpec, theta: float = FIG1_THETA,
               n_traj: int = 100, t0: float | None = None, trajectories=None) -> CheckResult:
    """c08: boosted trajectories retropropagate exactly where rho' < 0 and
    mbar^2 < 0, and boosting by theta then -theta is the identity."""
    if t0 is None:
        t0 = -2.0 / config.sigma
    if trajectories is None:
        trajectories = fig1_trajectories(config, grid, n_traj, t0)
    frame = BoostFrame(theta)
    back = BoostFrame(-theta)
    n_intervals = 0
    consistent = True
    max_restore = 0.0
    for tr in trajectories:
        boosted = boost_trajectory(frame, tr)
        for iv in detect_retropropagation(frame, boosted):
            n_intervals += 1
            if not (iv.min_rho_boosted < 0.0 and iv.max_mbar_sq < 0.0):
                consistent = False
            in_run = [s for s in boosted.samples if iv.s_start <= s.s <= iv.s_end]
            if any(s.rho >= 0.0 or s.mbar_sq >= 0.0 for s in in_run):
                consistent = False
        restored = boost_trajectory(back, boosted)
        for orig, rest in zip(tr.samples, restored.samples):
            for a, b in ((orig.t, rest.t), (orig.x, rest.x), (orig.rho, rest.rho),
                         (orig.j, rest.j)):
                max_restore = max(max_restore, abs(a - b))
            if math.isfinite(orig.v):
                max_restore = max(max_restore, abs(orig.v - rest.v) / max(1.0, abs(orig.v)))
    return CheckResult(
        "c08_fig2_boost",
        passed=n_intervals > 0 and consistent and max_restore < 1e-12,
        details={"theta": theta, "retro_intervals": n_intervals,
                 "all_intervals_rho_and_mass_negative": consistent,
                 "max_composition_deviation": max_restore},
    )


def check_determinism(config: PhysConfig, grid: GridSpec, n_traj: int,
                      t0: float) -> CheckResult:
    """c09: repeated field + trajectories CLI runs are byte-identical."""
    import json

    from . import cli

    def run_once(out_dir: Path, cfg_path: Path) -> dict[str, str]:
        rc = cli.main(["field", "--config", str(cfg_path), "--out", str(out_dir)])
        rc |= cli.main(["trajectories", "--config", str(cfg_path), "--out", str(out_dir)])
        if rc != 0:
            raise RuntimeError(f"CLI run failed with exit code {rc}")
        return {name: hashlib.sha256((out_dir / name).read_bytes()).hexdigest()
                for name in ("field.csv", "traj.csv", "meta.json")}

    with tempfile.TemporaryDirectory() as tmp:
        tmp_path = Path(tmp)
        out_dir = tmp_path / "out"
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps({
            "physics": {"k0": config.k0, "sigma": config.sigma, "alpha": config.alpha},
            "grid": {"t_min": grid.t_min, "t_max": grid.t_max, "x_min": grid.x_min,
                     "x_max": grid.x_max, "nt": grid.nt, "nx": grid.nx},
            "n_traj": n_traj, "t0": t0, "output_dir": str(out_dir),
        }))
        first = run_once(out_dir, cfg_path)
        second = run_once(out_dir, cfg_path)
    identical = first == second
    return CheckResult(
        "c09_determinism",
        passed=identical,
        details={"files": sorted(first), "identical": identical},
    )


def printed_vs_exact_discrepancy(config: PhysConfig, n_side: int = 201) -> dict:
    """Sup-norm relative discrepancy of rho and mbar^2 between the printed
    and exact modes over the figure window (the pointwise ratio is
    meaningless at the zeros of mbar^2)."""
    cur_e = current_evaluator(config, "exact")
    cur_p = current_evaluator(config, "printed")
    sigma = config.sigma
    sup_rho = sup_rho_diff = 0.0
    sup_mb = sup_mb_diff = 0.0
    for t in np.linspace(-3.0 / sigma, 3.0 / sigma, n_side):
        for x in np.linspace(-3.0 / sigma, 3.0 / sigma, n_side):
            p = SpacetimePoint(float(t), float(x))
            rho_e, j_e = cur_e(p.t, p.x)
            rho_p, _ = cur_p(p.t, p.x)
            mb_e = rho_e * rho_e - j_e * j_e
            mb_p = mbar_sq(config, p, "printed").mbar_sq
            sup_rho = max(sup_rho, abs(rho_e))
            sup_rho_diff = max(sup_rho_diff, abs(rho_e - rho_p))
            sup_mb = max(sup_mb, abs(mb_e))
            sup_mb_diff = max(sup_mb_diff, abs(mb_e - mb_p))
    return {"grid": f"{n_side}x{n_side}",
            "rho_rel_discrepancy": sup_rho_diff / sup_rho,
            "mbar_sq_rel_discrepancy": sup_mb_diff / sup_mb}


def check_printed_vs_exact(config: PhysConfig, n_side: int = 201) -> CheckResult:
    """c10: the printed-formula mode stays within 15% (sup norm) of exact."""
    d = printed_vs_exact_discrepancy(config, n_side)
    worst = max(d["rho_rel_discrepancy"], d["mbar_sq_rel_discrepancy"])
    return CheckResult("c10_printed_vs_exact", passed=worst < 0.15, details=d)


def printed_continuity_diagnostic(config: PhysConfig) -> dict:
    """Printed-mode continuity residual at h and h/2: plateaus at the level
    of the dimensionally inconsistent printed cross term instead of
    converging.  Recorded, never asserted."""
    p = SpacetimePoint(0.4 / config.sigma, 0.3 / config.sigma)
    h = 1e-3 / config.sigma
    rep = convergence_check(lambda q, hh: continuity_residual(config, q, hh, "printed"), p, h)
    return {"point": [p.t, p.x], "h": h, "residual_h": rep.err_coarse,
            "residual_h_over_2": rep.err_fine, "estimated_order": rep.estimated_order}


def run_validation(physics: PhysConfig, grid: GridSpec, n_traj: int = 100,
                   t0: float | None = None, level: str = "full") -> dict:
    """Run the full acceptance suite and return a JSON-ready report."""
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    physics = validate(physics)
    if t0 is None:
        t0 = -2.0 / physics.sigma
    quick = level == "quick"

    trajectories = fig1_trajectories(physics, grid, 20 if quick else max(n_traj, 1), t0)
    checks = [
        check_closed_form_vs_quadrature(physics, n_side=15 if quick else 41),
        check_mass_theorem(physics, n_points=10 if quick else 50),
        check_continuity_order(physics, n_points=10 if quick else 50),
        check_lorentz_invariance(physics, n_side=41 if quick else 101),
        check_limits(physics, n_side=41 if quick else 101, far_side=61 if quick else 121),
        check_causal_sign(physics, n_side=51 if quick else 101,
                          require_points=2000 if quick else 10**4),
        check_fig1(physics, grid, t0=t0, trajectories=trajectories),
        check_fig2(physics, grid, t0=t0, trajectories=trajectories),
        check_determinism(
            physics,
            GridSpec(grid.t_min, grid.t_max, grid.x_min, grid.x_max,
                     min(grid.nt, 64), min(grid.nx, 64)) if quick else grid,
            n_traj=20 if quick else n_traj, t0=t0),
        check_printed_vs_exact(physics, n_side=81 if quick else 201),
    ]
    return {
        "level": level,
        "physics": {"k0": physics.k0, "sigma": physics.sigma, "alpha": physics.alpha,
                    "hbar": physics.hbar, "c": physics.c},
        "grid": {"t_min": grid.t_min, "t_max": grid.t_max, "x_min": grid.x_min,
                 "x_max": grid.x_max, "nt": grid.nt, "nx": grid.nx},
        "optics_ratio": physics.optics_ratio,
        "optics_warning": physics.optics_warning,
        "all_passed": all(c.passed for c in checks),
        "checks": [c.as_dict() for c in checks],
        "diagnostics": {
            "printed_continuity": printed_continuity_diagnostic(physics),
        },
    }
