"""Bohmian trajectory sampling and integration.

Initial conditions are deterministic density quantiles: the cumulative
distribution of rho(t0, x) is tabulated on a fine grid and the n starting
points are its (i - 1/2)/n quantiles.  No random seed is involved, so
figures and tests are exactly reproducible.

Trajectories follow the guidance rule dx^mu/ds proportional to the
conserved current (rho, j).  Integration runs in the affine parameter s
with the unit-normalized tangent

    dt/ds = rho / sqrt(rho^2 + j^2),    dx/ds = j / sqrt(rho^2 + j^2),

which stays regular at destructive-interference fringes where rho -> 0
while the coordinate velocity v = j/rho diverges.  The integrator is
classic fixed-step RK4; the affine step bounds the coordinate advance per
step by construction.
"""

import math
from dataclasses import dataclass

import numpy as np

from .fields import RHO_MIN_REL, classify, current_evaluator, mass_scale, rho_peak
from .model import PhysConfig, SpacetimePoint

# Hard cap on integration steps, as a multiple of the nominal step count;
# exceeding it means the field returned garbage (non-finite loops, etc.).
_STEP_BUDGET_FACTOR = 50

COMPLETED = "completed"
LEFT_WINDOW = "left_window"
NODE_STALL = "node_stall"


@dataclass(frozen=True, slots=True)
class TrajectorySample:
    """State at one accepted integrator step.

    v is the coordinate velocity c^2 j / rho and is +/-inf at samples
    where rho vanishes to within the node threshold.  rho and j are
    carried along so boosted diagnostics never re-evaluate the field.
    """

    s: float
    t: float
    x: float
    v: float
    rho: float
    j: float
    mbar_sq: float
    causal_class: str


@dataclass(frozen=True)
class Trajectory:
    samples: tuple[TrajectorySample, ...]
    termination: str

    def times(self) -> np.ndarray:
        return np.array([smp.t for smp in self.samples])

    def positions(self) -> np.ndarray:
        return np.array([smp.x for smp in self.samples])

    def position_at(self, t: float) -> float:
        """Linear interpolation of x at lab time t (requires monotone t)."""
        ts = self.times()
        if not (ts[0] <= t <= ts[-1]):
            raise ValueError(f"t = {t:g} outside trajectory range [{ts[0]:g}, {ts[-1]:g}]")
        return float(np.interp(t, ts, self.positions()))


@dataclass(frozen=True, slots=True)
class SegmentSummary:
    n_timelike: int
    n_lightlike: int
    n_spacelike: int
    spacelike_runs: tuple[tuple[float, float], ...]


def initial_positions(config: PhysConfig, n: int, t0: float,
                      window: tuple[float, float], grid_points: int = 4096) -> np.ndarray:
    """Quantile starting positions of the density rho(t0, .) over window.

    Builds the trapezoid-rule CDF of rho on a grid_points grid and returns
    the (i - 1/2)/n quantiles, i = 1..n, in increasing order.  Aborts if
    rho is negative anywhere on the start slice (start earlier, where the
    packets do not yet overlap).
    """
    if n < 1:
        raise ValueError(f"need n >= 1 starting points, got {n}")
    lo, hi = window
    if not lo < hi:
        raise ValueError(f"empty window ({lo}, {hi})")
    cur = current_evaluator(config, "exact")
    xs = np.linspace(lo, hi, grid_points)
    rho = np.array([cur(t0, float(x))[0] for x in xs])
    if (rho < 0.0).any():
        worst = xs[int(np.argmin(rho))]
        raise ValueError(
            f"rho(t0={t0:g}) dips to {rho.min():g} near x = {worst:g}; "
            "quantile sampling needs a nonnegative start slice -- start earlier, "
            "where the packets do not overlap")
    cdf = np.concatenate([[0.0], np.cumsum((rho[1:] + rho[:-1]) * np.diff(xs) / 2.0)])
    if cdf[-1] <= 0.0:
        raise ValueError(f"rho(t0={t0:g}) vanishes over the whole window {window}")
    cdf /= cdf[-1]
    quantiles = (np.arange(1, n + 1) - 0.5) / n
    return np.interp(quantiles, cdf, xs)


def affine_step(config: PhysConfig, t0: float, t1: float) -> float:
    """Default affine step: coordinate advance <= min(0.01/sigma, (t1-t0)/100)."""
    return min(0.01 / config.sigma, (t1 - t0) / 100.0)


def integrate(config: PhysConfig, x0: float, t0: float, t1: float,
              ds: float | None = None, window: tuple[float, float] | None = None,
              mode: str = "exact", rho_min_rel: float = RHO_MIN_REL) -> Trajectory:
    """Integrate one trajectory from (t0, x0) until t reaches t1.

    Terminates early with status 'left_window' when x exits the window, or
    'node_stall' when sqrt(rho^2 + j^2) falls below the node threshold
    (the guidance direction is then undefined; stalls are reported, never
    healed).  Every accepted step is recorded as a TrajectorySample.
    """
    if not t0 < t1:
        raise ValueError(f"need t0 < t1, got [{t0}, {t1}]")
    if ds is None:
        ds = affine_step(config, t0, t1)
    if ds <= 0:
        raise ValueError(f"affine step must be > 0, got {ds}")
    cur = current_evaluator(config, mode)
    norm_min = rho_min_rel * rho_peak(config)
    m_scale = mass_scale(config)

    def tangent(t: float, x: float) -> tuple[float, float] | None:
        rho, j = cur(t, x)
        norm = math.hypot(rho, j)
        if norm < norm_min:
            return None
        return rho / norm, j / norm

    def sample(s: float, t: float, x: float) -> TrajectorySample:
        rho, j = cur(t, x)
        if not (math.isfinite(rho) and math.isfinite(j)):
            raise ArithmeticError(f"non-finite current ({rho}, {j}) at (t={t:g}, x={x:g})")
        if abs(rho) < norm_min:
            v = math.inf if j > 0 else (-math.inf if j < 0 else math.nan)
        else:
            v = config.c**2 * j / rho
        mb = rho * rho - j * j
        return TrajectorySample(s=s, t=t, x=x, v=v, rho=rho, j=j,
                                mbar_sq=mb, causal_class=classify(mb, m_scale))

    s, t, x = 0.0, t0, x0
    samples = [sample(s, t, x)]
    termination = NODE_STALL
    budget = _STEP_BUDGET_FACTOR * (int((t1 - t0) / ds) + 1)
    for _ in range(budget):
        k1 = tangent(t, x)
        if k1 is None:
            break
        k2 = tangent(t + 0.5 * ds * k1[0], x + 0.5 * ds * k1[1])
        k3 = tangent(t + 0.5 * ds * k2[0], x + 0.5 * ds * k2[1]) if k2 else None
        k4 = tangent(t + ds * k3[0], x + ds * k3[1]) if k3 else None
        if k4 is None:
            break
        t += ds / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        x += ds / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        s += ds
        samples.append(sample(s, t, x))
        if t >= t1:
            termination = COMPLETED
            break
        if window is not None and not (window[0] <= x <= window[1]):
            termination = LEFT_WINDOW
            break
    else:
        raise ArithmeticError(
            f"step budget ({budget}) exhausted integrating from (t0={t0:g}, x0={x0:g}); "
            "the trajectory is not advancing in lab time")
    return Trajectory(samples=tuple(samples), termination=termination)


def classify_segments(traj: Trajectory) -> SegmentSummary:
    """Aggregate per-sample causal classes; spacelike runs as (s_start, s_end)."""
    if not traj.samples:
        raise ValueError("empty trajectory")
    counts = {"timelike": 0, "lightlike": 0, "spacelike": 0}
    runs = []
    run_start = None
    for smp in traj.samples:
        counts[smp.causal_class] += 1
        if smp.causal_class == "spacelike":
            if run_start is None:
                run_start = smp.s
            run_end = smp.s
        elif run_start is not None:
            runs.append((run_start, run_end))
            run_start = None
    if run_start is not None:
        runs.append((run_start, run_end))
    return SegmentSummary(
        n_timelike=counts["timelike"],
        n_lightlike=counts["lightlike"],
        n_spacelike=counts["spacelike"],
        spacelike_runs=tuple(runs),
    )


def integrate_family(config: PhysConfig, n: int, t0: float, t1: float,
                     window: tuple[float, float], mode: str = "exact",
                     ds: float | None = None) -> list[Trajectory]:
    """Quantile initial conditions + one integrate() per starting point."""
    starts = initial_positions(config, n, t0, window)
    return [integrate(config, float(x0), t0, t1, ds=ds, window=window, mode=mode)
            for x0 in starts]
