"""Lorentz boosts of events, velocities, currents, and whole trajectories.

A boost with velocity theta (|theta| < 1, units of c) maps

    t' = gamma (t - theta x),        x' = gamma (x - theta t),
    v' = (v - theta) / (1 - v theta / c^2),
    rho' = gamma (rho - theta j),    j' = gamma (j - theta rho).

rho and j form a two-vector, so mbar^2 = rho^2 - j^2 is boost invariant.
Trajectories are boosted pointwise from their lab-frame solutions;
velocity addition plus the scalar-field covariance of psi guarantees this
equals re-integrating in the primed frame, and it avoids stepping through
the infinite-coordinate-velocity points where 1 - v theta/c^2 = 0.

In the primed frame the lab-forward tangent dt'/ds has the sign of rho',
so a trajectory retropropagates (points into the past lightcone) exactly
where the boosted density is negative; those segments are necessarily
spacelike (mbar^2 < 0).
"""

import math
from dataclasses import dataclass, field

from .fields import CurrentSample
from .model import ConfigError, PhysConfig, SpacetimePoint
from .dynamics import Trajectory, TrajectorySample
from .wavepacket import jet_evaluator


@dataclass(frozen=True, slots=True)
class BoostFrame:
    """Boost velocity theta with derived Lorentz factor gamma."""

    theta: float
    gamma: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.theta) and abs(self.theta) < 1.0):
            raise ConfigError(f"boost velocity must satisfy |theta| < 1, got {self.theta}")
        object.__setattr__(self, "gamma", 1.0 / math.sqrt(1.0 - self.theta * self.theta))


@dataclass(frozen=True, slots=True)
class RetroInterval:
    """A maximal run of backwards-in-time samples, with diagnostics.

    min_rho_boosted / min_rho_lab are the extreme primed and lab-frame
    densities over the run; max_mbar_sq certifies the run is spacelike.
    """

    s_start: float
    s_end: float
    min_rho_boosted: float
    max_mbar_sq: float
    min_rho_lab: float


def boost_point(frame: BoostFrame, p: SpacetimePoint) -> SpacetimePoint:
    g, th = frame.gamma, frame.theta
    return SpacetimePoint(t=g * (p.t - th * p.x), x=g * (p.x - th * p.t))


def boost_velocity(frame: BoostFrame, v: float, c: float = 1.0) -> float:
    """Relativistic velocity addition; v may exceed c.

    Returns a signed infinity when the denominator vanishes (v = c^2/theta,
    a vertical tangent in the boosted diagram), and maps an already
    infinite v to its finite limit -c^2/theta.
    """
    if math.isinf(v):
        return -(c * c) / frame.theta
    num = v - frame.theta
    den = 1.0 - v * frame.theta / (c * c)
    if den == 0.0:
        return math.copysign(math.inf, num)
    return num / den


def boost_current(frame: BoostFrame, cs: CurrentSample) -> CurrentSample:
    """Two-vector boost of (rho, j); printed-mode samples are frame-bound."""
    if cs.mode != "exact":
        raise ValueError("only exact-mode currents transform as a two-vector; "
                         f"got mode {cs.mode!r}")
    g, th = frame.gamma, frame.theta
    return CurrentSample(rho=g * (cs.rho - th * cs.j), j=g * (cs.j - th * cs.rho), mode=cs.mode)


def boost_trajectory(frame: BoostFrame, traj: Trajectory) -> Trajectory:
    """Map every sample to the primed frame, keeping s-ordering.

    Coordinates and currents are boosted, v is recomputed by velocity
    addition (or flagged infinite), and the invariants mbar_sq and
    causal_class are carried over unchanged.  t' need not be monotone.
    """
    g, th = frame.gamma, frame.theta
    out = []
    for smp in traj.samples:
        out.append(TrajectorySample(
            s=smp.s,
            t=g * (smp.t - th * smp.x),
            x=g * (smp.x - th * smp.t),
            v=boost_velocity(frame, smp.v),
            rho=g * (smp.rho - th * smp.j),
            j=g * (smp.j - th * smp.rho),
            mbar_sq=smp.mbar_sq,
            causal_class=smp.causal_class,
        ))
    return Trajectory(samples=tuple(out), termination=traj.termination)


def detect_retropropagation(frame: BoostFrame, boosted: Trajectory) -> list[RetroInterval]:
    """Maximal s-intervals of a boosted trajectory where dt'/ds < 0.

    The tangent is proportional to the current, so dt'/ds < 0 is exactly
    rho' < 0 at the sample.  Both the primed and the reconstructed lab
    densities are recorded per interval.
    """
    g, th = frame.gamma, frame.theta
    intervals = []
    run = None  # [s_start, s_end, min rho', max mbar^2, min lab rho]
    for smp in boosted.samples:
        # Invert the two-vector boost to recover the lab density.
        rho_lab = g * (smp.rho + th * smp.j)
        if smp.rho < 0.0:
            if run is None:
                run = [smp.s, smp.s, smp.rho, smp.mbar_sq, rho_lab]
            else:
                run[1] = smp.s
                run[2] = min(run[2], smp.rho)
                run[3] = max(run[3], smp.mbar_sq)
                run[4] = min(run[4], rho_lab)
        elif run is not None:
            intervals.append(RetroInterval(*run))
            run = None
    if run is not None:
        intervals.append(RetroInterval(*run))
    return intervals


def current_in_boosted_frame(config: PhysConfig, frame: BoostFrame,
                             p_prime: SpacetimePoint) -> CurrentSample:
    """Currents at a primed-frame event, evaluated directly from the field.

    psi is a scalar: psi'(t', x') = psi(t, x) at the inverse-mapped event,
    and the primed derivatives follow by the chain rule
    d_t' = gamma (d_t + theta d_x), d_x' = gamma (d_x + theta d_t).  Used
    to cross-check the algebraic two-vector boost of (rho, j).
    """
    g, th = frame.gamma, frame.theta
    t = g * (p_prime.t + th * p_prime.x)
    x = g * (p_prime.x + th * p_prime.t)
    psi, d_t, d_x = jet_evaluator(config)(t, x)
    d_tp = g * (d_t + th * d_x)
    d_xp = g * (d_x + th * d_t)
    rho = (psi * d_tp.conjugate()).imag / config.k0
    j = (psi.conjugate() * d_xp).imag / config.k0
    return CurrentSample(rho=rho, j=j, mode="exact")
