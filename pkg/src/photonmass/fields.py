"""Conserved current, Bohmian velocity, effective-mass density, and causal class.

Two evaluation modes are provided everywhere:

* ``exact``   -- built from the analytic jet of psi.  With the convention
  rho = Im(psi d_t psi*) / k0 and j = Im(psi* d_x psi) / k0 a pure
  right-mover gives rho = j = beta_R^2 exactly (the 1/k0 removes the
  plane-wave energy factor so the densities match the envelope scale).
* ``printed`` -- the closed interference formulas

      rho = beta_R^2 + beta_L^2 + 2 beta_R beta_L T0,
      j   = beta_R^2 - beta_L^2 + 2 beta_R beta_L S0,
      S0  = (2 sigma^2 / k0)   sin(2 k0 x),
      T0  = cos(2 k0 x) - (2 sigma^2 x / k0) sin(2 k0 x),

  evaluated verbatim, plus the matching three-term effective-mass density.
  The S0 cross term is kept exactly as displayed even though it is
  dimensionally inconsistent (exact differentiation of psi produces a
  factor 2 sigma^2 t / k0 instead of 2 sigma^2 / k0); the two modes are
  meant to be compared, and ``exact`` is authoritative.

The effective-mass density mbar^2 = rho^2 - j^2 is a Lorentz invariant;
its sign classifies the local trajectory tangent (timelike / lightlike /
spacelike).  meff^2 = mbar^2 / |psi|^4 and the physical local mass
obeys m_local^2 c^4 = (hbar k0)^2 meff^2.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal

from .model import NodeError, PhysConfig, SpacetimePoint
from .wavepacket import jet_evaluator, peak_amplitude

Mode = Literal["exact", "printed"]

# Classification threshold, in units of the squared density scale.
EPS_LIGHT = 1e-12
# Velocity / guidance node threshold, relative to the peak density.
RHO_MIN_REL = 1e-14
# meff is flagged unreliable when |psi|^4 drops below this times its peak.
PSI4_RELIABLE_REL = 1e-12

TIMELIKE = "timelike"
LIGHTLIKE = "lightlike"
SPACELIKE = "spacelike"


@dataclass(frozen=True, slots=True)
class Envelopes:
    beta_R_sq: float
    beta_L_sq: float


@dataclass(frozen=True, slots=True)
class InterferenceFactors:
    s0: float
    t0: float


@dataclass(frozen=True, slots=True)
class CurrentSample:
    rho: float
    j: float
    mode: str


@dataclass(frozen=True, slots=True)
class MassSample:
    mbar_sq: float
    meff_sq: float
    m_local_sq_physical: float
    causal_class: str
    reliable: bool


def _check_mode(mode: str) -> None:
    if mode not in ("exact", "printed"):
        raise ValueError(f"mode must be 'exact' or 'printed', got {mode!r}")


def density_scale(config: PhysConfig) -> float:
    """sqrt(2/pi) sigma, the peak single-packet density."""
    return math.sqrt(2.0 / math.pi) * config.sigma


def mass_scale(config: PhysConfig) -> float:
    """(sqrt(2/pi) sigma)^2, the natural scale of mbar^2."""
    return density_scale(config) ** 2


def rho_peak(config: PhysConfig) -> float:
    """Peak of rho over spacetime: (beta_R + beta_L)^2 at the origin."""
    return (math.sqrt(config.alpha) + math.sqrt(1.0 - config.alpha)) ** 2 * density_scale(config)


def envelopes(config: PhysConfig, p: SpacetimePoint) -> Envelopes:
    """The two Gaussian envelope intensities beta_R^2, beta_L^2."""
    s2 = config.sigma**2
    scale = density_scale(config)
    return Envelopes(
        beta_R_sq=config.alpha * scale * math.exp(-2.0 * (p.t - p.x) ** 2 * s2),
        beta_L_sq=(1.0 - config.alpha) * scale * math.exp(-2.0 * (p.t + p.x) ** 2 * s2),
    )


def interference_factors(config: PhysConfig, x: float) -> InterferenceFactors:
    """The oscillatory cross-term factors S0(x), T0(x) of the printed forms."""
    s2 = config.sigma**2
    k0 = config.k0
    return InterferenceFactors(
        s0=(2.0 * s2 / k0) * math.sin(2.0 * k0 * x),
        t0=math.cos(2.0 * k0 * x) - (2.0 * s2 * x / k0) * math.sin(2.0 * k0 * x),
    )


@lru_cache(maxsize=64)
def current_evaluator(config: PhysConfig, mode: str = "exact") -> Callable[[float, float], tuple[float, float]]:
    """Fast (t, x) -> (rho, j) closure for the requested mode."""
    _check_mode(mode)
    if mode == "exact":
        jet = jet_evaluator(config)
        k0 = config.k0

        def cur(t: float, x: float) -> tuple[float, float]:
            psi, d_t, d_x = jet(t, x)
            rho = (psi * d_t.conjugate()).imag / k0
            j = (psi.conjugate() * d_x).imag / k0
            return rho, j

    else:
        s2 = config.sigma**2
        k0 = config.k0
        scale = density_scale(config)
        ar = config.alpha * scale
        al = (1.0 - config.alpha) * scale

        def cur(t: float, x: float) -> tuple[float, float]:
            br2 = ar * math.exp(-2.0 * (t - x) ** 2 * s2)
            bl2 = al * math.exp(-2.0 * (t + x) ** 2 * s2)
            cross = 2.0 * math.sqrt(br2 * bl2)
            sin2 = math.sin(2.0 * k0 * x)
            s0 = (2.0 * s2 / k0) * sin2
            t0 = math.cos(2.0 * k0 * x) - (2.0 * s2 * x / k0) * sin2
            return br2 + bl2 + cross * t0, br2 - bl2 + cross * s0

    return cur


def current(config: PhysConfig, p: SpacetimePoint, mode: Mode = "exact") -> CurrentSample:
    """Conserved density rho and current j at p."""
    rho, j = current_evaluator(config, mode)(p.t, p.x)
    return CurrentSample(rho=rho, j=j, mode=mode)


def classify(mbar_sq_value: float, scale: float, eps_light: float = EPS_LIGHT) -> str:
    """Causal class of the trajectory tangent from the sign of mbar^2."""
    if mbar_sq_value > eps_light * scale:
        return TIMELIKE
    if mbar_sq_value < -eps_light * scale:
        return SPACELIKE
    return LIGHTLIKE


def mbar_sq_printed(config: PhysConfig, t: float, x: float) -> float:
    """The three-term closed effective-mass density, exactly as displayed."""
    s2 = config.sigma**2
    k0 = config.k0
    env = envelopes(config, SpacetimePoint(t, x))
    br2, bl2 = env.beta_R_sq, env.beta_L_sq
    br, bl = math.sqrt(br2), math.sqrt(bl2)
    fac = interference_factors(config, x)
    cos2 = math.cos(2.0 * k0 * x)
    sin2 = math.sin(2.0 * k0 * x)
    return (
        4.0 * br2 * bl2 * (1.0 + fac.t0**2 - fac.s0**2)
        + 4.0 * bl2 * bl * br * (cos2 + (2.0 * s2 * (t - x) / k0) * sin2)
        + 4.0 * br2 * br * bl * (cos2 - (2.0 * s2 * (t + x) / k0) * sin2)
    )


def mbar_sq(config: PhysConfig, p: SpacetimePoint, mode: Mode = "exact",
            eps_light: float = EPS_LIGHT) -> MassSample:
    """Effective mass density mbar^2 with derived meff^2 and causal class.

    meff^2 diverges at nodes; it is reported with reliable=False (never
    clamped) when |psi|^4 < 1e-12 of its peak.
    """
    _check_mode(mode)
    if mode == "exact":
        rho, j = current_evaluator(config, "exact")(p.t, p.x)
        mb = rho * rho - j * j
    else:
        mb = mbar_sq_printed(config, p.t, p.x)
    psi = jet_evaluator(config)(p.t, p.x)[0]
    psi4 = abs(psi) ** 4
    meff = mb / psi4 if psi4 > 0.0 else math.nan
    return MassSample(
        mbar_sq=mb,
        meff_sq=meff,
        m_local_sq_physical=(config.hbar * config.k0) ** 2 * meff,
        causal_class=classify(mb, mass_scale(config), eps_light),
        reliable=psi4 >= PSI4_RELIABLE_REL * peak_amplitude(config) ** 4,
    )


def velocity(config: PhysConfig, p: SpacetimePoint, mode: Mode = "exact",
             rho_min_rel: float = RHO_MIN_REL) -> float:
    """Coordinate velocity v = c^2 j / rho.  Exceeds c in spacelike regions.

    Raises NodeError when |rho| falls below rho_min_rel times the peak
    density; the velocity field is singular there.
    """
    rho, j = current_evaluator(config, mode)(p.t, p.x)
    if abs(rho) < rho_min_rel * rho_peak(config):
        raise NodeError(f"rho = {rho:g} at (t={p.t:g}, x={p.x:g}) is below the node threshold")
    return config.c**2 * j / rho
