"""Weak values of energy and momentum at position postselection.

For preselection in the wavepacket state and postselection at position x,
the weak values reduce to logarithmic derivatives of the wavefunction:

    H_w = +i hbar (d_t psi) / psi,      p_w = -i hbar (d_x psi) / psi.

Signs are fixed so a positive-frequency right-mover e^{i(kx - Et)} yields
H_w = hbar E and p_w = hbar k, both purely real.  Only the real parts
enter the velocity and mass pipeline; the imaginary parts are carried for
completeness.  The local four-frequency is (k_t, k_x) = (Re H_w, Re p_w)
/ hbar, and the operational local mass is the norm

    m_local^2 c^4 = (Re H_w)^2 - c^2 (Re p_w)^2,

which may be negative (tachyonic regions).  All quantities are invariant
under a global rescaling of psi.
"""

from dataclasses import dataclass

from .model import NodeError, PhysConfig, SpacetimePoint
from .wavepacket import PsiJet, jet_evaluator, peak_amplitude

# Relative |psi| below which logarithmic derivatives are refused.
PSI_NODE_REL = 1e-14


@dataclass(frozen=True, slots=True)
class WeakValuePair:
    H_w: complex
    p_w: complex


@dataclass(frozen=True, slots=True)
class FourFrequency:
    k_t: float
    k_x: float


def weak_values_from_jet(jet: PsiJet, hbar: float = 1.0) -> WeakValuePair:
    """Weak values from an explicit jet; raises NodeError at psi = 0."""
    if jet.psi == 0:
        raise NodeError("weak values undefined at a node (psi = 0)")
    return WeakValuePair(
        H_w=1j * hbar * jet.d_t / jet.psi,
        p_w=-1j * hbar * jet.d_x / jet.psi,
    )


def weak_values(config: PhysConfig, p: SpacetimePoint) -> WeakValuePair:
    """H_w and p_w at p, from the analytic jet of the closed-form psi."""
    psi, d_t, d_x = jet_evaluator(config)(p.t, p.x)
    if abs(psi) < PSI_NODE_REL * peak_amplitude(config):
        raise NodeError(f"|psi| = {abs(psi):g} at (t={p.t:g}, x={p.x:g}) is below the node threshold")
    return WeakValuePair(H_w=1j * config.hbar * d_t / psi, p_w=-1j * config.hbar * d_x / psi)


def local_four_frequency(config: PhysConfig, p: SpacetimePoint) -> FourFrequency:
    """(k_t, k_x) = Im of the logarithmic spacetime derivatives of psi."""
    wv = weak_values(config, p)
    return FourFrequency(k_t=wv.H_w.real / config.hbar, k_x=wv.p_w.real / config.hbar)


def local_mass_sq(config: PhysConfig, p: SpacetimePoint) -> float:
    """Signed m_local^2 c^4 = (Re H_w)^2 - c^2 (Re p_w)^2 at p."""
    wv = weak_values(config, p)
    return wv.H_w.real**2 - config.c**2 * wv.p_w.real**2
