"""Momentum-space amplitude and closed-form position-space wavefunction.

The state is a superposition of right- and left-moving Gaussian momentum
packets with massless dispersion E(k) = |k|:

    f(k) = N [ sqrt(alpha)   exp(-(k - k0)^2 / 4 sigma^2)
             + sqrt(1-alpha) exp(-(k + k0)^2 / 4 sigma^2) ],
    N    = (2 pi sigma^2)^(-1/4).

With the unitary Fourier convention <x|k> = (2 pi)^(-1/2) e^{ikx} and each
packet confined to a single branch of |k| (valid for k0 >> sigma), the
position-space wavefunction is

    psi(t,x) = (2/pi)^(1/4) sqrt(sigma)
               [ sqrt(alpha)   e^{ i k0 (x-t)} e^{-sigma^2 (x-t)^2}
               + sqrt(1-alpha) e^{-i k0 (x+t)} e^{-sigma^2 (x+t)^2} ],

an exact solution of the 1+1D massless wave equation.  Everything
downstream consumes the analytic first-derivative jet of this closed
form; nothing ever differentiates numerically.
"""

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .model import PhysConfig, SpacetimePoint


@dataclass(frozen=True, slots=True)
class PsiJet:
    """psi together with its exact analytic first derivatives at one event."""

    psi: complex
    d_t: complex
    d_x: complex


def momentum_amplitude(config: PhysConfig, k):
    """Evaluate f(k); accepts a scalar or an ndarray of wavenumbers.

    The Gaussian-overlap cross term is neglected in the normalization N
    (relative size exp(-k0^2 / 2 sigma^2), ~2e-22 at k0/sigma = 10).
    """
    s2 = config.sigma**2
    norm = (2.0 * math.pi * s2) ** -0.25
    right = math.sqrt(config.alpha) * np.exp(-((k - config.k0) ** 2) / (4.0 * s2))
    left = math.sqrt(1.0 - config.alpha) * np.exp(-((k + config.k0) ** 2) / (4.0 * s2))
    return norm * (right + left)


def peak_amplitude(config: PhysConfig) -> float:
    """Upper bound on |psi| over spacetime (attained near the origin)."""
    a = (2.0 / math.pi) ** 0.25 * math.sqrt(config.sigma)
    return a * (math.sqrt(config.alpha) + math.sqrt(1.0 - config.alpha))


@lru_cache(maxsize=64)
def jet_evaluator(config: PhysConfig) -> Callable[[float, float], tuple[complex, complex, complex]]:
    """Return a fast (t, x) -> (psi, d_t psi, d_x psi) closure.

    This is the single hot path shared by the field, weak-value, and
    trajectory code; constants are bound once per config.
    """
    k0 = config.k0
    s2 = config.sigma**2
    a = (2.0 / math.pi) ** 0.25 * math.sqrt(config.sigma)
    cr = a * math.sqrt(config.alpha)
    cl = a * math.sqrt(1.0 - config.alpha)

    def jet(t: float, x: float) -> tuple[complex, complex, complex]:
        u = x - t
        w = x + t
        # d/du log psi_R = i k0 - 2 sigma^2 u, and psi_R depends on u only
        # (d_t = -d/du); mirrored for the left mover in w = x + t.
        if cr != 0.0:
            pr = cr * cmath.exp(complex(-s2 * u * u, k0 * u))
            dr = complex(-2.0 * s2 * u, k0) * pr
        else:
            pr = dr = 0j
        if cl != 0.0:
            pl = cl * cmath.exp(complex(-s2 * w * w, -k0 * w))
            dl = complex(-2.0 * s2 * w, -k0) * pl
        else:
            pl = dl = 0j
        return pr + pl, dl - dr, dr + dl

    return jet


def psi_closed(config: PhysConfig, p: SpacetimePoint) -> PsiJet:
    """Closed-form psi(t, x) with its exact d_t and d_x."""
    psi, d_t, d_x = jet_evaluator(config)(p.t, p.x)
    return PsiJet(psi, d_t, d_x)
