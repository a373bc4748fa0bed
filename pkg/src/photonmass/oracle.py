"""Independent numerical ground truth for the closed-form pipeline.

Nothing here shares a code path with the closed-form jet (beyond the
momentum amplitude f(k) itself):

* psi_quadrature       -- adaptive Gauss-Kronrod synthesis of psi from
                          momentum space with the exact massless dispersion
                          E(k) = |k|, split at the k = 0 kink.
* weak_values_spectral -- weak values as ratios of k-space integrals
                          weighted by E(k) and k; no differentiation at all.
* fd_dalembertian_r_over_r, continuity_residual -- second-order central
                          finite-difference operators for the wave-identity
                          and conservation checks.
* convergence_check    -- two-grid estimate of a residual's convergence
                          order.

The oracle is deliberately pointwise and simple so the main pipeline is
never validated against itself.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Callable

from scipy.integrate import quad

from .model import ComplexAmplitude, NodeError, PhysConfig, SpacetimePoint
from .wavepacket import momentum_amplitude

# Spectral node threshold: |psi| below this is refused (absolute, the
# wavepacket family has |psi| = O(1) at its peak for sigma = 1).
SPECTRAL_NODE_ABS = 1e-12


class QuadratureError(ArithmeticError):
    """Quadrature failed to reach the requested tolerance.

    Carries the best estimate and the reported residual."""

    def __init__(self, message: str, estimate: complex, residual: float):
        super().__init__(message)
        self.estimate = estimate
        self.residual = residual


@dataclass(frozen=True, slots=True)
class QuadratureSpec:
    """Tolerances and window for the momentum-space integrals."""

    abs_tol: float = 1e-10
    k_window: float = 12.0
    max_subdivisions: int = 60

    def __post_init__(self):
        if self.abs_tol <= 0:
            raise ValueError(f"abs_tol must be > 0, got {self.abs_tol}")
        if self.k_window < 8:
            raise ValueError(f"k_window must be >= 8, got {self.k_window}")


@dataclass(frozen=True, slots=True)
class ConvergenceReport:
    h_coarse: float
    h_fine: float
    err_coarse: float
    err_fine: float
    estimated_order: float


def _quad_complex(f, a: float, b: float, spec: QuadratureSpec, seed_points) -> tuple[complex, float]:
    # Each half-integral gets half the budget, split again over re/im.
    tol = spec.abs_tol / 4.0
    re, err_re = quad(lambda k: f(k).real, a, b, epsabs=tol, epsrel=1e-12,
                      limit=spec.max_subdivisions, points=seed_points, full_output=True)[:2]
    im, err_im = quad(lambda k: f(k).imag, a, b, epsabs=tol, epsrel=1e-12,
                      limit=spec.max_subdivisions, points=seed_points, full_output=True)[:2]
    return complex(re, im), err_re + err_im


def _spectral_integral(config: PhysConfig, p: SpacetimePoint, weight,
                       spec: QuadratureSpec) -> complex:
    """integral of weight(k) f(k) exp(i(kx - |k|t)) dk, split at k = 0."""
    lo = -config.k0 - spec.k_window * config.sigma
    hi = config.k0 + spec.k_window * config.sigma
    t, x = p.t, p.x

    def integrand(k: float) -> complex:
        return weight(k) * momentum_amplitude(config, k) * cmath.exp(complex(0.0, k * x - abs(k) * t))

    left, err_l = _quad_complex(integrand, lo, 0.0, spec, seed_points=(-config.k0,))
    right, err_r = _quad_complex(integrand, 0.0, hi, spec, seed_points=(config.k0,))
    total = left + right
    residual = err_l + err_r
    if residual > spec.abs_tol:
        raise QuadratureError(
            f"momentum quadrature residual {residual:g} exceeds abs_tol {spec.abs_tol:g} "
            f"at (t={t:g}, x={x:g})", total, residual)
    return total


def psi_quadrature(config: PhysConfig, p: SpacetimePoint,
                   spec: QuadratureSpec = QuadratureSpec()) -> ComplexAmplitude:
    """psi(t, x) = (2 pi)^(-1/2) integral f(k) e^{i(kx - |k|t)} dk."""
    val = _spectral_integral(config, p, lambda k: 1.0, spec) / math.sqrt(2.0 * math.pi)
    return ComplexAmplitude.from_complex(val)


def weak_values_spectral(config: PhysConfig, p: SpacetimePoint,
                         spec: QuadratureSpec = QuadratureSpec()):
    """Exact-dispersion weak values H_w, p_w as ratios of k-space integrals.

    H_w weights the postselected amplitude with hbar |k| and p_w with
    hbar k; the shared denominator is psi itself (up to the Fourier
    prefactor, which cancels).  abs_tol applies to the unit-weight
    integral; the weighted ones scale it by the weight bound on the
    window.
    """
    from dataclasses import replace

    from .weakvalues import WeakValuePair

    denom = _spectral_integral(config, p, lambda k: 1.0, spec)
    if abs(denom) / math.sqrt(2.0 * math.pi) <= SPECTRAL_NODE_ABS:
        raise NodeError(f"|psi| = {abs(denom) / math.sqrt(2.0 * math.pi):g} too close to a node "
                        f"for spectral weak values at (t={p.t:g}, x={p.x:g})")
    k_bound = config.k0 + spec.k_window * config.sigma
    spec_w = replace(spec, abs_tol=spec.abs_tol * k_bound)
    num_h = _spectral_integral(config, p, abs, spec_w)
    num_p = _spectral_integral(config, p, lambda k: k, spec_w)
    return WeakValuePair(H_w=config.hbar * num_h / denom, p_w=config.hbar * num_p / denom)


def fd_dalembertian_r_over_r(sampler: Callable[[SpacetimePoint], float],
                             p: SpacetimePoint, h: float, r_min: float = 0.0) -> float:
    """Squared-mass operator (d_t^2 R - d_x^2 R) / R by central differences.

    For a solution of the massless wave equation with polar form
    psi = R e^{iS}, this quantity equals (d_t S)^2 - (d_x S)^2, i.e. the
    signed squared local mass in natural units (the relativistic
    generalization of the quantum potential, -box R / R with the wave
    operator box = d_x^2 - d_t^2).  Second-order accurate in h.
    """
    if h <= 0:
        raise ValueError(f"h must be > 0, got {h}")
    r0 = sampler(p)
    if r0 <= max(r_min, 0.0):
        raise NodeError(f"R = {r0:g} at (t={p.t:g}, x={p.x:g}) too small for -box R / R")
    t, x = p.t, p.x
    d2t = sampler(SpacetimePoint(t + h, x)) - 2.0 * r0 + sampler(SpacetimePoint(t - h, x))
    d2x = sampler(SpacetimePoint(t, x + h)) - 2.0 * r0 + sampler(SpacetimePoint(t, x - h))
    return (d2t - d2x) / (h * h * r0)


def continuity_residual(config: PhysConfig, p: SpacetimePoint, h: float,
                        mode: str = "exact") -> float:
    """Central-difference d_t rho + d_x j; converges to 0 for exact mode."""
    from .fields import current_evaluator

    if h <= 0:
        raise ValueError(f"h must be > 0, got {h}")
    cur = current_evaluator(config, mode)
    d_rho = cur(p.t + h, p.x)[0] - cur(p.t - h, p.x)[0]
    d_j = cur(p.t, p.x + h)[1] - cur(p.t, p.x - h)[1]
    return (d_rho + d_j) / (2.0 * h)


def convergence_check(residual_fn: Callable[[SpacetimePoint, float], float],
                      p: SpacetimePoint, h: float) -> ConvergenceReport:
    """Estimate the order of a residual from evaluations at h and h/2."""
    err_coarse = abs(residual_fn(p, h))
    err_fine = abs(residual_fn(p, h / 2.0))
    if err_fine == 0.0:
        order = math.inf if err_coarse > 0.0 else math.nan
    else:
        order = math.log2(err_coarse / err_fine)
    return ConvergenceReport(h_coarse=h, h_fine=h / 2.0,
                             err_coarse=err_coarse, err_fine=err_fine,
                             estimated_order=order)
