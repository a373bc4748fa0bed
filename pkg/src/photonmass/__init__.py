"""Relativistic Bohmian photon trajectories and the weak-value local mass
of interfering massless Klein-Gordon wavepackets."""

__version__ = "0.1.0"

from .model import (ComplexAmplitude, ConfigError, GridSpec, NodeError,
                    OpticsApproximationWarning, PhysConfig, SpacetimePoint, validate)
from .wavepacket import PsiJet, momentum_amplitude, psi_closed
from .fields import (CurrentSample, Envelopes, InterferenceFactors, MassSample,
                     current, envelopes, interference_factors, mbar_sq, velocity)
from .weakvalues import (FourFrequency, WeakValuePair, local_four_frequency,
                         local_mass_sq, weak_values)
from .oracle import (ConvergenceReport, QuadratureError, QuadratureSpec,
                     continuity_residual, convergence_check,
                     fd_dalembertian_r_over_r, psi_quadrature, weak_values_spectral)
from .dynamics import (SegmentSummary, Trajectory, TrajectorySample,
                       classify_segments, initial_positions, integrate)
from .relativity import (BoostFrame, RetroInterval, boost_current, boost_point,
                         boost_trajectory, boost_velocity,
                         current_in_boosted_frame, detect_retropropagation)

__all__ = [
    "__version__",
    "ComplexAmplitude", "ConfigError", "GridSpec", "NodeError",
    "OpticsApproximationWarning", "PhysConfig", "SpacetimePoint", "validate",
    "PsiJet", "momentum_amplitude", "psi_closed",
    "CurrentSample", "Envelopes", "InterferenceFactors", "MassSample",
    "current", "envelopes", "interference_factors", "mbar_sq", "velocity",
    "FourFrequency", "WeakValuePair", "local_four_frequency", "local_mass_sq",
    "weak_values",
    "ConvergenceReport", "QuadratureError", "QuadratureSpec",
    "continuity_residual", "convergence_check", "fd_dalembertian_r_over_r",
    "psi_quadrature", "weak_values_spectral",
    "SegmentSummary", "Trajectory", "TrajectorySample", "classify_segments",
    "initial_positions", "integrate",
    "BoostFrame", "RetroInterval", "boost_current", "boost_point",
    "boost_trajectory", "boost_velocity", "current_in_boosted_frame",
    "detect_retropropagation",
]
