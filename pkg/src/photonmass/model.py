"""Configuration and shared value types.

Natural units are fixed once and for all: hbar = c = 1.  Lengths (and
therefore times) are conveniently measured in units of 1/sigma, so the
default example configurations use sigma = 1.  All downstream physics is
a pure function of a validated PhysConfig and a SpacetimePoint.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

# Below this ratio the single-branch (optics) closed forms degrade; warn,
# do not reject.
OPTICS_RATIO_MIN = 5.0


class ConfigError(ValueError):
    """Raised when a configuration violates one of its invariants."""


class NodeError(ArithmeticError):
    """Raised when a local quantity is requested at (or too close to) a
    node of the wavefunction, where it is undefined."""


class OpticsApproximationWarning(UserWarning):
    """Emitted when k0/sigma is small enough that the closed forms carry
    non-negligible single-branch errors."""


@dataclass(frozen=True, slots=True)
class PhysConfig:
    """Wavepacket parameters: center wavenumber, bandwidth, right-mover weight.

    hbar and c are carried as explicit fields so formulas and reports can
    show them, but they are pinned to 1.
    """

    k0: float
    sigma: float
    alpha: float
    hbar: float = 1.0
    c: float = 1.0

    @property
    def optics_ratio(self) -> float:
        return self.k0 / self.sigma

    @property
    def optics_warning(self) -> bool:
        return self.optics_ratio < OPTICS_RATIO_MIN


def validate(config: PhysConfig) -> PhysConfig:
    """Check all PhysConfig invariants, returning the config unchanged.

    Raises ConfigError for non-finite values, k0 <= 0, sigma <= 0, alpha
    outside [0, 1], or units not pinned to hbar = c = 1.  Emits an
    OpticsApproximationWarning when k0/sigma < 5.  Idempotent.
    """
    for name in ("k0", "sigma", "alpha", "hbar", "c"):
        v = getattr(config, name)
        if not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(f"{name} must be a finite number, got {v!r}")
    if config.k0 <= 0:
        raise ConfigError(f"k0 must be > 0, got {config.k0}")
    if config.sigma <= 0:
        raise ConfigError(f"sigma must be > 0, got {config.sigma}")
    if not 0.0 <= config.alpha <= 1.0:
        raise ConfigError(f"alpha must lie in [0, 1], got {config.alpha}")
    if config.hbar != 1.0 or config.c != 1.0:
        raise ConfigError("units are fixed to hbar = c = 1")
    if config.optics_warning:
        warnings.warn(
            f"k0/sigma = {config.optics_ratio:g} < {OPTICS_RATIO_MIN:g}: "
            "closed forms assume a well-separated two-branch spectrum",
            OpticsApproximationWarning,
            stacklevel=2,
        )
    return config


@dataclass(frozen=True, slots=True)
class SpacetimePoint:
    """An event (t, x) in the lab frame, c = 1."""

    t: float
    x: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.x)):
            raise ConfigError(f"spacetime point must be finite, got ({self.t}, {self.x})")


@dataclass(frozen=True, slots=True)
class GridSpec:
    """Rectangular spacetime sampling window, row-major (t outer, x inner)."""

    t_min: float
    t_max: float
    x_min: float
    x_max: float
    nt: int
    nx: int

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.t_min, self.t_max, self.x_min, self.x_max)):
            raise ConfigError("grid bounds must be finite")
        if self.t_min >= self.t_max:
            raise ConfigError(f"t_min must be < t_max, got [{self.t_min}, {self.t_max}]")
        if self.x_min >= self.x_max:
            raise ConfigError(f"x_min must be < x_max, got [{self.x_min}, {self.x_max}]")
        if self.nt < 2 or self.nx < 2:
            raise ConfigError(f"need nt, nx >= 2, got ({self.nt}, {self.nx})")

    def t_values(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.nt)

    def x_values(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)


@dataclass(frozen=True, slots=True)
class ComplexAmplitude:
    """A complex field value with its polar decomposition psi = R e^{iS}."""

    re: float
    im: float

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexAmplitude":
        return cls(z.real, z.imag)

    @property
    def c(self) -> complex:
        return complex(self.re, self.im)

    @property
    def amplitude(self) -> float:
        """R = |psi| >= 0."""
        return abs(self.c)

    @property
    def phase(self) -> float:
        """S = arg psi in (-pi, pi], hbar = 1."""
        return math.atan2(self.im, self.re)
