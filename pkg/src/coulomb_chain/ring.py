"""Ring configuration: particle count, geometry, force and truncation order.

One ``RingConfig`` value defines one experiment: N particles at rest on the
uniform lattice x_i(0) = i*L/N of a circle of circumference L, driven by an
analytic force, expanded to order ``j_max`` with time rescale ``scale``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .force import ForceSpec

__all__ = ["RingConfig", "auto_scale", "initial_positions"]


def auto_scale(N: int) -> float:
    """Default time rescale N**(-5/6).

    Coefficient magnitudes grow no faster than (chi * N**(5/6))**j, so this
    choice keeps the stored, rescaled coefficients of order chi**j and well
    inside double-precision range even for large N and deep truncation.
    """
    return float(N) ** (-5.0 / 6.0)


@dataclass(frozen=True)
class RingConfig:
    """Immutable description of one expansion experiment.

    ``scale=None`` selects the automatic rescale ``auto_scale(N)``.
    """

    N: int
    L: float
    force: ForceSpec
    j_max: int
    scale: float | None = None

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 2:
            raise ConfigError(f"N must be an integer >= 2, got {self.N!r}")
        if not (self.L > 0.0) or not math.isfinite(self.L):
            raise ConfigError(f"L must be positive and finite, got {self.L!r}")
        if not isinstance(self.j_max, int) or self.j_max < 1:
            raise ConfigError(f"j_max must be an integer >= 1, got {self.j_max!r}")
        if self.force.L != self.L:
            raise ConfigError(
                f"force period {self.force.L} does not match ring circumference {self.L}"
            )
        s = auto_scale(self.N) if self.scale is None else float(self.scale)
        if not (s > 0.0) or not math.isfinite(s):
            raise ConfigError(f"scale must be positive and finite, got {self.scale!r}")
        object.__setattr__(self, "scale", s)

    @property
    def delta(self) -> float:
        """Initial uniform gap L/N."""
        return self.L / self.N


def initial_positions(config: RingConfig) -> np.ndarray:
    """Rest positions x_i(0) = i*L/N for i = 0..N-1."""
    return np.arange(config.N, dtype=float) * (config.L / config.N)
