"""Periodic grid functions over the particle index and their differences.

A grid function is a plain 1-D float array of length N read periodically
(index arithmetic modulo N).  ``nabla_plus`` and ``nabla_minus`` are the
forward and backward differences on that lattice; they commute, obey the
product rule nabla_plus(g*f)(i) = f(i+1)*nabla_plus(g)(i) + g(i)*nabla_plus(f)(i),
and telescope to zero over a full period.
"""

from __future__ import annotations

import numpy as np

from .force import ForceSpec, eval_derivative
from .ring import RingConfig, initial_positions

__all__ = [
    "as_grid",
    "nabla_plus",
    "nabla_minus",
    "shift",
    "force_grid",
    "iterated_derivative",
]


def as_grid(values) -> np.ndarray:
    """Validate and return a grid function as a float array (N >= 2, finite)."""
    g = np.asarray(values, dtype=float)
    if g.ndim != 1 or g.shape[0] < 2:
        raise ValueError(f"grid function must be 1-D with length >= 2, got shape {g.shape}")
    if not np.isfinite(g).all():
        raise ValueError("grid function entries must be finite")
    return g


def nabla_plus(g) -> np.ndarray:
    """Forward difference: result(i) = g(i+1) - g(i), indices mod N."""
    g = as_grid(g)
    return np.roll(g, -1) - g


def nabla_minus(g) -> np.ndarray:
    """Backward difference: result(i) = g(i) - g(i-1), indices mod N."""
    g = as_grid(g)
    return g - np.roll(g, 1)


def shift(g, n: int = 1) -> np.ndarray:
    """Shift operator: result(i) = g(i+n), indices mod N."""
    return np.roll(as_grid(g), -n)


def force_grid(spec: ForceSpec, config: RingConfig, k: int) -> np.ndarray:
    """Sample the k-th force derivative on the rest lattice: F^(k)(i*L/N)."""
    return np.asarray(eval_derivative(spec, k, initial_positions(config)))


def iterated_derivative(spec: ForceSpec, config: RingConfig, k: int, q: int) -> np.ndarray:
    """Apply the forward difference q times to the k-th force derivative grid.

    Any mix of forward/backward differences gives the same magnitude
    envelope; the all-forward stencil is the canonical choice here.  The
    result is bounded by C**(k+q+1) * (L/N)**q with C the force growth
    constant, because each difference is an integral of the next derivative
    over one lattice spacing.
    """
    if q < 0:
        raise ValueError(f"difference order q must be >= 0, got {q}")
    g = force_grid(spec, config, k)
    for _ in range(q):
        g = nabla_plus(g)
    return g
