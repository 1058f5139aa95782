"""Uniform grids and quadrature helpers.

All integrals in the library run over truncated real lines; domains are
chosen wide enough that integrands are negligible at the boundary.  The
convention is a closed grid: both endpoints are grid points.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidInputError, NumericalDomainError


@dataclass(frozen=True)
class UniformGrid:
    """Closed uniform grid: `count` equally spaced points including both endpoints."""

    lower: float
    upper: float
    count: int

    def __post_init__(self):
        if self.count < 8:
            raise InvalidInputError(f"grid needs at least 8 points, got {self.count}")
        if not self.upper > self.lower:
            raise InvalidInputError(
                f"grid upper bound {self.upper} must exceed lower bound {self.lower}"
            )

    @property
    def step(self) -> float:
        return (self.upper - self.lower) / (self.count - 1)

    @cached_property
    def points(self) -> np.ndarray:
        return np.linspace(self.lower, self.upper, self.count)

    @property
    def span(self) -> float:
        return self.upper - self.lower


def trapezoid_weights(count: int, step: float) -> np.ndarray:
    """Composite trapezoid weights for a closed grid."""
    w = np.full(count, step)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def integrate_samples(values, step: float):
    """Trapezoidal integral of uniformly sampled values.

    Works for real or complex samples; raises on fewer than two samples.
    """
    values = np.asarray(values)
    if values.shape[-1] < 2:
        raise InvalidInputError("integrate_samples needs at least 2 samples")
    if step <= 0:
        raise InvalidInputError(f"step must be positive, got {step}")
    inner = values[..., 1:-1].sum(axis=-1)
    return step * (inner + 0.5 * (values[..., 0] + values[..., -1]))


def damped_integral_2d(f, grid_z: UniformGrid, grid_a: UniformGrid, damping: float):
    """Gaussian-damped double integral of f(z, a) over a tensor-product grid.

    Returns the trapezoidal approximation of

        iint f(z, a) exp(-damping * (z^2 + a^2)) dz da.

    The caller owns the interpretation of the damping -> 0 limit; the
    damping is Gaussian so closed-form oracles stay available.  `f` must
    accept numpy arrays (broadcasting over the meshgrid).
    """
    if damping <= 0:
        raise InvalidInputError(f"damping must be positive, got {damping}")
    Z, A = np.meshgrid(grid_z.points, grid_a.points, indexing="ij")
    vals = np.asarray(f(Z, A), dtype=np.complex128)
    bad = ~np.isfinite(vals)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise NumericalDomainError(
            f"non-finite integrand at z={grid_z.points[i]:.6g}, a={grid_a.points[j]:.6g}"
        )
    vals = vals * np.exp(-damping * (Z**2 + A**2))
    wz = trapezoid_weights(grid_z.count, grid_z.step)
    wa = trapezoid_weights(grid_a.count, grid_a.step)
    return complex(wz @ vals @ wa)
