"""Time evolution of tomograms.

Three routes live here: exact coordinate pullbacks for the free particle
and the unit oscillator (the delta-kernel propagators read as frame
flows), evolution through a quantum Green function (tomogram -> density
matrix -> evolved density matrix -> tomogram), and the regularized
Fourier-component kernel evaluator connecting the transition-probability
kernel to the Green function.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, UnsupportedPotentialError
from .greens import GreenFunction, Potential
from .grids import UniformGrid, damped_integral_2d, trapezoid_weights
from .states import DensityMatrix
from .tomography import Tomogram, density_from_tomogram, tomogram_from_density

DEFAULT_WORK_GRID = UniformGrid(-10.0, 10.0, 384)
DEFAULT_KERNEL_DOMAIN = 80.0
DEFAULT_KERNEL_POINTS = 801
DEFAULT_DAMPING = 1e-3


def _pullback_frame_matrix(potential: Potential, t: float) -> np.ndarray:
    """Linear map on (X, mu, nu) whose pullback realizes the delta kernel."""
    if potential.is_free:
        return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, t, 1.0]])
    if potential.is_unit_oscillator:
        c, s = np.cos(t), np.sin(t)
        return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    raise UnsupportedPotentialError(
        "pullback evolution supports only free motion and the unit oscillator"
    )


def evolve_pullback(tomo: Tomogram, potential: Potential, t: float) -> Tomogram:
    """Exact evolution by evaluating the initial tomogram at flowed frames.

    Free motion sends (X, mu, nu) to (X, mu, nu + mu t); the oscillator
    rotates (mu, nu) by t.  Frame magnitudes away from the unit circle are
    handled by the homogeneity law inside Tomogram.evaluate.  Repeated
    pullbacks compose their frame maps exactly, so composition and
    invertibility hold to rounding error on lattice-aligned queries.
    """
    return tomo.with_frame_map(_pullback_frame_matrix(potential, t))


def evolve_via_green(
    tomo: Tomogram,
    green: GreenFunction,
    t: float,
    *,
    work_grid: UniformGrid = DEFAULT_WORK_GRID,
) -> Tomogram:
    """Evolution through the quantum propagator.

    Chain: tomogram -> density matrix (inverse transform) -> rho_t =
    G rho G^dagger by quadrature -> tomogram (spectral forward transform).
    The reconstructed density matrix is renormalized to unit trace before
    propagation, since the exact evolution is trace preserving.  t = 0 is
    special-cased to the identity chain.
    """
    rho = density_from_tomogram(tomo, work_grid)
    vals = rho.values / rho.trace()
    if t != 0:
        green.check_time(t)
        x = work_grid.points
        gm = green(x[:, None], x[None, :], t) * trapezoid_weights(
            work_grid.count, work_grid.step
        )
        vals = gm @ vals @ gm.conj().T
        vals = 0.5 * (vals + vals.conj().T)
        vals = vals / np.sum(np.diag(vals).real * trapezoid_weights(
            work_grid.count, work_grid.step
        ))
    rho_t = DensityMatrix(grid=work_grid, values=vals, meta=dict(rho.meta))
    return tomogram_from_density(rho_t, tomo.x_grid, tomo.theta_grid)


@dataclass(frozen=True)
class KernelFourierQuery:
    """Query for the Fourier component of the transition-probability kernel.

    The stored value fixes the initial position offset X' = 0; dependence
    on X' enters only through the exact phase factor exp(i k X').
    """

    k: float
    mu: float
    nu: float
    mu_p: float
    nu_p: float
    t: float
    green: GreenFunction
    damping: float = DEFAULT_DAMPING

    def __post_init__(self):
        if self.k == 0:
            raise InvalidInputError("kernel Fourier variable k must be nonzero")
        if self.damping <= 0:
            raise InvalidInputError("kernel damping must be positive")


def kernel_fourier(
    query: KernelFourierQuery,
    *,
    half_width: float = DEFAULT_KERNEL_DOMAIN,
    points: int = DEFAULT_KERNEL_POINTS,
) -> complex:
    """Damped Fourier component of the "classical" propagator.

    Pi_F(k; mu, nu; mu', nu'; t) = (k^2 / 2 pi) iint G(a + k nu/2,
    z + k nu', t) conj(G(a - k nu/2, z, t)) exp[i k (-k mu' nu'/2
    - mu' z + mu a)] dz da, regularized by the Gaussian damping factor.
    Deterministic for fixed grids and damping; the undamped kernel is
    distribution-valued for every potential in scope.
    """
    q = query
    q.green.check_time(q.t)
    grid = UniformGrid(-half_width, half_width, points)

    def integrand(z, a):
        g1 = q.green(a + 0.5 * q.k * q.nu, z + q.k * q.nu_p, q.t)
        g2 = q.green(a - 0.5 * q.k * q.nu, z, q.t)
        phase = q.k * (-0.5 * q.k * q.mu_p * q.nu_p - q.mu_p * z + q.mu * a)
        return g1 * np.conj(g2) * np.exp(1j * phase)

    raw = damped_integral_2d(integrand, grid, grid, q.damping)
    return q.k**2 / (2.0 * np.pi) * raw


def kernel_with_offset(query: KernelFourierQuery, x_prime: float, **kwargs) -> complex:
    """Kernel value at initial offset X'; exactly exp(i k X') times the stored value."""
    return np.exp(1j * query.k * x_prime) * kernel_fourier(query, **kwargs)


@dataclass(frozen=True)
class ComparisonReport:
    """Grid discrepancy between two tomograms (thresholds are the caller's)."""

    linf: float
    l2: float
    meta: dict = field(default_factory=dict, compare=False)


def compare_tomograms(a: Tomogram, b: Tomogram) -> ComparisonReport:
    if a.values.shape != b.values.shape:
        raise InvalidInputError("tomograms must share a grid to be compared")
    diff = a.values - b.values
    hx = a.x_grid.step
    htheta = np.pi / a.theta_grid.count
    return ComparisonReport(
        linf=float(np.abs(diff).max()),
        l2=float(np.sqrt(np.sum(diff**2) * hx * htheta)),
    )


def check_composition(
    route: str,
    potential: Potential,
    t_a: float,
    t_b: float,
    tomo: Tomogram,
    **route_kwargs,
) -> ComparisonReport:
    """Operator-level composition check: evolve(t_a) then evolve(t_b)
    versus evolve(t_a + t_b), reported as L-inf / L2 over the grid."""
    if route == "pullback":
        two = evolve_pullback(evolve_pullback(tomo, potential, t_a), potential, t_b)
        one = evolve_pullback(tomo, potential, t_a + t_b)
    elif route == "green":
        green = GreenFunction.for_potential(potential)
        two = evolve_via_green(
            evolve_via_green(tomo, green, t_a, **route_kwargs), green, t_b, **route_kwargs
        )
        one = evolve_via_green(tomo, green, t_a + t_b, **route_kwargs)
    else:
        raise InvalidInputError(f"unknown composition route {route!r}")
    return compare_tomograms(two, one)
