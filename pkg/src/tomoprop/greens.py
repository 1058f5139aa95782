"""Quantum propagators for quadratic potentials.

Closed forms for free motion and the unit oscillator, the sliced path
integral evaluated by exact Gaussian marginalization, the classical
boundary-value solver, and the van Vleck quasiclassical kernel built from
the classical action.  Natural units hbar = m = 1 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CausticError,
    DegenerateBVPError,
    InvalidInputError,
    NumericalDomainError,
    SingularTimeError,
    UnsupportedPotentialError,
)

CAUSTIC_THRESHOLD = 1e-6
_SQRT_I_INV = np.exp(-0.25j * np.pi)  # branch fixed by the t -> 0+ limit


@dataclass(frozen=True)
class Potential:
    """Quadratic potential U(x) = alpha*x + beta*x^2."""

    alpha: float = 0.0
    beta: float = 0.0

    def __call__(self, x):
        return self.alpha * x + self.beta * np.square(x)

    def gradient(self, x):
        return self.alpha + 2.0 * self.beta * x

    @property
    def is_free(self) -> bool:
        return self.alpha == 0.0 and self.beta == 0.0

    @property
    def is_unit_oscillator(self) -> bool:
        return self.alpha == 0.0 and self.beta == 0.5


FREE = Potential(0.0, 0.0)
OSCILLATOR = Potential(0.0, 0.5)


def green_free(x, y, t):
    """Free-particle kernel (2 pi i t)^{-1/2} exp(i (x-y)^2 / 2t)."""
    if np.any(t == 0):
        raise SingularTimeError("free-particle kernel is singular at t = 0")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    pref = 1.0 / np.sqrt(2.0 * np.pi * 1j * t)
    return pref * np.exp(0.5j * (x - y) ** 2 / t)


def green_oscillator(x, y, t, caustic_threshold: float = CAUSTIC_THRESHOLD):
    """Unit-frequency oscillator kernel away from caustics sin t = 0."""
    st = np.sin(t)
    if np.any(np.abs(st) <= caustic_threshold):
        raise CausticError(f"oscillator kernel undefined at t={t} (|sin t| <= {caustic_threshold})")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ct = np.cos(t) / st
    pref = 1.0 / np.sqrt(2.0 * np.pi * 1j * st)
    return pref * np.exp(0.5j * ct * (x**2 + y**2) - 1j * x * y / st)


@dataclass(frozen=True)
class ClassicalPath:
    """Sampled solution of the classical boundary-value problem."""

    times: np.ndarray
    positions: np.ndarray

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])


def _check_conjugate(potential: Potential, duration: float) -> None:
    if potential.beta > 0:
        omega = np.sqrt(2.0 * potential.beta)
        phase = omega * duration
        if abs(phase - np.pi * round(phase / np.pi)) < 1e-6 * max(1.0, omega):
            raise DegenerateBVPError(
                f"duration {duration} is a conjugate point for beta={potential.beta}"
            )


def classical_trajectory(
    potential: Potential, x1: float, x2: float, duration: float, slices: int
) -> ClassicalPath:
    """Solve xddot = -U'(x) with x(0) = x1, x(T) = x2 in closed form.

    The potential is at most quadratic, so the solution is a line plus
    parabola (beta = 0), trigonometric (beta > 0), or hyperbolic (beta < 0)
    interpolation between the endpoints.
    """
    if duration <= 0:
        raise InvalidInputError("trajectory duration must be positive")
    if slices < 1:
        raise InvalidInputError("need at least one time slice")
    _check_conjugate(potential, duration)
    t = np.linspace(0.0, duration, slices + 1)
    alpha, beta = potential.alpha, potential.beta
    if beta == 0.0:
        # constant acceleration -alpha
        v0 = (x2 - x1) / duration + 0.5 * alpha * duration
        x = x1 + v0 * t - 0.5 * alpha * t**2
    else:
        shift = alpha / (2.0 * beta)
        u1, u2 = x1 + shift, x2 + shift
        if beta > 0:
            omega = np.sqrt(2.0 * beta)
            s = np.sin(omega * duration)
            x = (u1 * np.sin(omega * (duration - t)) + u2 * np.sin(omega * t)) / s - shift
        else:
            kappa = np.sqrt(-2.0 * beta)
            s = np.sinh(kappa * duration)
            x = (u1 * np.sinh(kappa * (duration - t)) + u2 * np.sinh(kappa * t)) / s - shift
    x[0] = x1
    x[-1] = x2
    return ClassicalPath(times=t, positions=x)


def action_of_path(path: ClassicalPath, potential: Potential) -> float:
    """Discrete action sum_n [(x_n - x_{n-1})^2 / (2 dt) - U(x_n) dt]."""
    x = path.positions
    if x.size < 2:
        if x.size == 1:
            return 0.0
        raise InvalidInputError("path needs at least one point")
    dt = path.step
    kinetic = np.sum(np.diff(x) ** 2) / (2.0 * dt)
    pot = np.sum(potential(x[1:])) * dt
    return float(kinetic - pot)


def closed_action(potential: Potential, x2, x1, t):
    """Classical action S(x2, x1, t) for the quadratic potential class.

    Broadcasts over numpy arrays in x1, x2.
    """
    if np.any(np.asarray(t) <= 0):
        raise InvalidInputError("action requires positive duration")
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    alpha, beta = potential.alpha, potential.beta
    if beta == 0.0:
        return (
            (x2 - x1) ** 2 / (2.0 * t)
            - 0.5 * alpha * t * (x1 + x2)
            - alpha**2 * t**3 / 24.0
        )
    shift = alpha / (2.0 * beta)
    u1, u2 = x1 + shift, x2 + shift
    if beta > 0:
        omega = np.sqrt(2.0 * beta)
        s = np.sin(omega * t)
        if np.any(np.abs(s) < 1e-12):
            raise DegenerateBVPError(f"conjugate point at t={t}")
        quad = omega * ((u1**2 + u2**2) * np.cos(omega * t) - 2.0 * u1 * u2) / (2.0 * s)
    else:
        kappa = np.sqrt(-2.0 * beta)
        s = np.sinh(kappa * t)
        quad = kappa * ((u1**2 + u2**2) * np.cosh(kappa * t) - 2.0 * u1 * u2) / (2.0 * s)
    return quad + alpha**2 * t / (4.0 * beta)


def green_sliced(potential: Potential, x, y, t: float, slices: int):
    """N-slice path-integral kernel by exact Gaussian marginalization.

    Each slice contributes (2 pi i dt)^{-1/2} exp{i[(x_n - x_{n-1})^2/(2 dt)
    - U(x_n) dt]}; the intermediate integrals are Gaussian and are folded
    in sequentially, so the result is exact for the free particle at any N
    and carries an O(dt) discretization error from the potential term
    otherwise.
    """
    if not isinstance(potential, Potential):
        raise UnsupportedPotentialError("sliced propagator supports quadratic potentials only")
    if t <= 0:
        raise InvalidInputError("sliced propagator requires t > 0")
    if slices < 1:
        raise InvalidInputError("need at least one slice")
    dt = t / slices
    if dt >= 0.5:
        raise InvalidInputError(f"slice width {dt} exceeds stability bound 0.5")
    amp, a, b, c, d, e = _sliced_coefficients(potential, dt, slices)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return amp * np.exp(1j * (a * x**2 + b * x * y + c * y**2 + d * x + e * y))


def _sliced_coefficients(potential: Potential, dt: float, slices: int):
    """Fold the slice kernels into amp * exp(i(a x^2 + b x y + c y^2 + d x + e y))."""
    alpha, beta = potential.alpha, potential.beta
    a1 = 0.5 / dt - beta * dt
    b1 = -1.0 / dt
    c1 = 0.5 / dt
    d1 = -alpha * dt
    amp_slice = 1.0 / np.sqrt(2.0 * np.pi * 1j * dt)
    amp, a, b, c, d, e = amp_slice, a1, b1, c1, d1, 0.0
    for _ in range(slices - 1):
        big_a = c1 + a
        if abs(big_a) < 1e-14:
            raise NumericalDomainError("degenerate Gaussian marginalization in sliced kernel")
        amp = (
            amp
            * amp_slice
            * np.sqrt(np.pi / abs(big_a))
            * np.exp(1j * np.sign(big_a) * np.pi / 4.0)
            * np.exp(-1j * d**2 / (4.0 * big_a))
        )
        a_new = a1 - b1**2 / (4.0 * big_a)
        b_new = -b1 * b / (2.0 * big_a)
        c_new = c - b**2 / (4.0 * big_a)
        d_new = d1 - b1 * d / (2.0 * big_a)
        e_new = e - b * d / (2.0 * big_a)
        a, b, c, d, e = a_new, b_new, c_new, d_new, e_new
    return amp, a, b, c, d, e


def green_van_fleck(potential: Potential, x2, x1, t: float, fd_step: float = 1e-2):
    """Quasiclassical kernel from the classical action.

    Amplitude uses the mixed second derivative of S(x2, x1, t), evaluated
    by central finite differences; the overall constant is fixed so the
    free-particle case reproduces the exact kernel.  For the supported
    potential class the action is a quadratic polynomial in the endpoints,
    so the central difference is exact for any step and the step size only
    controls rounding error.
    """
    if t <= 0:
        raise InvalidInputError("van Vleck kernel requires t > 0")
    _check_conjugate(potential, t)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    s = closed_action(potential, x2, x1, t)
    h = fd_step
    s12 = (
        closed_action(potential, x2 + h, x1 + h, t)
        - closed_action(potential, x2 + h, x1 - h, t)
        - closed_action(potential, x2 - h, x1 + h, t)
        + closed_action(potential, x2 - h, x1 - h, t)
    ) / (4.0 * h * h)
    return _SQRT_I_INV / np.sqrt(2.0 * np.pi) * np.sqrt(np.abs(s12)) * np.exp(1j * s)


@dataclass(frozen=True)
class GreenFunction:
    """Evaluatable propagator descriptor G(x, y, t).

    kind is one of "free", "oscillator", "van-fleck", "sliced"; the last
    two carry the Potential (and a slice count for "sliced").
    """

    kind: str
    potential: Potential | None = None
    slices: int | None = None
    caustic_threshold: float = field(default=CAUSTIC_THRESHOLD)

    @classmethod
    def free(cls) -> "GreenFunction":
        return cls("free")

    @classmethod
    def oscillator(cls) -> "GreenFunction":
        return cls("oscillator")

    @classmethod
    def van_fleck(cls, potential: Potential) -> "GreenFunction":
        return cls("van-fleck", potential=potential)

    @classmethod
    def sliced(cls, potential: Potential, slices: int) -> "GreenFunction":
        return cls("sliced", potential=potential, slices=slices)

    @classmethod
    def for_potential(cls, potential: Potential) -> "GreenFunction":
        """Closed form when available, van Vleck otherwise (exact for this class)."""
        if potential.is_free:
            return cls.free()
        if potential.is_unit_oscillator:
            return cls.oscillator()
        return cls.van_fleck(potential)

    def check_time(self, t: float) -> None:
        if t == 0:
            raise SingularTimeError(f"{self.kind} kernel singular at t = 0")
        if self.kind == "oscillator" and abs(np.sin(t)) <= self.caustic_threshold:
            raise CausticError(f"oscillator kernel undefined at t={t}")
        if self.kind in ("van-fleck", "sliced"):
            if t < 0:
                raise InvalidInputError(f"{self.kind} kernel requires t > 0")
            _check_conjugate(self.potential, t)

    def __call__(self, x, y, t: float):
        if self.kind == "free":
            return green_free(x, y, t)
        if self.kind == "oscillator":
            return green_oscillator(x, y, t, self.caustic_threshold)
        if self.kind == "van-fleck":
            return green_van_fleck(self.potential, x, y, t)
        if self.kind == "sliced":
            return green_sliced(self.potential, x, y, t, self.slices)
        raise InvalidInputError(f"unknown Green-function kind {self.kind!r}")

    def phase_rate_bound(self, xmax: float, ymax: float, t: float) -> float:
        """Upper bound on |d(phase)/dy| over |x| <= xmax, |y| <= ymax.

        Used to pick the quadrature resolution when the kernel multiplies
        a sampled wavefunction.
        """
        if self.kind == "free":
            return (xmax + ymax) / abs(t)
        if self.kind == "oscillator":
            st = abs(np.sin(t))
            return abs(np.cos(t) / st) * ymax + xmax / st
        # quadratic action: sample dS/dx1 at the domain corners
        pot = self.potential
        h = 1e-5
        rate = 0.0
        for cx in (-xmax, xmax):
            for cy in (-ymax, ymax):
                d = (closed_action(pot, cx, cy + h, t) - closed_action(pot, cx, cy - h, t)) / (2 * h)
                rate = max(rate, abs(float(d)))
        return rate
