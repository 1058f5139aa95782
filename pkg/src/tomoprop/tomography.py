"""Invertible map between quantum states and marginal distributions.

Sign conventions are frozen (see CONVENTIONS.md): the forward transform
uses exp(i mu y^2 / (2 nu) - i X y / nu) inside the squared integral, the
inverse uses exp(+i (X - mu (x + x') / 2)).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import resample

from .errors import InvalidFrameError, InvalidInputError
from .grids import UniformGrid, integrate_samples, trapezoid_weights
from .states import DensityMatrix, WaveFunction

EPS_THETA = 1e-3
DEFAULT_X_GRID = UniformGrid(-14.0, 14.0, 351)
DEFAULT_THETA_COUNT = 180
CONVENTION_VERSION = "tomoprop-conventions-1"

_OVERSAMPLE = 2.5
_MAX_FINE = 1 << 18


def angle_grid(count: int = DEFAULT_THETA_COUNT) -> UniformGrid:
    """Uniform angles 0, d, ..., pi - d with d = pi / count (all inside [0, pi))."""
    return UniformGrid(0.0, np.pi * (count - 1) / count, count)


@dataclass(frozen=True)
class Tomogram:
    """Marginal distribution w(X, theta) with mu = cos theta, nu = sin theta.

    `values` has shape (n_theta, n_x).  Off-lattice frames are served by
    `evaluate`, which applies the homogeneity law w(aX, a mu, a nu) =
    w(X, mu, nu)/|a| before any interpolation, so the scaling identity is
    algebraically exact.  A tomogram produced by a coordinate pullback
    keeps a reference to its base together with the linear frame map, so
    repeated pullbacks compose exactly at the coordinate level.
    """

    x_grid: UniformGrid
    theta_grid: UniformGrid
    values: np.ndarray
    base: "Tomogram | None" = None
    frame_map: np.ndarray | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.theta_grid.count, self.x_grid.count):
            raise InvalidInputError(
                f"tomogram values shape {vals.shape} does not match grids"
            )
        tol = self.meta.get("negative_tol", 1e-10)
        if vals.min() < -tol:
            raise InvalidInputError(
                f"tomogram has negative values down to {vals.min():.3g}"
            )
        object.__setattr__(self, "values", np.maximum(vals, 0.0))
        last = self.theta_grid.upper
        if self.theta_grid.lower < 0 or last >= np.pi:
            raise InvalidInputError("theta grid must lie inside [0, pi)")

    @cached_property
    def _spline(self) -> CubicSpline:
        # one cubic spline per theta slice, vectorized over slices
        return CubicSpline(self.x_grid.points, self.values, axis=1)

    def slice_norms(self) -> np.ndarray:
        return integrate_samples(self.values, self.x_grid.step)

    def _interp_rows(self, rows: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Cubic-spline values of slice `rows[q]` at positions `u[q]`; 0 outside."""
        x = self.x_grid.points
        c = self._spline.c  # (4, n_x - 1, n_theta)
        seg = np.clip(np.searchsorted(x, u, side="right") - 1, 0, x.size - 2)
        tloc = u - x[seg]
        out = c[0, seg, rows]
        for k in range(1, 4):
            out = out * tloc + c[k, seg, rows]
        inside = (u >= x[0]) & (u <= x[-1])
        return np.where(inside, out, 0.0)

    def evaluate(self, X, mu, nu):
        """w at an arbitrary frame (X, mu, nu) with s = sqrt(mu^2+nu^2) > 0.

        Uses the homogeneity law to rescale to the unit circle, the parity
        identity w(X, theta + pi) = w(-X, theta) to fold angles into
        [0, pi), then interpolates (cubic in X, linear in theta).
        """
        if self.base is not None:
            q = self.frame_map @ np.stack(np.broadcast_arrays(
                np.asarray(X, dtype=float),
                np.asarray(mu, dtype=float),
                np.asarray(nu, dtype=float),
            )).reshape(3, -1)
            shape = np.broadcast_shapes(np.shape(X), np.shape(mu), np.shape(nu))
            out = self.base.evaluate(q[0], q[1], q[2])
            return out.reshape(shape) if shape else float(out.reshape(()))

        X, mu, nu = np.broadcast_arrays(
            np.asarray(X, dtype=float),
            np.asarray(mu, dtype=float),
            np.asarray(nu, dtype=float),
        )
        shape = X.shape
        X, mu, nu = X.ravel(), mu.ravel(), nu.ravel()
        s = np.hypot(mu, nu)
        if np.any(s == 0):
            raise InvalidFrameError("tomogram frame mu = nu = 0 is degenerate")
        theta = np.arctan2(nu, mu)
        tm = np.mod(theta, np.pi)
        flip = np.round((theta - tm) / np.pi).astype(int) % 2 == 1
        u = np.where(flip, -X, X) / s

        n = self.theta_grid.count
        dtheta = np.pi / n
        f = tm / dtheta
        j0 = np.minimum(f.astype(int), n - 1)
        frac = f - j0
        j1 = j0 + 1
        wrap = j1 == n
        u1 = np.where(wrap, -u, u)
        j1 = np.where(wrap, 0, j1)

        v0 = self._interp_rows(j0, u)
        v1 = self._interp_rows(j1, u1)
        out = np.maximum((1.0 - frac) * v0 + frac * v1, 0.0) / s
        return out.reshape(shape) if shape else float(out.reshape(()))

    def with_frame_map(self, matrix: np.ndarray) -> "Tomogram":
        """Pullback tomogram evaluating the base at `matrix @ (X, mu, nu)`.

        Lattice values are materialized for export and norm checks; the
        evaluation path composes maps exactly.
        """
        base = self.base if self.base is not None else self
        composed = (self.frame_map @ matrix) if self.frame_map is not None else matrix
        th = self.theta_grid.points
        Xg, Th = np.meshgrid(self.x_grid.points, th, indexing="xy")
        q = composed @ np.stack([Xg.ravel(), np.cos(Th).ravel(), np.sin(Th).ravel()])
        vals = base.evaluate(q[0], q[1], q[2]).reshape(self.theta_grid.count, self.x_grid.count)
        return Tomogram(
            x_grid=self.x_grid,
            theta_grid=self.theta_grid,
            values=vals,
            base=base,
            frame_map=composed,
            meta=dict(self.meta),
        )


def evaluate(tomogram: Tomogram, X, mu, nu):
    """Module-level alias for Tomogram.evaluate."""
    return tomogram.evaluate(X, mu, nu)


# --- forward transforms ------------------------------------------------------


def _transform_state_batch(
    grid: UniformGrid,
    states: np.ndarray,
    weights: np.ndarray,
    x_grid: UniformGrid,
    theta_grid: UniformGrid,
    eps_theta: float,
) -> np.ndarray:
    """Tomogram values for rho = sum_k weights[k] |psi_k><psi_k|.

    Per theta slice the inner chirped Fourier sum is evaluated on an
    FFT-upsampled position grid fine enough to resolve the phase
    mu y^2/(2 nu) - X y/nu; accuracy target 1e-6 against a 4x-resolution
    reference.
    """
    X = x_grid.points
    n_pos = grid.count
    period = n_pos * grid.step
    ymax = max(abs(grid.lower), abs(grid.upper))
    xabs = max(abs(x_grid.lower), abs(x_grid.upper))
    out = np.empty((theta_grid.count, x_grid.count))
    limit_splines = None
    for j, theta in enumerate(theta_grid.points):
        mu, nu = np.cos(theta), np.sin(theta)
        if abs(nu) < eps_theta:
            # nu -> 0 limit: w(X, mu, 0) = |psi(X/mu)|^2 / |mu|
            if limit_splines is None:
                # spline an upsampled copy so the interpolation error stays
                # far below the quadrature error of the oscillatory slices
                n_fine = min(8 * n_pos, _MAX_FINE)
                fine = resample(states, n_fine, axis=1)
                y_fine = grid.lower + (period / n_fine) * np.arange(n_fine)
                limit_splines = CubicSpline(y_fine, fine, axis=1)
            q = X / mu
            vals = limit_splines(q)
            vals[:, (q < grid.lower) | (q > grid.upper)] = 0.0
            out[j] = weights @ (np.abs(vals) ** 2) / abs(mu)
            continue
        max_freq = (abs(mu) * ymax + xabs) / abs(nu)
        needed = int(np.ceil(period * max_freq * _OVERSAMPLE / (2.0 * np.pi)))
        n_fine = min(max(n_pos, needed), _MAX_FINE)
        if n_fine == n_pos:
            y = grid.points
            fine = states
            step = grid.step
        else:
            fine = resample(states, n_fine, axis=1)
            step = period / n_fine
            y = grid.lower + step * np.arange(n_fine)
        chirped = fine * np.exp(0.5j * mu * y**2 / nu) * step
        amp = np.zeros((states.shape[0], X.size), dtype=np.complex128)
        chunk = 1 << 13
        for lo in range(0, y.size, chunk):
            hi = min(lo + chunk, y.size)
            amp += chirped[:, lo:hi] @ np.exp(-1j * np.outer(y[lo:hi], X) / nu)
        out[j] = weights @ (np.abs(amp) ** 2) / (2.0 * np.pi * abs(nu))
    return out


def _normalize_slices(values: np.ndarray, x_step: float) -> np.ndarray:
    norms = integrate_samples(values, x_step)
    if np.any(norms <= 0.5):
        warnings.warn("tomogram slice mass far from 1; skipping renormalization", stacklevel=3)
        return values
    return values / norms[:, None]


def tomogram_from_wavefunction(
    psi: WaveFunction,
    x_grid: UniformGrid | None = None,
    theta_grid: UniformGrid | None = None,
    *,
    eps_theta: float = EPS_THETA,
    normalize_slices: bool = True,
) -> Tomogram:
    """Forward transform of a pure state.

    w(X, cos t, sin t) = |int psi(y) exp(i mu y^2/(2 nu) - i X y/nu) dy|^2
    / (2 pi |nu|), with the |psi(X/mu)|^2/|mu| limit near nu = 0.
    """
    x_grid = x_grid or DEFAULT_X_GRID
    theta_grid = theta_grid or angle_grid()
    vals = _transform_state_batch(
        psi.grid,
        psi.values[None, :],
        np.array([1.0]),
        x_grid,
        theta_grid,
        eps_theta,
    )
    if normalize_slices:
        vals = _normalize_slices(vals, x_grid.step)
    return Tomogram(x_grid=x_grid, theta_grid=theta_grid, values=vals)


def tomogram_from_density(
    rho: DensityMatrix,
    x_grid: UniformGrid | None = None,
    theta_grid: UniformGrid | None = None,
    *,
    eps_theta: float = EPS_THETA,
    normalize_slices: bool = True,
    weight_floor: float = 1e-6,
    max_components: int = 16,
) -> Tomogram:
    """Forward transform of a (possibly mixed) density matrix.

    The bilinear transform is evaluated through the spectral decomposition
    of rho: each retained eigenvector goes through the pure-state
    transform and the tomogram is the weighted sum.  For a pure-state
    projector this reduces exactly to the wavefunction route.
    """
    x_grid = x_grid or DEFAULT_X_GRID
    theta_grid = theta_grid or angle_grid()
    h = rho.grid.step
    evals, evecs = np.linalg.eigh(rho.values)
    weights = evals * h  # integral-operator eigenvalues
    order = np.argsort(-np.abs(weights))
    keep = [k for k in order[:max_components] if abs(weights[k]) >= weight_floor]
    if not keep:
        raise InvalidInputError("density matrix has no significant spectral weight")
    states = (evecs[:, keep].T / np.sqrt(h)).astype(np.complex128)  # L2-normalized
    w = weights[keep]
    vals = _transform_state_batch(rho.grid, states, w, x_grid, theta_grid, eps_theta)
    if vals.min() < -1e-3:
        raise InvalidInputError(
            f"density matrix is too indefinite for a tomogram (min value {vals.min():.3g})"
        )
    vals = np.maximum(vals, 0.0)  # clamp before normalization so slices stay exact
    if normalize_slices:
        vals = _normalize_slices(vals, x_grid.step)
    return Tomogram(
        x_grid=x_grid,
        theta_grid=theta_grid,
        values=vals,
        meta={"components": len(keep)},
    )


# --- inverse transform -------------------------------------------------------


def _slice_characteristic(
    tomo: Tomogram, mu: np.ndarray, nu: np.ndarray
) -> np.ndarray:
    """K(mu, nu) = int w(X, mu, nu) exp(i X) dX for arrays of frames.

    Reduced by homogeneity to the characteristic function of the stored
    theta slices: K = chi_theta(+-s) with chi_theta(f) = int w(u, theta)
    exp(i f u) du, interpolated linearly between stored slices.
    """
    u = tomo.x_grid.points
    wu = trapezoid_weights(tomo.x_grid.count, tomo.x_grid.step)
    V = tomo.values
    n = tomo.theta_grid.count
    dtheta = np.pi / n

    mu = mu.ravel()
    nu_b = nu.ravel()
    s = np.hypot(mu, nu_b)
    theta = np.arctan2(nu_b, mu)
    tm = np.mod(theta, np.pi)
    flip = np.round((theta - tm) / np.pi).astype(int) % 2 == 1
    freq = np.where(flip, -s, s)

    f = tm / dtheta
    j0 = np.minimum(f.astype(int), n - 1)
    frac = f - j0
    j1 = j0 + 1
    wrap = j1 == n
    f1 = np.where(wrap, -freq, freq)
    j1 = np.where(wrap, 0, j1)

    out = np.empty(mu.size, dtype=np.complex128)
    chunk = 4096
    for lo in range(0, mu.size, chunk):
        hi = min(lo + chunk, mu.size)
        E0 = np.exp(1j * freq[lo:hi, None] * u[None, :]) * wu
        chi0 = np.einsum("qu,qu->q", V[j0[lo:hi]], E0)
        E1 = np.exp(1j * f1[lo:hi, None] * u[None, :]) * wu
        chi1 = np.einsum("qu,qu->q", V[j1[lo:hi]], E1)
        out[lo:hi] = (1.0 - frac[lo:hi]) * chi0 + frac[lo:hi] * chi1
    out[s == 0] = 1.0  # chi_theta(0) = 1 for every theta by normalization
    return out


def density_from_tomogram(
    tomo: Tomogram,
    target_grid: UniformGrid,
    *,
    mu_max: float = 40.0,
    mu_step: float = 0.05,
    eps_mu: float = 0.0,
    initial_band: float = 16.0,
    edge_threshold: float = 1e-8,
) -> DensityMatrix:
    """Inverse transform rho(x, x') = (1/2 pi) iint w(X, mu, x - x')
    exp(i (X - mu (x + x')/2)) dmu dX.

    The mu integral is truncated at |mu| <= mu_max with optional Gaussian
    damping exp(-eps_mu mu^2).  Computation exploits that the integrand
    depends on (x, x') only through nu = x - x' and sigma = x + x', both of
    which live on small difference/sum lattices of the target grid.  The mu
    band grows adaptively until the boundary integrand is negligible; if it
    is still large at mu_max an accuracy warning lands in the metadata.
    """
    x = target_grid.points
    n = target_grid.count
    h = target_grid.step
    nu_vals = np.arange(-(n - 1), n) * h
    sigma_vals = 2.0 * target_grid.lower + np.arange(2 * n - 1) * h

    band = min(initial_band, mu_max)
    while True:
        m_half = int(np.ceil(band / mu_step))
        mu_axis = np.arange(-m_half, m_half + 1) * mu_step
        Mu, Nu = np.meshgrid(mu_axis, nu_vals, indexing="ij")
        K = _slice_characteristic(tomo, Mu, Nu).reshape(Mu.shape)
        edge = max(np.abs(K[0]).max(), np.abs(K[-1]).max())
        peak = np.abs(K).max()
        edge_ratio = edge / peak if peak > 0 else 0.0
        if edge_ratio <= edge_threshold or band >= mu_max:
            break
        band = min(2.0 * band, mu_max)
    accuracy_warning = edge_ratio > edge_threshold

    w_mu = trapezoid_weights(mu_axis.size, mu_step)
    if eps_mu > 0:
        w_mu = w_mu * np.exp(-eps_mu * mu_axis**2)
    phases = np.exp(-0.5j * np.outer(mu_axis, sigma_vals))
    table = (K.T * w_mu) @ phases / (2.0 * np.pi)  # (n_nu, n_sigma)

    idx = np.arange(n)
    rho = table[(idx[:, None] - idx[None, :]) + (n - 1), idx[:, None] + idx[None, :]]
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(
        grid=target_grid,
        values=rho,
        meta={
            "accuracy_warning": bool(accuracy_warning),
            "mu_edge_ratio": float(edge_ratio),
            "mu_band": float(band),
        },
    )


def optical_slice(tomo: Tomogram, phi: float) -> np.ndarray:
    """Optical tomogram w(X, phi) = w(X, cos phi, sin phi) on the stored X grid.

    Angles are reduced mod 2 pi; the parity identity serves [pi, 2 pi).
    """
    phi = float(np.mod(phi, 2.0 * np.pi))
    return tomo.evaluate(tomo.x_grid.points, np.cos(phi), np.sin(phi))
