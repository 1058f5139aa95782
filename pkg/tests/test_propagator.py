import numpy as np
import pytest

from tomoprop.errors import InvalidInputError, UnsupportedPotentialError
from tomoprop.greens import FREE, OSCILLATOR, GreenFunction, Potential
from tomoprop.grids import UniformGrid
from tomoprop.propagator import (
    KernelFourierQuery,
    check_composition,
    compare_tomograms,
    evolve_pullback,
    evolve_via_green,
    kernel_fourier,
    kernel_with_offset,
)
from tomoprop.states import GaussianPacket, evolve_wavefunction, make_state
from tomoprop.tomography import angle_grid, tomogram_from_wavefunction

X_GRID = UniformGrid(-12.0, 12.0, 241)
THETA = angle_grid(96)


@pytest.fixture(scope="module")
def packet_tomogram():
    psi = make_state(GaussianPacket(1.0, 0.5, 1.0))
    return tomogram_from_wavefunction(psi, X_GRID, THETA)


def test_pullback_free_matches_schroedinger_evolution(packet_tomogram):
    t = 0.6
    psi = make_state(GaussianPacket(1.0, 0.5, 1.0))
    psi_t = evolve_wavefunction(psi, GreenFunction.free(), t)
    reference = tomogram_from_wavefunction(psi_t, X_GRID, THETA)
    evolved = evolve_pullback(packet_tomogram, FREE, t)
    assert compare_tomograms(evolved, reference).linf < 1e-3


def test_pullback_oscillator_matches_schroedinger_evolution(packet_tomogram):
    t = 0.7
    psi = make_state(GaussianPacket(1.0, 0.5, 1.0))
    psi_t = evolve_wavefunction(psi, GreenFunction.oscillator(), t)
    reference = tomogram_from_wavefunction(psi_t, X_GRID, THETA)
    evolved = evolve_pullback(packet_tomogram, OSCILLATOR, t)
    assert compare_tomograms(evolved, reference).linf < 1e-3


def test_pullback_composition_exact(packet_tomogram):
    for potential in (FREE, OSCILLATOR):
        report = check_composition("pullback", potential, 0.5, 0.5, packet_tomogram)
        assert report.linf < 1e-10


def test_pullback_invertible(packet_tomogram):
    for potential in (FREE, OSCILLATOR):
        back = evolve_pullback(evolve_pullback(packet_tomogram, potential, 0.8), potential, -0.8)
        assert np.abs(back.values - packet_tomogram.values).max() < 1e-10


def test_pullback_rejects_other_potentials(packet_tomogram):
    with pytest.raises(UnsupportedPotentialError):
        evolve_pullback(packet_tomogram, Potential(1.0, 0.3), 0.5)


def test_green_zero_time_roundtrip(packet_tomogram):
    out = evolve_via_green(packet_tomogram, GreenFunction.free(), 0.0)
    assert compare_tomograms(out, packet_tomogram).linf < 1e-3


def test_slice_norms_preserved_by_pullback(packet_tomogram):
    evolved = evolve_pullback(packet_tomogram, OSCILLATOR, 1.1)
    assert np.abs(evolved.slice_norms() - 1.0).max() < 1e-6


# --- kernel Fourier component ------------------------------------------------


def analytic_free_kernel(k, mu, nu, mu_p, nu_p, t, eps):
    """Closed form of the damped free-particle kernel component.

    Both Green factors are Gaussian chirps, so the double integral is a
    product of two 1D Gaussian Fourier integrals computed analytically.
    """
    c1 = 0.5 * k * nu - k * nu_p
    c2 = -0.5 * k * nu
    gamma_a = k * (nu - nu_p) / t + k * mu
    gamma_z = -k * (nu - nu_p) / t - k * mu_p
    const = (c1**2 - c2**2) / (2.0 * t) - 0.5 * k * k * mu_p * nu_p
    amp = 1.0 / (2.0 * np.pi * t)
    gaussians = (np.pi / eps) * np.exp(-(gamma_a**2 + gamma_z**2) / (4.0 * eps))
    return k**2 / (2.0 * np.pi) * amp * np.exp(1j * const) * gaussians


def test_kernel_matches_analytic_free_oracle():
    q = KernelFourierQuery(1.0, 0.3, 0.4, 0.3, 0.7, 1.0, GreenFunction.free())
    got = kernel_fourier(q, half_width=150.0, points=1501)
    want = analytic_free_kernel(1.0, 0.3, 0.4, 0.3, 0.7, 1.0, 1e-3)
    assert abs(got - want) / abs(want) < 1e-4


def test_kernel_scaling_identity_free():
    green = GreenFunction.free()
    for k in (0.5, 2.0):
        q1 = KernelFourierQuery(k, 0.3, 0.4, 0.25, 0.7, 1.0, green)
        q2 = KernelFourierQuery(1.0, k * 0.3, k * 0.4, k * 0.25, k * 0.7, 1.0, green)
        v1 = kernel_fourier(q1)
        v2 = kernel_fourier(q2)
        assert abs(v1 - k**2 * v2) <= 1e-6 * max(abs(v1), 1.0)


def test_kernel_offset_phase_rule():
    q = KernelFourierQuery(1.3, 0.3, 0.4, 0.25, 0.7, 1.0, GreenFunction.free())
    base = kernel_fourier(q)
    shifted = kernel_with_offset(q, 0.9)
    assert shifted == pytest.approx(np.exp(1.3j * 0.9) * base)


def test_kernel_query_validation():
    green = GreenFunction.free()
    with pytest.raises(InvalidInputError):
        KernelFourierQuery(0.0, 0.3, 0.4, 0.25, 0.7, 1.0, green)
    with pytest.raises(InvalidInputError):
        KernelFourierQuery(1.0, 0.3, 0.4, 0.25, 0.7, 1.0, green, damping=0.0)


def test_kernel_deterministic():
    q = KernelFourierQuery(0.8, 0.1, 0.9, 0.4, 0.2, 0.7, GreenFunction.free())
    assert kernel_fourier(q) == kernel_fourier(q)


def test_compare_requires_matching_grids(packet_tomogram):
    psi = make_state("ho_ground")
    other = tomogram_from_wavefunction(psi, UniformGrid(-8.0, 8.0, 101), angle_grid(48))
    with pytest.raises(InvalidInputError):
        compare_tomograms(packet_tomogram, other)
