"""Probability-representation toolkit for quantum states.

Maps wavefunctions to symplectic tomograms, inverts the map back to
density matrices, and evolves tomograms in time through four
cross-validating routes: exact frame pullbacks, quantum propagators,
sliced path integrals with a quasiclassical approximation, and the
characteristic flow of the tomographic transport equation.
"""

from .errors import (
    CausticError,
    DegenerateBVPError,
    InvalidFrameError,
    InvalidInputError,
    NumericalDomainError,
    SingularTimeError,
    TomopropError,
    UnsupportedPotentialError,
    UnsupportedStateError,
)
from .greens import (
    FREE,
    OSCILLATOR,
    GreenFunction,
    Potential,
    action_of_path,
    classical_trajectory,
    closed_action,
    green_free,
    green_oscillator,
    green_sliced,
    green_van_fleck,
)
from .grids import UniformGrid, integrate_samples, trapezoid_weights
from .propagator import (
    ComparisonReport,
    KernelFourierQuery,
    check_composition,
    compare_tomograms,
    evolve_pullback,
    evolve_via_green,
    kernel_fourier,
    kernel_with_offset,
)
from .states import (
    DensityMatrix,
    GaussianPacket,
    HarmonicEigenstate,
    Superposition,
    WaveFunction,
    density_from_wavefunction,
    evolve_wavefunction,
    hermite_functions,
    make_state,
    parse_state_spec,
)
from .tomography import (
    CONVENTION_VERSION,
    Tomogram,
    angle_grid,
    density_from_tomogram,
    optical_slice,
    tomogram_from_density,
    tomogram_from_wavefunction,
)
from .transport import (
    BargmannPoint,
    TransportPDE,
    bargmann_coords,
    characteristic_flow,
    evolve_optical,
    frame_coords,
    reduce_evolution_equation,
    solve_characteristics,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
