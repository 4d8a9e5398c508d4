"""FFT-based linear stencil computations.

Evolves grid data ``T`` timesteps at once by exponentiating the stencil's
spectrum, with a divide-and-conquer correction for Dirichlet boundaries and
naive looping solvers as reference.
"""

from fftstencil._backend import NAME as BACKEND
from fftstencil._config import get_threads, set_threads
from fftstencil.aperiodic import (
    DEFAULT_CUTOFF,
    FallbackRequired,
    recursive_boundary,
    roi_width,
    solve_aperiodic,
)
from fftstencil.grid import (
    BandGrid,
    BoundaryRule,
    FieldGrid,
    GridShape,
    StencilKernel,
    dist_to_boundary,
    scatter_band,
    slice_band,
)
from fftstencil.gridio import read_grid, write_grid
from fftstencil.oracle import (
    dense_stencil_matrix,
    evolve_aperiodic_naive,
    evolve_periodic_naive,
    step_aperiodic,
    step_periodic,
)
from fftstencil.periodic import (
    NumericalBlowupError,
    solve_periodic,
    solve_periodic_implicit,
    solve_periodic_vector,
)
from fftstencil.problem import ProblemSpec, load_spec
from fftstencil.spectral import (
    ComplexGrid,
    DiagonalSpectrum,
    hadamard,
    multi_fft,
    multi_ifft,
    pow_spectrum,
    pseudo_inverse_spectrum,
    spectrum_from_kernel,
)
from fftstencil.stencils import BUILTIN_STENCILS, builtin_stencil

__version__ = "0.1.0"
