"""Matter-wave mediated tunneling of a single lattice atom.

A driven atom trapped at N distant lattice sites couples to the free
matter-wave continuum of its untrapped internal state.  Depending on the
detuning, the drive strength and the site spacing, the emitted wave forms
bound states below the band (BOC) or embedded in it (BIC); these control
whether the atom relaxes, freezes, or oscillates coherently between sites.

Modules
-------
model     dimensionless scenario description and unit conversions
kernel    spectral density, memory kernel, Laplace transform, branch split
spectrum  bound-state search, sweeps, phase diagrams
dynamics  Volterra time evolution, Markovian limit, residue asymptotics
oracle    brute-force discretized-continuum reference
cli       command-line entry point
"""

from .model import (
    ConfigError,
    LatticeConfig,
    UnitSystem,
    uniform_chain,
    validate,
)
from .kernel import (
    BandEdgeError,
    BranchCutError,
    BranchDecomposition,
    BranchTrackingError,
    kernel_time,
    laplace_kernel,
    spectral_density,
)
from .spectrum import (
    BicCandidate,
    BoundState,
    PhaseDiagramGrid,
    SpectrumError,
    SpectrumScan,
    all_bound_states,
    bic_candidates,
    find_bics,
    find_bocs,
    phase_diagram,
    scan_spectrum,
)
from .dynamics import (
    AmplitudeTrajectory,
    AsymptoticForm,
    StepSizeError,
    asymptotic_form,
    compare_longtime,
    markov_solution,
    solve_volterra,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeTrajectory",
    "AsymptoticForm",
    "BandEdgeError",
    "BicCandidate",
    "BoundState",
    "BranchCutError",
    "BranchDecomposition",
    "BranchTrackingError",
    "ConfigError",
    "LatticeConfig",
    "PhaseDiagramGrid",
    "SpectrumError",
    "SpectrumScan",
    "StepSizeError",
    "UnitSystem",
    "all_bound_states",
    "asymptotic_form",
    "bic_candidates",
    "compare_longtime",
    "find_bics",
    "find_bocs",
    "kernel_time",
    "laplace_kernel",
    "markov_solution",
    "phase_diagram",
    "scan_spectrum",
    "solve_volterra",
    "spectral_density",
    "uniform_chain",
    "validate",
]
