"""Stochastic port-Hamiltonian car-following on a periodic ring.

N vehicles interact through a distance potential and speed alignment,
optionally steered by a constant commanded speed or a gap-feedback law,
and driven by independent Brownian noise.  The package integrates the
SDE, computes the drift spectrum in closed form through the circulant
block structure, evaluates exact and sufficient stability conditions for
the gap-feedback regime, and post-processes trajectories into the
standard observables (mean speed, speed variance, energy).
"""

from .errors import (
    EigenSolverError,
    InvalidInputError,
    NumericalBlowupError,
    UnsupportedOperationError,
)
from .model import (
    ClosedLoop,
    ControlRegime,
    CustomDerivative,
    ModelParams,
    OpenLoop,
    PhsMatrices,
    PotentialSpec,
    Quadratic,
    State,
    Uncontrolled,
    build_matrices,
    drift,
    equilibrium_speed,
    gaps,
    hamiltonian,
    hamiltonian_gradient,
    quadratic_potential,
    regime_speed_shift,
    ring_difference_matrix,
    speed_gaps,
)
from .scenario import Scenario, load_scenario, preset, write_scenario
from .sde import (
    Explicit,
    SimConfig,
    TimeSeries,
    UniformStationary,
    UniformZeroSpeed,
    derive_run_seed,
    initial_state,
    max_gap_closure_error,
    run_ensemble,
    simulate,
    step,
    step_noise,
)
from .spectral import (
    ModeIndex,
    Spectrum,
    StabilityReport,
    complex_hurwitz_stable,
    dense_eigen_oracle,
    deviation_matrix,
    eigenvalues,
    eigenvalues_closed_loop,
    eigenvalues_open_loop,
    eigenvalues_uncontrolled,
    exact_stability,
    match_distances,
    mu,
    spectral_abscissa_nonzero,
    stability_report,
    sufficient_stability,
)
from .stats import MomentLaw, ObservableSeries, deviation_process, mean_speed_law, observables

__version__ = "0.1.0"

__all__ = [
    "ClosedLoop",
    "ControlRegime",
    "CustomDerivative",
    "EigenSolverError",
    "Explicit",
    "InvalidInputError",
    "ModeIndex",
    "ModelParams",
    "MomentLaw",
    "NumericalBlowupError",
    "ObservableSeries",
    "OpenLoop",
    "PhsMatrices",
    "PotentialSpec",
    "Quadratic",
    "Scenario",
    "SimConfig",
    "Spectrum",
    "StabilityReport",
    "State",
    "TimeSeries",
    "Uncontrolled",
    "UniformStationary",
    "UniformZeroSpeed",
    "UnsupportedOperationError",
    "build_matrices",
    "complex_hurwitz_stable",
    "dense_eigen_oracle",
    "derive_run_seed",
    "deviation_matrix",
    "deviation_process",
    "drift",
    "eigenvalues",
    "eigenvalues_closed_loop",
    "eigenvalues_open_loop",
    "eigenvalues_uncontrolled",
    "equilibrium_speed",
    "exact_stability",
    "gaps",
    "hamiltonian",
    "hamiltonian_gradient",
    "initial_state",
    "load_scenario",
    "match_distances",
    "max_gap_closure_error",
    "mean_speed_law",
    "mu",
    "observables",
    "preset",
    "quadratic_potential",
    "regime_speed_shift",
    "ring_difference_matrix",
    "run_ensemble",
    "simulate",
    "spectral_abscissa_nonzero",
    "speed_gaps",
    "stability_report",
    "step",
    "step_noise",
    "sufficient_stability",
    "write_scenario",
]
