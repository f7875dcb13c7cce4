"""Steady-state covariance and Wigner entropy-production budget of a driven two-mode Gaussian system."""

from .closedform import (
    ClosedFormCoefficients,
    coefficients,
    off_diagonal_covariances,
    resonance_case,
    total_current_closed,
    vacuum_components_closed,
)
from .entropy import (
    EntropyBudget,
    classical_limit_pi1,
    decompose,
    entropy_production_offdiag,
    entropy_production_trace,
    wigner_entropy,
)
from .errors import (
    ClosedFormConditioningWarning,
    ClosedFormDomainError,
    DivergenceError,
    InstabilityError,
    NumericalDegeneracyError,
    ParameterDomainError,
    TwoModeError,
)
from .lyapunov import CovarianceMatrix, evolve, solve_steady_state, symplectic_eigenvalues
from .model import (
    DerivedConstants,
    DriftDiffusion,
    StabilityReport,
    SystemParams,
    build_drift_diffusion,
    check_stability,
    derive_constants,
    resonant_delta,
    thermal_occupation,
)
from .pipeline import SteadyStateReport, analyze
from .sweep import SweepAxis, SweepSpec, preset, preset_point, run_sweep
from .trajectory import TrajectoryConfig, simulate_covariance

__version__ = "0.1.0"
