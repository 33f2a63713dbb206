"""Minimum delta-v finite-thrust orbit transfers in a central field.

The library propagates a reduced rotating-frame state/costate system with
bang-bang thrust switching, solves the transfer boundary value problems by
damped-Newton shooting, and cross-validates reduced trajectories against a
full-order inertial formulation with its vector first integral.
"""
from .model import (
    AdjointConstants,
    AdjointState,
    BoundaryOrbit,
    ConicElements,
    DatasetError,
    OrbitalState,
    PaperDataset,
    PhysicalConstants,
    TransferRow,
    Vehicle,
    elements_to_state,
    load_paper_dataset,
    state_to_elements,
)
from .dynamics import (
    ControlDirection,
    DynamicsError,
    ReducedDerivative,
    VrGuard,
    control_direction,
    hamiltonian_residual_reduced,
    initial_nu,
    initial_p_hat,
    normal_primer,
    primer_and_kappa,
    reduced_rhs,
    rhs10,
    thrust_accel,
)
from .integrator import (
    Arc,
    BurnSchedule,
    ImpactError,
    IntegrationOptions,
    PropagationError,
    PropagationResult,
    StopCondition,
    StopNotReachedError,
    TrajectorySample,
    propagate,
    write_trajectory_csv,
)
from .shooting import (
    GuessVector,
    InfeasibleGuessError,
    ProblemSpec,
    ShootingContext,
    ShootingError,
    Solution,
    SolverOptions,
    default_guess,
    residual_vector,
    solve,
    sweep,
)
from .oracle import (
    ConservationReport,
    DivergenceReport,
    InertialPoint,
    OracleError,
    PinesIntegral,
    compare_reduced_vs_full,
    embed_to_inertial,
    full_rhs,
    full_system_conservation,
    hamiltonian_full,
    pines_z,
)

__version__ = "0.1.0"

__all__ = [
    "AdjointConstants", "AdjointState", "Arc", "BoundaryOrbit",
    "BurnSchedule", "ConicElements", "ConservationReport",
    "ControlDirection", "DatasetError", "DivergenceReport", "DynamicsError",
    "GuessVector", "ImpactError", "InertialPoint", "InfeasibleGuessError",
    "IntegrationOptions", "OracleError", "OrbitalState", "PaperDataset",
    "PhysicalConstants", "PinesIntegral", "ProblemSpec", "PropagationError",
    "PropagationResult", "ReducedDerivative", "ShootingContext",
    "ShootingError", "Solution", "SolverOptions", "StopCondition",
    "StopNotReachedError", "TrajectorySample", "TransferRow", "Vehicle",
    "VrGuard", "compare_reduced_vs_full", "control_direction",
    "default_guess", "elements_to_state", "embed_to_inertial", "full_rhs",
    "full_system_conservation", "hamiltonian_full",
    "hamiltonian_residual_reduced", "initial_nu", "initial_p_hat",
    "load_paper_dataset", "normal_primer",
    "pines_z", "primer_and_kappa", "propagate", "reduced_rhs", "rhs10",
    "residual_vector", "solve", "state_to_elements", "sweep",
    "thrust_accel", "write_trajectory_csv",
]
