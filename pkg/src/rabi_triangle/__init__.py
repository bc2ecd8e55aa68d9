"""Phase diagram, quantum Fisher information and measurement precision of a
three-cavity Rabi ring with an artificial gauge phase, validated against a
truncated-Fock exact-diagonalization oracle."""

__version__ = "0.1.0"

from .errors import (
    AmbiguousPhase,
    ConfigError,
    DegenerateGroundState,
    DimensionTooLarge,
    DomainError,
    DynamicalInstability,
    GapClosed,
    InsufficientPoints,
    NoConvergence,
    OutsideFSP,
    RabiTriangleError,
    StepTooLarge,
    ZeroVariance,
)
from .meanfield import (
    Displacement,
    csp_displacement,
    energy_rescaled,
    fsp_displacement,
    stationarity_residual,
    zero_displacement,
)
from .model import (
    ModelParams,
    PhaseKind,
    PhaseLabel,
    Q_VALUES,
    boundary_g1c,
    classify_phase,
    critical_theta,
    min_boundary,
)
from .observables import (
    GaussianCavityState,
    MeasurementResult,
    PhotonNumberResult,
    inverted_variance,
    momentum_state,
    photon_number,
    transform_state,
)
from .oracle import (
    EdResult,
    FockConfig,
    build_hamiltonian,
    ed_point,
    gaussian_overlap_qfi,
    ground_state,
    photon_current,
    qfi_fidelity,
)
from .qfi import QfiResult, derivative_lambda_over_delta, qfi, qfi_csp, qfi_fsp, qfi_np
from .quadratic import (
    MomentumModes,
    SymplecticSolution,
    build_csp_matrix,
    csp_modes,
    fsp_kappa,
    fsp_modes,
    np_modes,
    symplectic_diagonalize,
)
from .scaling import (
    ExponentFit,
    SweepTable,
    adiabatic_rate_bound,
    fit_exponent,
    heisenberg_verdict,
    sweep,
)
