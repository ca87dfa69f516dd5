"""Two-mode quantum Rabi model: exact ground state, TRWA, and g detection."""

from .detection import (
    PointReport,
    SweepResult,
    estimate_g,
    evaluate_point,
    fidelities,
    na_trwa,
    nb_exact,
    nb_slope,
    nb_trwa,
    run_sweep,
)
from .errors import (
    BasisMismatch,
    InvalidParameters,
    NoConvergence,
    NonMonotoneBracket,
    NotConverged,
    OutOfRange,
    SingularDenominator,
    SingularJacobian,
    TruncationInsufficient,
    TwoRabiError,
)
from .exact import GroundStateResult, TruncationConfig, ground_state, low_spectrum
from .fock import BasisKind, BasisSpec, Mode, OperatorMatrix, QuantumState, Qubit
from .hamiltonian import (
    ModelParams,
    build_local_hamiltonian,
    build_supermode_hamiltonian,
    local_number_op_in_supermode_basis,
)
from .trwa import TrwaSolution, build_trwa_state, rwa_ground, solve_self_consistent, trwa_energy
