"""Heralded entangled-state preparation with a qudit-ancilla parity module."""

from .linalg import (
    Ket,
    Operator,
    apply,
    basis_ket,
    canonical_phase,
    digits_to_index,
    fidelity,
    fourier_ket,
    hadamard,
    hamming_weights,
    identity,
    index_to_digits,
    inner,
    omega,
    pauli_x,
    pauli_z,
    plus_state,
    tensor,
)
from .module import (
    CouplingKind,
    MeasurementBasis,
    ModuleConfig,
    OutcomeRecord,
    ProjectorSet,
    ResourceLimitError,
    build_projectors,
    couple_once,
    default_ancilla,
    outcome_distribution,
    photonic_module_action,
    projector_dim,
    run_module,
)
from .solver import (
    AmplitudeSolution,
    DegeneracyStructure,
    EigenphaseSpec,
    OrbitReport,
    admissible_state,
    brute_force_feasible,
    brute_force_min_deviation,
    check_orbit,
    classify_eigenphases,
    reconstruct_general,
    roots_of_unity_spec,
    solve_amplitudes,
)
from .states import (
    ClassificationResult,
    DickeDecomposition,
    ExpectationReport,
    Family,
    bitflip_all,
    classify,
    dicke,
    dicke_decompose,
    dicke_sum,
    expectations,
    g,
    g_general,
    ghz,
    predicted_branch,
    squared_weight_ratios,
    w,
)

__version__ = "0.1.0"
