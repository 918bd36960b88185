"""Teleportation two ways: exact collapse on a statevector, and state
selection from an ensemble of hidden-axis EPR pairs, plus a CHSH harness to
compare them."""

__version__ = "0.1.0"

from .qcore import (
    CapacityError,
    DensityMatrix,
    DimensionError,
    InvariantError,
    PureState,
    Sign,
    UnitAxis,
    apply_one_qubit,
    axis_state,
    bloch_vector,
    fidelity,
    partial_trace,
    tensor,
)
from .bellspace import BellOutcome, MeasurementRecord, bell_basis, bell_measure, singlet, singlet_along
from .teleport import (
    PauliCorrection,
    TeleportTrial,
    bob_marginal_before_classical,
    correction_for,
    teleport_branch,
    teleport_once,
)
from .ensemble import (
    EnsembleTrial,
    HiddenPair,
    SelectionConfig,
    Submodel,
    acceptance_rate_analytic,
    ensemble_outcome,
    run_ensemble_teleport,
    sample_pair,
    state_select,
)
from .chsh import (
    ChshEstimate,
    EnsembleDeterministic,
    EnsembleMalus,
    OutcomeModel,
    QuantumSinglet,
    StatevectorSinglet,
    chsh_s,
    correlation,
    optimal_settings,
)
