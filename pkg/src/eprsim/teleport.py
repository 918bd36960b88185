"""Collapse-based teleportation on an exact three-qubit statevector.

Qubit 0 holds Alice's unknown input, qubits 1 and 2 the shared singlet;
qubit 2 travels to Bob.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .bellspace import BellOutcome, bell_branches, bell_measure, bell_project, bell_state, singlet
from .qcore import (
    I2,
    PAULI_X,
    PAULI_Z,
    DensityMatrix,
    DimensionError,
    PureState,
    _apply_gate,
    _owned,
    is_unitary,
    fidelity,
    tensor,
)

ALICE_PAIR = (0, 1)
BOB = 2
_SINGLET = singlet()
_BELL_CONJ = np.array([bell_state(k).amplitudes.conj() for k in BellOutcome])


class PauliCorrection(enum.Enum):
    IDENTITY = "I"
    Z = "Z"
    X = "X"
    ZX = "ZX"

    @property
    def matrix(self) -> np.ndarray:
        return _MATRICES[self.value]


# ZX: X acts first, then Z
_MATRICES = {"I": I2, "Z": PAULI_Z, "X": PAULI_X, "ZX": PAULI_Z @ PAULI_X}
assert all(is_unitary(m) for m in _MATRICES.values())


_CORRECTIONS = {
    BellOutcome.PSI_MINUS: PauliCorrection.IDENTITY,
    BellOutcome.PSI_PLUS: PauliCorrection.Z,
    BellOutcome.PHI_MINUS: PauliCorrection.X,
    BellOutcome.PHI_PLUS: PauliCorrection.ZX,
}


def correction_for(outcome: BellOutcome) -> PauliCorrection:
    return _CORRECTIONS[BellOutcome(outcome)]


@dataclass(frozen=True)
class TeleportTrial:
    input_state: PureState
    outcome: BellOutcome
    bob_before: PureState
    bob_corrected: PureState
    fidelity_out: float


def _check_input(state: PureState) -> None:
    if state.num_qubits != 1:
        raise DimensionError(f"teleportation input must be one qubit, got {state.num_qubits}")


def bob_qubit(post_state: PureState, outcome: BellOutcome) -> PureState:
    """Bob's qubit after Alice's pair has collapsed onto ``outcome``."""
    # post_state is |B_k> x |bob>, so one row of the Bell basis recovers Bob
    # with unit norm already
    return PureState(_owned(_BELL_CONJ[outcome] @ post_state.amplitudes.reshape(4, 2)))


def _finish(input_state: PureState, outcome: BellOutcome, post_state: PureState) -> TeleportTrial:
    before = bob_qubit(post_state, outcome)
    # correction matrices are fixed Paulis, validated once at import
    corrected = _apply_gate(correction_for(outcome).matrix, 0, before)
    return TeleportTrial(input_state, outcome, before, corrected, fidelity(input_state, corrected))


def teleport_once(input_state: PureState, rng: np.random.Generator) -> TeleportTrial:
    _check_input(input_state)
    joint = tensor(input_state, _SINGLET)
    record = bell_measure(joint, ALICE_PAIR, rng)
    return _finish(input_state, record.outcome, record.post_state)


def teleport_branch(input_state: PureState, outcome: BellOutcome) -> TeleportTrial:
    """Run the protocol with Alice's Bell outcome forced to ``outcome``."""
    _check_input(input_state)
    record = bell_project(tensor(input_state, _SINGLET), outcome, ALICE_PAIR)
    return _finish(input_state, record.outcome, record.post_state)


def outcome_probabilities(input_state: PureState) -> np.ndarray:
    """Exact Bell-outcome law, indexed by ``BellOutcome``."""
    _check_input(input_state)
    branches = bell_branches(tensor(input_state, _SINGLET), ALICE_PAIR)
    return np.einsum("ij,ij->i", branches.conj(), branches).real


def bob_marginal_before_classical(input_state: PureState) -> DensityMatrix:
    """Bob's state averaged over Alice's outcomes, before any message reaches him."""
    _check_input(input_state)
    branches = bell_branches(tensor(input_state, _SINGLET), ALICE_PAIR)
    # sum_k p_k |b_k><b_k| with unnormalized branches already carrying p_k
    rho = branches.T @ branches.conj()
    return DensityMatrix((rho + rho.conj().T) / 2)


def joint_state(input_state: PureState) -> PureState:
    return tensor(input_state, _SINGLET)


