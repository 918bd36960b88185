"""Bell basis, singlets along arbitrary axes, and Bell-basis measurement."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .qcore import (
    TOL,
    _owned,
    DimensionError,
    InvariantError,
    PureState,
    Sign,
    UnitAxis,
    axis_state,
    tensor,
)

_R = 1.0 / np.sqrt(2.0)


class BellOutcome(enum.IntEnum):
    PSI_MINUS = 0
    PSI_PLUS = 1
    PHI_MINUS = 2
    PHI_PLUS = 3


_BELL_AMPLITUDES = np.array(
    [
        [0.0, _R, -_R, 0.0],  # Psi-
        [0.0, _R, _R, 0.0],  # Psi+
        [_R, 0.0, 0.0, -_R],  # Phi-
        [_R, 0.0, 0.0, _R],  # Phi+
    ],
    dtype=complex,
)
_BELL_AMPLITUDES.setflags(write=False)


@dataclass(frozen=True)
class MeasurementRecord:
    outcome: BellOutcome
    probability: float
    post_state: PureState


def singlet() -> PureState:
    return PureState(_BELL_AMPLITUDES[BellOutcome.PSI_MINUS])


def singlet_along(axis: UnitAxis) -> PureState:
    """(|+>|-> - |->|+>)/sqrt(2) with both kets quantized along the same ``axis``."""
    up, down = axis_state(axis, Sign.PLUS), axis_state(axis, Sign.MINUS)
    amps = (tensor(up, down).amplitudes - tensor(down, up).amplitudes) * _R
    return PureState(amps)


def bell_state(outcome: BellOutcome) -> PureState:
    return PureState(_BELL_AMPLITUDES[BellOutcome(outcome)])


def bell_basis() -> tuple[PureState, PureState, PureState, PureState]:
    """The four Bell states, ordered as ``BellOutcome``."""
    return tuple(bell_state(k) for k in BellOutcome)


def _pair_first(state: PureState, pair: tuple[int, int]) -> np.ndarray:
    """Amplitudes reshaped to (4, rest) with ``pair`` moved to the front, in order."""
    n = state.num_qubits
    i, j = pair
    if n != 3:
        raise DimensionError(f"Bell measurement acts on a 3-qubit state, got {n} qubits")
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"invalid qubit pair {pair!r}")
    if (i, j) == (0, 1):
        return state.amplitudes.reshape(4, -1)
    psi = np.moveaxis(state.amplitudes.reshape((2,) * n), (i, j), (0, 1))
    return psi.reshape(4, -1)


def _restore(block: np.ndarray, pair: tuple[int, int], n: int) -> np.ndarray:
    if tuple(pair) == (0, 1):
        return block.reshape(-1)
    psi = block.reshape((2,) * n)
    return np.moveaxis(psi, (0, 1), pair).reshape(-1)


def bell_branches(state: PureState, pair: tuple[int, int] = (0, 1)) -> np.ndarray:
    """Unnormalized remainder of ``state`` for each Bell outcome on ``pair``.

    Row k is (<B_k| x I)|state>, so its squared norm is the exact outcome
    probability.
    """
    return _BELL_AMPLITUDES.conj() @ _pair_first(state, pair)


def _branch_probabilities(branches: np.ndarray) -> np.ndarray:
    # |z|^2 summed over Bob's amplitudes, via the interleaved real/imag view
    return np.square(np.ascontiguousarray(branches).view(float)).sum(axis=1)


def bell_probabilities(state: PureState, pair: tuple[int, int] = (0, 1)) -> np.ndarray:
    return _branch_probabilities(bell_branches(state, pair))


def bell_project(state: PureState, outcome: BellOutcome, pair: tuple[int, int] = (0, 1)) -> MeasurementRecord:
    """Force ``outcome``: project and renormalize. Zero-probability branches raise."""
    outcome = BellOutcome(outcome)
    return _collapse(state, outcome, bell_branches(state, pair)[outcome], pair)


def _collapse(state: PureState, outcome: BellOutcome, branch: np.ndarray, pair) -> MeasurementRecord:
    prob = float(np.vdot(branch, branch).real)
    if prob <= TOL * TOL:
        raise InvariantError(f"outcome {outcome.name} has zero probability")
    block = _BELL_AMPLITUDES[outcome][:, None] * (branch / math.sqrt(prob))
    post = PureState(_owned(_restore(block, pair, state.num_qubits)))
    return MeasurementRecord(outcome, prob, post)


def bell_measure(state: PureState, pair: tuple[int, int], rng: np.random.Generator) -> MeasurementRecord:
    """Projective Bell measurement on ``pair`` of a 3-qubit state.

    Outcome probabilities are computed exactly; the stream supplies a single
    uniform that picks the branch.
    """
    branches = bell_branches(state, pair)
    probs = _branch_probabilities(branches).tolist()
    total = sum(probs)
    if abs(total - 1.0) > 1e-9:
        raise InvariantError(f"input state has degenerate norm {total!r}")
    u = rng.random() * total
    k, acc = 0, 0.0
    for k, p in enumerate(probs):
        acc += p
        if u < acc and p > TOL * TOL:
            break
    # rounding can leave u at the very top of the cdf: fall back to the last live branch
    while probs[k] <= TOL * TOL:
        k -= 1
    return _collapse(state, BellOutcome(k), branches[k], pair)
