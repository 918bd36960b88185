"""Statistical-ensemble teleportation by state selection.

Each source event emits a pair of photons quantized along one hidden axis
with opposite signs. Alice's photon can only pair up with a partner whose
hidden axis lies inside a cone of half-angle ``epsilon`` around her own
quantization axis; accepted events leave Bob holding a photon that was
already aligned at the source. Nothing collapses: Bob's side of every
calculation reads the hidden pair and his own inputs only.

Sign labels are taken relative to the hidden axis. The accepted partner
photon (photon 2) matches Alice's photon, so Alice's photon is described
with photon 2's sign label along her own axis; Bob's known correction maps
his photon onto that same label.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .qcore import (
    PureState,
    Sign,
    SignLike,
    UnitAxis,
    as_sign,
    axis_state,
    axis_state_amplitudes,
    fidelity,
)


class Submodel(enum.Enum):
    MALUS = "malus"
    DETERMINISTIC_SIGN = "det"


@dataclass(frozen=True)
class HiddenPair:
    axis: UnitAxis
    alice_sign: Sign
    bob_sign: Sign

    def __post_init__(self):
        object.__setattr__(self, "alice_sign", as_sign(self.alice_sign))
        object.__setattr__(self, "bob_sign", as_sign(self.bob_sign))
        if self.bob_sign != self.alice_sign.opposite:
            raise ValueError("hidden pair signs must be opposite")


@dataclass(frozen=True)
class SelectionConfig:
    epsilon: float
    outcome_submodel: Submodel = Submodel.MALUS

    def __post_init__(self):
        object.__setattr__(self, "outcome_submodel", Submodel(self.outcome_submodel))
        check_epsilon(self.epsilon)


@dataclass(frozen=True)
class EnsembleTrial:
    accepted: bool
    hidden_axis: UnitAxis
    bob_state: Optional[PureState] = None
    conditional_fidelity: Optional[float] = None


@dataclass(frozen=True)
class EnsembleSummary:
    n_trials: int
    n_accepted: int
    fidelity_sum: float
    infidelity_sum: float
    trials: tuple[EnsembleTrial, ...] = field(default=(), repr=False)

    @property
    def acceptance_rate(self) -> float:
        return self.n_accepted / self.n_trials

    @property
    def acceptance_std_error(self) -> float:
        p = self.acceptance_rate
        return float(np.sqrt(p * (1.0 - p) / self.n_trials))

    @property
    def mean_conditional_fidelity(self) -> Optional[float]:
        return self.fidelity_sum / self.n_accepted if self.n_accepted else None

    @property
    def mean_conditional_infidelity(self) -> Optional[float]:
        return self.infidelity_sum / self.n_accepted if self.n_accepted else None


def check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not (0.0 < epsilon <= np.pi):
        raise ValueError(f"epsilon must lie in (0, pi], got {epsilon!r}")
    return epsilon


def _pairs_from_uniforms(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    z = 2.0 * u[:, 0] - 1.0
    phi = 2.0 * np.pi * u[:, 1]
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, 1.0))
    xyz = np.column_stack((r * np.cos(phi), r * np.sin(phi), z))
    alice_signs = np.where(u[:, 2] < 0.5, 1, -1)
    return xyz, alice_signs


def sample_pairs(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Batch of hidden pairs as (axes of shape (n, 3), photon-2 signs of shape (n,)).

    Three uniforms per pair: cos(theta), azimuth, sign coin. Drawing a batch
    consumes the stream exactly as ``n`` calls to ``sample_pair`` would.
    """
    return _pairs_from_uniforms(rng.random((n, 3)))


def sample_pair(rng: np.random.Generator) -> HiddenPair:
    xyz, signs = _pairs_from_uniforms(rng.random((1, 3)))
    alice = Sign(int(signs[0]))
    return HiddenPair(UnitAxis.from_vector(xyz[0]), alice, alice.opposite)


def _accept(dots: np.ndarray, epsilon: float) -> np.ndarray:
    return np.arccos(np.clip(dots, -1.0, 1.0)) <= epsilon


def state_select(alice_axis: UnitAxis, pair: HiddenPair, cfg: SelectionConfig) -> bool:
    """True when the hidden axis lies within ``cfg.epsilon`` of +``alice_axis``."""
    return bool(_accept(np.array(pair.axis.dot(alice_axis)), cfg.epsilon))


def acceptance_rate_analytic(epsilon: float) -> float:
    """Solid-angle fraction of a cone of half-angle ``epsilon``."""
    epsilon = check_epsilon(epsilon)
    return (1.0 - np.cos(epsilon)) / 2.0


def mean_infidelity_analytic(epsilon: float) -> float:
    """Mean of sin^2(alpha/2) over the acceptance cone, uniform in solid angle.

    Equals (1 - cos epsilon) / 4, i.e. epsilon^2 / 8 to leading order.
    """
    epsilon = check_epsilon(epsilon)
    return (1.0 - np.cos(epsilon)) / 4.0


def bob_photon(pair: HiddenPair) -> PureState:
    return axis_state(pair.axis, pair.bob_sign)


def bob_corrected(pair: HiddenPair) -> PureState:
    """Bob's photon after the known sign flip about the shared hidden axis."""
    return axis_state(pair.axis, pair.bob_sign.opposite)


def alice_photon(alice_axis: UnitAxis, pair: HiddenPair) -> PureState:
    return axis_state(alice_axis, pair.alice_sign)


def ensemble_trial(alice_axis: UnitAxis, pair: HiddenPair, cfg: SelectionConfig) -> EnsembleTrial:
    if not state_select(alice_axis, pair, cfg):
        return EnsembleTrial(False, pair.axis)
    corrected = bob_corrected(pair)
    return EnsembleTrial(True, pair.axis, corrected, fidelity(alice_photon(alice_axis, pair), corrected))


def run_ensemble_teleport(
    alice_axis: UnitAxis,
    cfg: SelectionConfig,
    trials: int,
    rng: np.random.Generator,
    record_trials: bool = False,
) -> EnsembleSummary:
    """Monte-Carlo of state-selection teleportation over ``trials`` source events.

    Vectorized over the batch; ``record_trials`` additionally materializes
    one ``EnsembleTrial`` per event.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    xyz, signs = sample_pairs(rng, trials)
    a = alice_axis.as_array()
    accepted = _accept(xyz @ a, cfg.epsilon)
    acc_xyz, acc_signs = xyz[accepted], signs[accepted]

    corrected = axis_state_amplitudes(acc_xyz, acc_signs)
    target = axis_state_amplitudes(np.broadcast_to(a, acc_xyz.shape), acc_signs)
    overlaps = np.einsum("ij,ij->i", target.conj(), corrected)
    fid = np.minimum(np.abs(overlaps) ** 2, 1.0)
    # infidelity from the orthogonal complement keeps precision when fid ~ 1
    orth = axis_state_amplitudes(np.broadcast_to(a, acc_xyz.shape), -acc_signs)
    infid = np.abs(np.einsum("ij,ij->i", orth.conj(), corrected)) ** 2

    records: Sequence[EnsembleTrial] = ()
    if record_trials:
        fid_iter = iter(fid)
        amp_iter = iter(corrected)
        records = tuple(
            EnsembleTrial(True, UnitAxis.from_vector(v), PureState(next(amp_iter)), float(next(fid_iter)))
            if ok
            else EnsembleTrial(False, UnitAxis.from_vector(v))
            for v, ok in zip(xyz, accepted)
        )
    return EnsembleSummary(
        n_trials=trials,
        n_accepted=int(accepted.sum()),
        fidelity_sum=float(fid.sum()),
        infidelity_sum=float(infid.sum()),
        trials=tuple(records),
    )


def merge_summaries(parts: Sequence[EnsembleSummary]) -> EnsembleSummary:
    """Combine block summaries; sums are taken in the given order."""
    fid, infid = 0.0, 0.0
    for p in parts:
        fid += p.fidelity_sum
        infid += p.infidelity_sum
    return EnsembleSummary(
        n_trials=sum(p.n_trials for p in parts),
        n_accepted=sum(p.n_accepted for p in parts),
        fidelity_sum=fid,
        infidelity_sum=infid,
        trials=tuple(t for p in parts for t in p.trials),
    )


def ensemble_outcomes(dots: np.ndarray, signs: np.ndarray, submodel: Submodel, rng: np.random.Generator) -> np.ndarray:
    """Batch detector outcomes given setting . photon_axis and the photon's sign.

    Malus consumes one uniform per outcome; the deterministic rule consumes none.
    """
    dots = np.asarray(dots, dtype=float)
    signs = np.asarray(signs)
    if Submodel(submodel) is Submodel.MALUS:
        p_plus = (1.0 + signs * dots) / 2.0
        return np.where(rng.random(dots.shape) < p_plus, 1, -1)
    out = signs * np.sign(dots)
    return np.where(dots == 0, 1, out).astype(int)


def ensemble_outcome(
    setting: UnitAxis,
    photon_axis: UnitAxis,
    sign: SignLike,
    submodel: Submodel,
    rng: np.random.Generator,
) -> int:
    """One detector click (+1 or -1) for a photon quantized along ``photon_axis``."""
    out = ensemble_outcomes(np.array([setting.dot(photon_axis)]), np.array([int(as_sign(sign))]), submodel, rng)
    return int(out[0])
