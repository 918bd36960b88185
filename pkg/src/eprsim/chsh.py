"""Correlation and CHSH estimators over interchangeable outcome models."""
from __future__ import annotations

import abc
from dataclasses import dataclass

import numpy as np

from .bellspace import singlet
from .ensemble import Submodel, ensemble_outcomes, sample_pairs
from .qcore import PureState, UnitAxis, axis_state_amplitudes


class OutcomeModel(abc.ABC):
    """Source of joint +-1 outcomes for settings (a, b)."""

    name: str = "model"

    @abc.abstractmethod
    def sample(self, a: UnitAxis, b: UnitAxis, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """``n`` joint outcomes as two int arrays of +-1."""

    @abc.abstractmethod
    def expected_correlation(self, a: UnitAxis, b: UnitAxis) -> float:
        """Closed-form E(a, b) for this model."""

    def sample_one(self, a: UnitAxis, b: UnitAxis, rng: np.random.Generator) -> tuple[int, int]:
        x, y = self.sample(a, b, 1, rng)
        return int(x[0]), int(y[0])

    def __repr__(self):
        return f"{type(self).__name__}()"


class QuantumSinglet(OutcomeModel):
    """Exact singlet law P(x, y) = (1 - x y a.b) / 4, sampled in closed form."""

    name = "qm"

    def sample(self, a, b, n, rng):
        c = a.dot(b)
        u = rng.random((n, 2))
        x = np.where(u[:, 0] < 0.5, 1, -1)
        # y = -x with probability (1 + c)/2
        y = np.where(u[:, 1] < (1.0 + c) / 2.0, -x, x)
        return x, y

    def expected_correlation(self, a, b):
        return -a.dot(b)


class StatevectorSinglet(OutcomeModel):
    """Spin measurements on the singlet statevector, probabilities by projection."""

    name = "qm-statevector"

    def __init__(self, state: PureState | None = None):
        self.state = singlet() if state is None else state

    def joint_probabilities(self, a: UnitAxis, b: UnitAxis) -> np.ndarray:
        """P(x, y) for (x, y) in ((+,+), (+,-), (-,+), (-,-))."""
        signs = np.array([1, -1])
        ka = axis_state_amplitudes(np.tile(a.as_array(), (2, 1)), signs)
        kb = axis_state_amplitudes(np.tile(b.as_array(), (2, 1)), signs)
        psi = self.state.amplitudes.reshape(2, 2)
        amps = ka.conj() @ psi @ kb.conj().T
        return (np.abs(amps) ** 2).ravel()

    def sample(self, a, b, n, rng):
        probs = self.joint_probabilities(a, b)
        cdf = np.cumsum(probs)
        cdf /= cdf[-1]
        k = np.minimum(np.searchsorted(cdf, rng.random(n), side="right"), 3)
        x = np.where(k < 2, 1, -1)
        y = np.where(k % 2 == 0, 1, -1)
        return x, y

    def expected_correlation(self, a, b):
        p = self.joint_probabilities(a, b)
        return float(p[0] - p[1] - p[2] + p[3])


class EnsembleModel(OutcomeModel):
    """Hidden-axis pairs with anti-correlated signs, outcomes by ``submodel``."""

    def __init__(self, submodel: Submodel):
        self.submodel = Submodel(submodel)
        self.name = "ensemble-malus" if self.submodel is Submodel.MALUS else "ensemble-det"

    def sample(self, a, b, n, rng):
        xyz, alice_signs = sample_pairs(rng, n)
        x = ensemble_outcomes(xyz @ a.as_array(), alice_signs, self.submodel, rng)
        y = ensemble_outcomes(xyz @ b.as_array(), -alice_signs, self.submodel, rng)
        return x, y

    def expected_correlation(self, a, b):
        c = a.dot(b)
        if self.submodel is Submodel.MALUS:
            return -c / 3.0
        return -1.0 + 2.0 * float(np.arccos(np.clip(c, -1.0, 1.0))) / np.pi

    def __repr__(self):
        return f"EnsembleModel({self.submodel.value!r})"


def EnsembleMalus() -> EnsembleModel:
    return EnsembleModel(Submodel.MALUS)


def EnsembleDeterministic() -> EnsembleModel:
    return EnsembleModel(Submodel.DETERMINISTIC_SIGN)


MODELS = {
    "qm": QuantumSinglet,
    "ensemble-malus": EnsembleMalus,
    "ensemble-det": EnsembleDeterministic,
}


def product_sum(model: OutcomeModel, a: UnitAxis, b: UnitAxis, trials: int, rng: np.random.Generator) -> int:
    x, y = model.sample(a, b, trials, rng)
    return int(np.sum(x * y))


def correlation_std_error(mean: float, trials: int) -> float:
    # products are +-1, so their variance is 1 - mean^2
    return float(np.sqrt(max(1.0 - mean * mean, 0.0) / trials))


def correlation(model: OutcomeModel, a: UnitAxis, b: UnitAxis, trials: int, rng: np.random.Generator) -> float:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    return product_sum(model, a, b, trials, rng) / trials


@dataclass(frozen=True)
class ChshEstimate:
    settings: tuple[UnitAxis, UnitAxis, UnitAxis, UnitAxis]
    correlations: tuple[float, float, float, float]
    s_value: float
    trials_per_pair: int
    std_error: float

    @property
    def magnitude(self) -> float:
        return abs(self.s_value)


def chsh_pairs(a, a2, b, b2) -> list[tuple[UnitAxis, UnitAxis]]:
    """Settings pairs in the order E(a,b), E(a,b'), E(a',b), E(a',b')."""
    return [(a, b), (a, b2), (a2, b), (a2, b2)]


def chsh_from_sums(settings, product_sums, trials_per_pair: int) -> ChshEstimate:
    corr = tuple(s / trials_per_pair for s in product_sums)
    s_value = corr[0] - corr[1] + corr[2] + corr[3]
    se = float(np.sqrt(sum(correlation_std_error(e, trials_per_pair) ** 2 for e in corr)))
    return ChshEstimate(tuple(settings), corr, s_value, trials_per_pair, se)


def chsh_s(
    model: OutcomeModel,
    a: UnitAxis,
    a2: UnitAxis,
    b: UnitAxis,
    b2: UnitAxis,
    trials_per_pair: int,
    rng: np.random.Generator,
) -> ChshEstimate:
    """S = E(a,b) - E(a,b') + E(a',b) + E(a',b'), one independent sub-stream per pair."""
    if trials_per_pair < 1:
        raise ValueError("trials_per_pair must be >= 1")
    subs = rng.spawn(4)
    sums = [product_sum(model, x, y, trials_per_pair, r) for (x, y), r in zip(chsh_pairs(a, a2, b, b2), subs)]
    return chsh_from_sums((a, a2, b, b2), sums, trials_per_pair)


def expected_chsh(model: OutcomeModel, a, a2, b, b2) -> float:
    e = [model.expected_correlation(x, y) for x, y in chsh_pairs(a, a2, b, b2)]
    return e[0] - e[1] + e[2] + e[3]


def planar_axis(angle: float) -> UnitAxis:
    """Axis in the x-z plane at ``angle`` radians from +z toward +x."""
    return UnitAxis(np.sin(angle), 0.0, np.cos(angle))


def optimal_settings() -> tuple[UnitAxis, UnitAxis, UnitAxis, UnitAxis]:
    """(a, a', b, b') at 0, 90, 45 and 135 degrees in the x-z plane."""
    r = 1.0 / np.sqrt(2.0)
    return UnitAxis(0.0, 0.0, 1.0), UnitAxis(1.0, 0.0, 0.0), UnitAxis(r, 0.0, r), UnitAxis(r, 0.0, -r)

