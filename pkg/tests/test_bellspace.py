import numpy as np
import pytest
from hypothesis import given, settings

from eprsim.bellspace import (
    BellOutcome,
    bell_basis,
    bell_measure,
    bell_probabilities,
    bell_project,
    bell_state,
    singlet,
    singlet_along,
)
from eprsim.qcore import (
    DimensionError,
    InvariantError,
    PureState,
    Sign,
    UnitAxis,
    axis_state,
    fidelity,
    partial_trace,
    random_axis,
    tensor,
)

from conftest import axes, states

R = 1 / np.sqrt(2)


def test_singlet_amplitudes():
    np.testing.assert_array_equal(singlet().amplitudes, [0, 0.7071067811865475, -0.7071067811865475, 0])
    assert fidelity(singlet(), singlet()) == pytest.approx(1.0, abs=1e-12)


def test_singlet_marginal():
    for keep in (0, 1):
        np.testing.assert_allclose(partial_trace(singlet(), keep).matrix, np.eye(2) / 2, atol=1e-15)


def test_singlet_along_z_is_singlet():
    np.testing.assert_allclose(singlet_along(UnitAxis(0, 0, 1)).amplitudes, singlet().amplitudes, atol=1e-15)


def test_singlet_along_x():
    assert fidelity(singlet_along(UnitAxis(1, 0, 0)), singlet()) == pytest.approx(1.0, abs=1e-12)


def test_singlet_isotropy_random_sweep(rng):
    ref = singlet()
    for _ in range(100):
        assert abs(fidelity(singlet_along(random_axis(rng)), ref) - 1.0) < 1e-12


@settings(max_examples=300)
@given(axes)
def test_singlet_isotropy_property(a):
    assert abs(fidelity(singlet_along(a), singlet()) - 1.0) < 1e-12


def test_singlet_along_uses_shared_axis():
    # a pair quantized along different axes is not the singlet
    a, b = UnitAxis(0, 0, 1), UnitAxis(1, 0, 0)
    mixed = (tensor(axis_state(a, Sign.PLUS), axis_state(b, Sign.MINUS)).amplitudes
             - tensor(axis_state(a, Sign.MINUS), axis_state(b, Sign.PLUS)).amplitudes)
    assert fidelity(PureState.normalized(mixed), singlet()) < 0.9


def test_singlet_along_rejects_bad_axis():
    with pytest.raises(InvariantError):
        singlet_along((0.0, 0.0, 2.0))


class TestBellBasis:
    def test_amplitudes(self):
        psi_m, psi_p, phi_m, phi_p = (b.amplitudes for b in bell_basis())
        np.testing.assert_array_equal(psi_m, singlet().amplitudes)
        np.testing.assert_allclose(psi_p, [0, R, R, 0])
        np.testing.assert_allclose(phi_m, [R, 0, 0, -R])
        np.testing.assert_allclose(phi_p, [R, 0, 0, R])

    def test_orthonormal(self):
        m = np.array([b.amplitudes for b in bell_basis()])
        np.testing.assert_allclose(m.conj() @ m.T, np.eye(4), atol=1e-12)

    def test_complete(self):
        total = sum(np.outer(b.amplitudes, b.amplitudes.conj()) for b in bell_basis())
        np.testing.assert_allclose(total, np.eye(4), atol=1e-12)

    def test_order_matches_enum(self):
        for k, b in zip(BellOutcome, bell_basis()):
            assert b.allclose(bell_state(k))


class TestBellMeasure:
    def test_uniform_on_teleport_input(self):
        # hand expansion: |0> x singlet has weight 1/4 on every Bell state of (0, 1)
        state = tensor(PureState([1, 0]), singlet())
        np.testing.assert_allclose(bell_probabilities(state, (0, 1)), [0.25] * 4, atol=1e-12)

    def test_definite_outcome(self, rng):
        state = tensor(bell_state(BellOutcome.PSI_PLUS), PureState([0.6, 0.8j]))
        for _ in range(20):
            rec = bell_measure(state, (0, 1), rng)
            assert rec.outcome is BellOutcome.PSI_PLUS
            assert rec.probability == pytest.approx(1.0, abs=1e-12)
            assert rec.post_state.allclose(state)

    def test_pair_on_other_qubits(self, rng):
        state = tensor(PureState([0.6, 0.8]), bell_state(BellOutcome.PHI_MINUS))
        rec = bell_measure(state, (1, 2), rng)
        assert rec.outcome is BellOutcome.PHI_MINUS
        assert rec.post_state.allclose(state)

    def test_reversed_pair_order(self):
        # swapping the pair order flips the sign of Psi- only
        state = tensor(bell_state(BellOutcome.PSI_MINUS), PureState([1, 0]))
        np.testing.assert_allclose(bell_probabilities(state, (1, 0)), [1, 0, 0, 0], atol=1e-15)

    def test_deterministic_given_seed(self):
        state = tensor(PureState([0.6, 0.8j]), singlet())
        recs = [bell_measure(state, (0, 1), np.random.default_rng(99)) for _ in range(2)]
        assert recs[0].outcome == recs[1].outcome
        assert recs[0].probability == recs[1].probability
        np.testing.assert_array_equal(recs[0].post_state.amplitudes, recs[1].post_state.amplitudes)

    def test_record_invariants(self, rng):
        state = PureState.normalized(rng.standard_normal(8) + 1j * rng.standard_normal(8))
        probs = bell_probabilities(state, (0, 1))
        for k in BellOutcome:
            rec = bell_project(state, k, (0, 1))
            assert rec.probability == pytest.approx(probs[k], abs=1e-12)
            # post state lies in the Bell_k x anything subspace
            assert bell_probabilities(rec.post_state, (0, 1))[k] == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=200)
    @given(states(3))
    def test_probabilities_sum_to_one(self, state):
        for pair in [(0, 1), (1, 2), (0, 2), (2, 0)]:
            assert bell_probabilities(state, pair).sum() == pytest.approx(1.0, abs=1e-12)

    def test_zero_branch_projection_raises(self):
        state = tensor(bell_state(BellOutcome.PHI_PLUS), PureState([1, 0]))
        with pytest.raises(InvariantError):
            bell_project(state, BellOutcome.PSI_MINUS)

    def test_requires_three_qubits(self, rng):
        with pytest.raises(DimensionError):
            bell_measure(singlet(), (0, 1), rng)

    def test_bad_pair(self, rng):
        state = tensor(PureState([1, 0]), singlet())
        with pytest.raises(IndexError):
            bell_measure(state, (1, 1), rng)

    def test_frequencies_match_projection(self):
        rng = np.random.default_rng(5)
        state = PureState.normalized(rng.standard_normal(8) + 1j * rng.standard_normal(8))
        exact = bell_probabilities(state, (0, 1))
        n = 100_000
        counts = np.zeros(4)
        for _ in range(n):
            counts[bell_measure(state, (0, 1), rng).outcome] += 1
        np.testing.assert_allclose(counts / n, exact, atol=0.01)
