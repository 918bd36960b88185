# # Collapse-model teleportation
#
# Three qubits: the input (0), Alice's half of a singlet (1) and Bob's half (2).
# Alice measures qubits 0 and 1 in the Bell basis, Bob applies a Pauli fix.

# %%
import numpy as np

from eprsim import BellOutcome, PureState, teleport_branch, teleport_once
from eprsim.teleport import bob_marginal_before_classical, correction_for, outcome_probabilities

psi = PureState.normalized([0.6, 0.8 * np.exp(0.3j)])

# %%
# The four outcomes are equally likely for any input.
print("outcome law:", outcome_probabilities(psi))

# %%
# Each branch, forced in turn: Bob's raw qubit, the correction, the result.
for k in BellOutcome:
    t = teleport_branch(psi, k)
    print(f"{k.name:9s} fix={correction_for(k).name:8s} "
          f"raw={np.round(t.bob_before.amplitudes, 3)} F={t.fidelity_out:.15f}")

# %%
# Sampled runs. Outcome counts land near 1/4 each.
rng = np.random.default_rng(1)
counts = np.zeros(4, dtype=int)
for _ in range(20_000):
    counts[teleport_once(psi, rng).outcome] += 1
print("counts:", dict(zip((k.name for k in BellOutcome), counts.tolist())))

# %%
# Before the two classical bits arrive, Bob holds I/2 whatever the input was.
print(np.round(bob_marginal_before_classical(psi).matrix.real, 12))
