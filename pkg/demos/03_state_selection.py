# # Hidden-axis state selection
#
# Each pair shares a random quantization axis. A trial counts only when that
# axis lies within a cone of half-angle eps around Alice's axis. Narrow cones
# give near-perfect transfer at a vanishing acceptance rate.

# %%
import numpy as np

from eprsim import SelectionConfig, UnitAxis, run_ensemble_teleport
from eprsim.ensemble import acceptance_rate_analytic, mean_infidelity_analytic

alice = UnitAxis(0.0, 0.0, 1.0)
rng = np.random.default_rng(2)

# %%
print(f"{'eps':>6} {'rate':>10} {'(1-cos)/2':>10} {'1-F':>10} {'analytic':>10}")
for eps in (1.0, 0.5, 0.2, 0.1, 0.05):
    s = run_ensemble_teleport(alice, SelectionConfig(eps), 1_000_000, rng)
    inf = s.mean_conditional_infidelity
    print(f"{eps:6.2f} {s.acceptance_rate:10.3e} {acceptance_rate_analytic(eps):10.3e} "
          f"{inf if inf is not None else float('nan'):10.3e} {mean_infidelity_analytic(eps):10.3e}")

# %%
# Small-cone limits: rate ~ eps^2/4, infidelity ~ eps^2/8.
eps = 0.01
print(acceptance_rate_analytic(eps), eps**2 / 4)
print(mean_infidelity_analytic(eps), eps**2 / 8)
