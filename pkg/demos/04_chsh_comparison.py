# # CHSH: singlet vs hidden-axis models
#
# S = E(a,b) - E(a,b') + E(a',b) + E(a',b') at the settings that maximize the
# quantum value. Local models stay inside |S| <= 2.

# %%
import numpy as np

from eprsim.chsh import MODELS, chsh_s, expected_chsh, optimal_settings

settings = optimal_settings()
rng = np.random.default_rng(3)

# %%
for name, make in MODELS.items():
    model = make()
    est = chsh_s(model, *settings, 200_000, rng)
    print(f"{name:15s} S = {est.s_value:+.4f} +/- {est.std_error:.4f}   expected {expected_chsh(model, *settings):+.4f}")

# %%
# Angle dependence of E for each model, settings in the x-z plane.
from eprsim.chsh import correlation, planar_axis

a = planar_axis(0.0)
print("theta     " + "  ".join(f"{n:>15s}" for n in MODELS))
for theta in np.linspace(0, np.pi, 7):
    b = planar_axis(theta)
    row = [correlation(make(), a, b, 50_000, rng) for make in MODELS.values()]
    print(f"{theta:5.3f}  " + "  ".join(f"{e:15.3f}" for e in row))
