# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
#       format_version: '1.3'
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # The truncation function
#
# `psi` behaves like the identity near zero and saturates at `2 sqrt(2) / 3`.
# Rescaling by `s` before applying it gives a soft clipping of large values.

# %%
import numpy as np

from robust_pacbayes.trunc import CATONI_GIULINI as F, PSI_BOUND, check_key_property, psi, psi_nonpiecewise

u = np.array([-5.0, -np.sqrt(2), -1.0, 0.0, 1.0, np.sqrt(2), 5.0])
print(np.column_stack([u, psi(F, u)]))

# %% [markdown]
# The indicator form agrees with the piecewise one everywhere, and the
# log-sandwich `-log(1 - u + u^2/2) <= psi(u) <= log(1 + u + u^2/2)` holds.

# %%
grid = np.linspace(-20, 20, 400_001)
print("forms equal:", np.array_equal(psi(F, grid), psi_nonpiecewise(F, grid)))
print("key property:", bool(np.all(check_key_property(F, grid))))
print("bound:", PSI_BOUND, "max |psi|:", np.abs(psi(F, grid)).max())

# %% [markdown]
# Slack in the upper log bound, largest near the knots.

# %%
slack = np.log1p(grid + grid**2 / 2) - psi(F, grid)
for t in (0.0, 0.5, 1.0, np.sqrt(2), 3.0):
    print(f"u={t:.3f}  slack={np.interp(t, grid, slack):.4f}")
