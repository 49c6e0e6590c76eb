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
# # Change of measure on finite spaces
#
# `log E_pi exp(h) = max_rho (E_rho h - KL(rho; pi))`, attained by the
# exponential tilt of `pi`.

# %%
import numpy as np

from robust_pacbayes.info import (WeightVector, exponential_tilt, kl_bernoulli, kl_divergence,
                                  log_partition)
from robust_pacbayes.rng import stream

rng = stream(0, 0)
pi = WeightVector.from_log(rng.normal(size=6))
h = rng.normal(0, 2, 6)
star = exponential_tilt(pi, h)
print("log partition:", log_partition(pi, h))
print("value at tilt:", star.expect(h) - kl_divergence(star, pi))
rhos = rng.dirichlet(np.ones(6), 5000)
vals = [WeightVector._trusted(r).expect(h) - kl_divergence(WeightVector._trusted(r), pi) for r in rhos]
print("best random rho:", max(vals))

# %% [markdown]
# Bernoulli KL dominates the quadratic `2 (p - q)^2`.

# %%
for p in (0.1, 0.5, 0.75, 0.99):
    print(p, kl_bernoulli(p, 0.5), 2 * (p - 0.5) ** 2)
