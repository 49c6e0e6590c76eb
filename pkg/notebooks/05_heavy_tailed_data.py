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
# # Heavy-tailed generators and ground truth

# %%
from robust_pacbayes.synthetic import (LearningProblem, LossKind, lognormal, normal, pareto, sample,
                                       student_t)

for d in (normal(0, 1), student_t(2.5), pareto(2.5).centered(), pareto(4.0), lognormal(0, 1)):
    print(f"{str(d):32s} mean={d.mean} E x^2={d.second_moment} E|x|^3={d.third_abs_moment}")

# %% [markdown]
# Sample second moments of StudentT(2.5) converge slowly since `E x^4` is infinite.

# %%
d = student_t(2.5)
for n in (10**3, 10**5, 10**7):
    x = sample(d, n, seed=1)
    print(n, (x * x).mean(), "declared", d.second_moment)

# %% [markdown]
# Requesting a moment that does not exist raises a capability error.

# %%
prob = LearningProblem(student_t(2.5), LossKind.ABSOLUTE, (0.0, 1.0))
try:
    prob.analytic_moments(0.0)
except Exception as exc:
    print(type(exc).__name__, exc)
