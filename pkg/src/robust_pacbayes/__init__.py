"""Catoni-type truncated mean estimation and PAC-Bayes bounds for heavy-tailed losses.

Modules
-------
trunc
    The Catoni-Giulini truncation function ``psi``.
robust_mean
    Truncated mean estimator, scale selection and the centered variant.
info
    KL divergence, log-partition, exponential tilt and Bernoulli tail bounds.
pacbayes
    Robust risk estimates, PAC-Bayes bounds and Gibbs posteriors on finite classes.
synthetic
    Heavy-tailed generators with analytic moments and synthetic learning problems.
harness
    Experiment runner and the ``robust-pb`` command line.
"""

from .errors import (ArgumentError, AssumptionViolation, CapabilityError, ConfigurationError,
                     DomainError, RobustPBError)
from .info import (WeightVector, chernoff_bernoulli_tail, exponential_tilt, kl_bernoulli,
                   kl_divergence, log_partition)
from .pacbayes import (AnalyticTruth, BoundAssumptions, BoundReport, FiniteHypothesisClass,
                       countable_bound, gibbs_bound, robust_gibbs_posterior, uncountable_bound)
from .robust_mean import (RobustMeanConfig, estimate, estimate_centered, select_scale,
                          truncated_mean)
from .synthetic import DistributionSpec, LearningProblem, LossKind, sample
from .trunc import CATONI_GIULINI, TruncationFn, psi

__version__ = "0.1.0"
