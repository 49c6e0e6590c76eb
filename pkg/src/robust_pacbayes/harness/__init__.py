"""Reproducible Monte Carlo experiments, configuration and CLI."""

from .config import ExperimentConfig, ExperimentKind, parse_distribution, parse_problem
from .experiments import RunResult, compare_estimators, frequency_summary, run

__all__ = ["ExperimentConfig", "ExperimentKind", "parse_distribution", "parse_problem",
           "RunResult", "compare_estimators", "frequency_summary", "run"]
