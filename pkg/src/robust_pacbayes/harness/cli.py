"""Command-line entry point ``robust-pb``.

Precedence for run settings: command-line flags override fields of the
``--config`` JSON document, which override built-in defaults.

Exit codes: 0 on success, 2 when a theoretical assumption is violated or a
required moment is unavailable, 1 on I/O or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ..errors import ArgumentError, AssumptionViolation, CapabilityError, ConfigurationError
from ..robust_mean import RobustMeanConfig, empirical_m2_bound, estimate, estimate_centered
from .config import ExperimentConfig, ExperimentKind
from .experiments import run
from .io import to_jsonable

EXIT_OK, EXIT_IO, EXIT_ASSUMPTION = 0, 1, 2

# subcommand -> (allowed experiments, default)
_FAMILIES = {
    "coverage": ((ExperimentKind.COVERAGE, ExperimentKind.CENTERED_COVERAGE,
                  ExperimentKind.LEMMA31, ExperimentKind.CHERNOFF), ExperimentKind.COVERAGE),
    "bound": ((ExperimentKind.COUNTABLE_BOUND, ExperimentKind.BOUNDED_LOSS_BOUND,
               ExperimentKind.UNCOUNTABLE_BOUND), ExperimentKind.UNCOUNTABLE_BOUND),
    "gibbs": ((ExperimentKind.GIBBS_COMPARE,), ExperimentKind.GIBBS_COMPARE),
    "identity-check": ((ExperimentKind.IDENTITY_CHECK,), ExperimentKind.IDENTITY_CHECK),
    "compare": ((ExperimentKind.COMPARE,), ExperimentKind.COMPARE),
}
_BOUND_KINDS = {"countable": ExperimentKind.COUNTABLE_BOUND,
                "bounded-loss": ExperimentKind.BOUNDED_LOSS_BOUND,
                "uncountable": ExperimentKind.UNCOUNTABLE_BOUND}
_COVERAGE_KINDS = {"plain": ExperimentKind.COVERAGE, "centered": ExperimentKind.CENTERED_COVERAGE,
                   "lemma31": ExperimentKind.LEMMA31, "chernoff": ExperimentKind.CHERNOFF}


def _run_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="JSON run configuration")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--out", help="output directory for trials.csv and summary.json")
    p.add_argument("--workers", type=int, help="threads used to run trials")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robust-pb",
                                     description="Robust mean estimation and PAC-Bayes bound experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="robust mean of a numbers file (one decimal per line)")
    est.add_argument("file", type=Path)
    est.add_argument("--delta", type=float, default=0.05)
    est.add_argument("--m2", type=float,
                     help="upper bound on E x^2; without it an inflated empirical value is used")
    est.add_argument("--centered", action="store_true", help="use the two-stage centered estimator")
    est.add_argument("--var", type=float, help="upper bound on Var x (centered estimator)")
    est.add_argument("--k", type=int, help="centering subsample size (default n // 2)")

    cov = sub.add_parser("coverage", help="coverage of the mean-estimation guarantees")
    cov.add_argument("--kind", choices=sorted(_COVERAGE_KINDS))
    _run_flags(cov)
    bnd = sub.add_parser("bound", help="coverage of the PAC-Bayes bounds")
    bnd.add_argument("--kind", choices=sorted(_BOUND_KINDS))
    _run_flags(bnd)
    for name, text in (("gibbs", "robust vs traditional Gibbs posterior under contamination"),
                       ("identity-check", "change-of-measure identity on random finite spaces"),
                       ("compare", "deviation quantiles of mean estimators")):
        _run_flags(sub.add_parser(name, help=text))
    return parser


def _read_numbers(path: Path) -> np.ndarray:
    vals = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                vals.append(float(line))
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{lineno}: not a number: {line!r}") from exc
    if not vals:
        raise ConfigurationError(f"{path}: no numbers")
    return np.array(vals)


def _cmd_estimate(args) -> dict:
    x = _read_numbers(args.file)
    heuristic = args.m2 is None
    m2 = empirical_m2_bound(x) if heuristic else args.m2
    cfg = RobustMeanConfig(delta=args.delta, m2_bound=m2)
    if args.centered:
        var = args.var if args.var is not None else m2
        rep = estimate_centered(x, cfg, k=args.k, var_bound=var)
    else:
        rep = estimate(x, cfg)
    rep.heuristic_m2 = heuristic
    return rep.to_dict()


def _experiment_config(args) -> ExperimentConfig:
    allowed, default = _FAMILIES[args.command]
    selector = getattr(args, "kind", None)
    chosen = None
    if selector is not None:
        chosen = (_BOUND_KINDS if args.command == "bound" else _COVERAGE_KINDS)[selector]
    overrides = dict(seed=args.seed, trials=args.trials, n=args.n, delta=args.delta,
                     out=args.out, workers=args.workers)
    if args.config is not None:
        cfg = ExperimentConfig.from_json(args.config, **overrides)
        if chosen is not None:
            cfg = cfg.with_overrides(experiment=chosen)
        if cfg.experiment not in allowed:
            raise ConfigurationError(
                f"experiment {cfg.experiment.value!r} cannot be run by '{args.command}'")
        return cfg
    return ExperimentConfig(experiment=chosen or default,
                            **{k: v for k, v in overrides.items() if v is not None})


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "estimate":
            out = _cmd_estimate(args)
        else:
            out = run(_experiment_config(args)).summary
    except (AssumptionViolation, CapabilityError) as exc:
        name = getattr(exc, "assumption", None)
        print(f"robust-pb: assumption violated{f' ({name})' if name else ''}: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except (OSError, ConfigurationError, ArgumentError) as exc:
        print(f"robust-pb: {exc}", file=sys.stderr)
        return EXIT_IO
    print(json.dumps(to_jsonable(out), indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
