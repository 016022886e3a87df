"""Command-line frontend: ``solve``, ``eval``, ``experiment`` and ``gen``.

Exit codes: 0 ok, 1 experiment checks failed, 2 malformed input or unknown
experiment, 3 infeasible k, 4 dependent set in a portfolio.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import experiments as exps
from .algorithms import REPORT_STREAM, derive_seed, solve
from .evaluation import estimate_value
from .generators import gen_batch_portfolio, gen_graphic_clique_path, gen_random, gen_uniform_mixing
from .matroids import MalformedInput
from .model import DependentSet, InfeasibleK, Portfolio, SolverConfig, instance_from_json, instance_to_json
from .stochastic import EXACT_ENUMERATION_LIMIT, exact_portfolio_value

EXIT_FAILED, EXIT_MALFORMED, EXIT_INFEASIBLE_K, EXIT_DEPENDENT = 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(EXIT_MALFORMED, f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_MALFORMED, f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _dump(obj, out: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args) -> SolverConfig:
    cfg = SolverConfig(seed=args.seed, delta=args.delta)
    if args.samples is not None:
        cfg.eval_samples = args.samples
    if args.ell_pad is not None:
        cfg.ell_pad = args.ell_pad
    if args.order_trials is not None:
        cfg.order_trials = args.order_trials
    return cfg


def _instance(path: str, cfg: SolverConfig):
    obj = _load_json(path)
    try:
        return instance_from_json(obj, cfg)
    except InfeasibleK as exc:
        raise CliError(EXIT_INFEASIBLE_K, str(exc)) from None
    except MalformedInput as exc:
        raise CliError(EXIT_MALFORMED, f"{path}: {exc}") from None


def cmd_solve(args) -> int:
    inst = _instance(args.instance, _config(args))
    try:
        port = solve(inst, args.algorithm)
    except ValueError as exc:
        raise CliError(EXIT_MALFORMED, str(exc)) from None
    # fresh stream: the selection estimate of the winner is biased upward
    cfg = inst.config
    port.estimate = estimate_value(port, inst.dist, cfg.eval_samples, derive_seed(cfg.seed, REPORT_STREAM),
                                   cfg.delta, cfg.worker_count())
    _dump(port.to_json(), args.out)
    return 0


def cmd_eval(args) -> int:
    cfg = _config(args)
    inst = _instance(args.instance, cfg)
    try:
        port = Portfolio.from_json(_load_json(args.portfolio))
    except (MalformedInput, TypeError, ValueError) as exc:
        raise CliError(EXIT_MALFORMED, f"{args.portfolio}: {exc}") from None
    for i, s in enumerate(port.sets):
        bad = [e for e in s if not 0 <= e < inst.n]
        if bad:
            raise CliError(EXIT_MALFORMED, f"set {i} has element ids outside [0, {inst.n}): {bad}")
    try:
        port.validate(inst.matroid)
    except DependentSet as exc:
        raise CliError(EXIT_DEPENDENT, f"set index {exc.index}: {exc}") from None
    samples = args.samples if args.samples is not None else 100_000
    est = estimate_value(port, inst.dist, samples, cfg.seed, cfg.delta, cfg.worker_count())
    footprint = len({e for s in port.sets for e in s})
    exact = exact_portfolio_value(port.sets, inst.dist) if footprint <= EXACT_ENUMERATION_LIMIT else None
    _dump({
        "estimate": {"mean": est.mean, "ci": est.ci_half_width, "n": est.n_samples, "seed": est.seed,
                     "std_error": est.std_error},
        "exact": exact,
        "footprint": footprint,
    }, args.out)
    return 0


_EXPERIMENT_FLAGS = {
    "crs-retention": {"seed"},
    "ratio-sweep": {"seed"},
    "mixing-counterexample": {"seed", "samples", "k"},
    "lemma-suite": {"seed"},
}


def cmd_experiment(args) -> int:
    if args.name not in exps.EXPERIMENTS:
        raise CliError(EXIT_MALFORMED, f"unknown experiment {args.name!r}; choose from {', '.join(exps.EXPERIMENTS)}")
    kwargs = {"seed": args.seed}
    if args.samples is not None and "samples" in _EXPERIMENT_FLAGS[args.name]:
        kwargs["samples"] = args.samples
    if args.k is not None and "k" in _EXPERIMENT_FLAGS[args.name]:
        kwargs["k"] = args.k
    report = exps.EXPERIMENTS[args.name](**kwargs)
    _dump(report, args.out)
    print(exps.render(report), file=sys.stderr)
    return 0 if report["passed"] else EXIT_FAILED


def cmd_gen(args) -> int:
    try:
        obj = _generate(args)
    except ValueError as exc:
        raise CliError(EXIT_MALFORMED, str(exc)) from None
    _dump(obj, args.out)
    return 0


def _generate(args) -> dict:
    if args.generator == "uniform-mixing":
        obj = instance_to_json(gen_uniform_mixing(args.k))
    elif args.generator == "clique-path":
        obj = instance_to_json(gen_graphic_clique_path(args.n, args.k))
    elif args.generator == "batch-portfolio":
        obj = gen_batch_portfolio(args.k, args.batches).to_json()
    else:
        obj = instance_to_json(gen_random(args.n, args.r, args.k, args.law, args.kind, args.seed))
    return obj


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int)
    common.add_argument("--out")
    common.add_argument("--delta", type=float, default=0.05)
    common.add_argument("--ell-pad", type=int)
    common.add_argument("--order-trials", type=int)

    parser = argparse.ArgumentParser(prog="matroid-portfolio", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="build a portfolio for an instance")
    p.add_argument("instance")
    p.add_argument("--algorithm", choices=["uniform", "general", "disjoint", "greedy-explicit"])
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eval", parents=[common], help="estimate (and if small, compute) a portfolio's value")
    p.add_argument("instance")
    p.add_argument("portfolio")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("experiment", parents=[common], help="run a named experiment")
    p.add_argument("name")
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("gen", parents=[common], help="emit a generated instance or portfolio")
    p.add_argument("generator", choices=["uniform-mixing", "clique-path", "batch-portfolio", "random"])
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--batches", type=int)
    p.add_argument("--law", choices=["uniform", "beta", "bimodal"], default="uniform")
    p.add_argument("--kind", choices=["uniform", "graphic", "partition", "explicit"], default="uniform")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
