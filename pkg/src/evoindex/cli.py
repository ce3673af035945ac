"""Command line front end.

    evoindex simulate <config> [--seeds 1,2,3] [--out DIR]
    evoindex oracle --alpha A --s0 N --horizon D
    evoindex serve [--port P] [--snapshot FILE] [--truth FILE] ...

`simulate` exits 0 when the theory comparison passes, 1 when it fails, and
2 on config errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .config import ConfigError, load_config
from .convergence import DeathModel, expected_remaining, exposure_proportion, \
    time_to_proportion, variance_remaining
from .engine import EngineConfig
from .gateway import SearchGateway, TermDictionary, serve
from .harness import compare_with_theory, emit_outputs, run_monte_carlo
from .selection import BetaPolicy, OrderingStrategy
from .store import IndexStore
from .usersim import GroundTruth


def _fraction(text: str) -> float:
    if "/" in text:
        num, _, den = text.partition("/")
        return float(num) / float(den)
    return float(text)


def _cmd_simulate(args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config)
        if args.seeds:
            seeds = tuple(int(s) for s in args.seeds.split(",") if s.strip())
            config = replace(config, seeds=seeds)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report = run_monte_carlo(config)
    comparison = compare_with_theory(report)
    print(comparison.render(), end="")
    if args.out:
        paths = emit_outputs(report, args.out)
        print(f"wrote {len(paths)} files to {args.out}")
    return 0 if comparison.passed else 1


def _cmd_oracle(args: argparse.Namespace) -> int:
    try:
        model = DeathModel(args.s0, args.alpha)
        if not args.horizon > 0:
            raise ValueError(f"horizon must be positive, got {args.horizon}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{'t_days':>8} {'expected_remaining':>20} {'variance':>16} {'p':>10}")
    for day in range(0, int(args.horizon) + 1):
        e = expected_remaining(model, day)
        v = variance_remaining(model, day)
        p = exposure_proportion(model.alpha, day)
        print(f"{day:8d} {e:20.2f} {v:16.2f} {p:10.6f}")
    t90 = time_to_proportion(model.alpha, 0.9)
    print(f"time to p=0.9: {t90:.2f} days")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    if args.snapshot:
        store = IndexStore.load_snapshot(args.snapshot)
        term_dict = TermDictionary(str(args.snapshot) + ".terms.json")
    else:
        store = IndexStore()
        term_dict = TermDictionary()
    truth = GroundTruth.load(args.truth) if args.truth else None
    cfg = EngineConfig(
        m=args.m,
        beta_policy=(
            BetaPolicy.uniform() if args.beta == "uniform" else BetaPolicy.fixed(_fraction(args.beta))
        ),
        ordering=OrderingStrategy.from_name(args.ordering),
    )
    gateway = SearchGateway(
        store=store,
        cfg=cfg,
        rng=np.random.default_rng(args.seed),
        truth=truth,
        object_universe=args.objects,
        term_dict=term_dict,
    )
    serve(gateway, args.port, ui_dir=args.ui)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evoindex",
        description="Self-learning index evolution: simulations, oracle tables, live gateway",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a seeded Monte Carlo experiment")
    p_sim.add_argument("config", help="flat key-value config file")
    p_sim.add_argument("--seeds", help="comma-separated seed override")
    p_sim.add_argument("--out", help="directory for CSV/summary outputs")
    p_sim.set_defaults(func=_cmd_simulate)

    p_oracle = sub.add_parser("oracle", help="print the closed-form mean/variance/p table")
    p_oracle.add_argument("--alpha", type=_fraction, required=True, help="decay rate (accepts 1/15)")
    p_oracle.add_argument("--s0", type=int, required=True, help="initial unexplored count")
    p_oracle.add_argument("--horizon", type=float, required=True, help="days to tabulate")
    p_oracle.set_defaults(func=_cmd_oracle)

    p_serve = sub.add_parser("serve", help="serve the JSON gateway")
    p_serve.add_argument("--port", type=int, default=8787)
    p_serve.add_argument("--snapshot", help="store snapshot to load at start")
    p_serve.add_argument("--truth", help="ground-truth pair file for the p metric")
    p_serve.add_argument("--objects", type=int, default=50,
                         help="object universe size for fresh-term linking")
    p_serve.add_argument("--seed", type=int, default=0)
    p_serve.add_argument("--m", type=int, default=10, help="result list length")
    p_serve.add_argument("--beta", default="0.5", help="exploit fraction or 'uniform'")
    p_serve.add_argument("--ordering", default="non_random")
    p_serve.add_argument("--ui", help="directory holding the built browser console")
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
