"""Command line interface: generate scenarios, run sessions, sweep experiments, serve."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .harness import ExperimentPlan, emit_results, run_experiment
from .rewards import DEFAULT_DECAYS, sample_user
from .scenario import Environment, ScenarioConfig, generate_scenario_dict, load_scenario
from .session import LoopConfig, reward_ratio, run_learning_loop
from .users import BOLTZMANN, DETERMINISTIC, UserModel, make_responder


def _shipped_path(name: str) -> str:
    from importlib import resources

    return str(resources.files("preftours") / "data" / f"{name}.json")


def resolve_scenario(ref: str) -> Environment:
    """A scenario argument is either a file path or the name of a shipped scenario."""
    if os.path.exists(ref):
        return load_scenario(ref)
    shipped = _shipped_path(ref)
    if os.path.exists(shipped):
        return load_scenario(shipped)
    raise SystemExit(f"scenario {ref!r} is neither a file nor a shipped scenario name")


def _parse_prior(text: str) -> tuple[float, ...]:
    if text == "uniform":
        return (1 / 3, 1 / 3, 1 / 3)
    try:
        values = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise SystemExit(f"cannot parse prior {text!r}; use 'uniform' or 'p1,p2,p3'")
    return values


def _cmd_gen(args: argparse.Namespace) -> int:
    config = ScenarioConfig(
        num_regions=args.regions,
        num_robots=args.robots,
        budget_factor=args.budget_factor,
        arena=(args.arena[0], args.arena[1]),
        points_range=(args.points_min, args.points_max),
        region_radius=args.region_radius,
        seed=args.seed,
    )
    data = generate_scenario_dict(config)
    text = json.dumps(data, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.out}: {args.regions} regions, {args.robots} robots")
    else:
        print(text)
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    env = resolve_scenario(args.scenario)
    config = LoopConfig(
        max_iterations=args.iterations,
        n_regions_sampled=args.n_regions,
        cut_prob=args.cut_prob,
        strategy=args.strategy,
        deterministic=args.deterministic,
        seed=(args.seed, 1),
    )
    truth = sample_user(
        env,
        sigma=args.sigma,
        decay_prior=_parse_prior(args.prior),
        beta=args.beta,
        seed=np.random.default_rng([args.seed, 0]),
    )
    model = UserModel(truth, args.user)
    responder = make_responder(model, env, np.random.default_rng([args.seed, 2]))
    tours, trace = run_learning_loop(env, config, responder, truth=truth)
    if args.trace:
        with open(args.trace, "w") as fh:
            for record in trace:
                fh.write(json.dumps(record, separators=(",", ":")) + "\n")
    final = reward_ratio(tours, truth, env)
    print(f"queries answered: {len(trace)}")
    print(f"final reward ratio: {final:.4f}")
    if args.trace:
        print(f"trace written to {args.trace}")
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    if args.plan:
        plan = ExperimentPlan.from_file(args.plan)
    else:
        plan = ExperimentPlan()
    if args.trials is not None:
        plan.trials = args.trials
    if args.master_seed is not None:
        plan.master_seed = args.master_seed
    if args.scenario is not None:
        if os.path.exists(args.scenario):
            plan.scenario_file = args.scenario
        else:
            plan.scenario_file = _shipped_path(args.scenario)
    plan.validate()
    table = run_experiment(plan, progress=lambda msg: print(msg, file=sys.stderr))
    paths = emit_results(table, args.out_dir)
    print(table.summary(), end="")
    print(f"results written to {paths['csv']}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="preftours",
        description="Plan robot monitoring tours and learn reward weights from choices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a random scenario file")
    gen.add_argument("--regions", type=int, default=20)
    gen.add_argument("--robots", type=int, default=4)
    gen.add_argument("--budget-factor", type=float, default=2.0)
    gen.add_argument("--points-min", type=int, default=1)
    gen.add_argument("--points-max", type=int, default=5)
    gen.add_argument("--arena", type=float, nargs=2, default=[100.0, 100.0],
                     metavar=("W", "H"))
    gen.add_argument("--region-radius", type=float, default=3.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=str, default=None)
    gen.set_defaults(func=_cmd_gen)

    run = sub.add_parser("run", help="run one simulated learning session")
    run.add_argument("--scenario", type=str, default="coastline")
    run.add_argument("--strategy", type=str, default="max_regret")
    run.add_argument("--iterations", type=int, default=20)
    run.add_argument("--n-regions", type=int, default=10,
                     help="cut configurations sampled per iteration")
    run.add_argument("--cut-prob", type=float, default=0.8)
    run.add_argument("--sigma", type=float, default=0.5)
    run.add_argument("--prior", type=str, default="uniform")
    run.add_argument("--beta", type=float, default=20.0)
    run.add_argument("--user", type=str, choices=[BOLTZMANN, DETERMINISTIC],
                     default=BOLTZMANN)
    run.add_argument("--deterministic", action="store_true",
                     help="single-polyhedron mode with the termination check")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--trace", type=str, default=None)
    run.set_defaults(func=_cmd_run)

    exp = sub.add_parser("experiment", help="run a full strategy sweep")
    exp.add_argument("--plan", type=str, default=None, help="JSON plan file")
    exp.add_argument("--out-dir", type=str, default="results")
    exp.add_argument("--trials", type=int, default=None)
    exp.add_argument("--master-seed", type=int, default=None)
    exp.add_argument("--scenario", type=str, default=None)
    exp.set_defaults(func=_cmd_experiment)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", type=str, default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("LOG_LEVEL", "WARNING"))
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
