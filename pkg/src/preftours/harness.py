"""Seeded experiment sweeps over user populations and query strategies.

Trials are paired: within a cell of the user grid, every strategy sees the same
sampled user and the same initial tours, so curves are directly comparable. All
randomness flows from the master seed through fixed derivation keys, which keeps
results byte-identical across runs regardless of execution order.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .gtop import solve_gtop
from .querygen import GtopSolver, MAX_REGRET, RANDOM_UNIFORM, STRATEGIES
from .rewards import DEFAULT_DECAYS, DecaySet, reward, sample_user
from .scenario import (
    Environment,
    ScenarioConfig,
    environment_from_dict,
    generate_random_scenario,
    load_scenario,
)
from .session import (
    BASELINE_LEVELS,
    LoopConfig,
    baseline_tours,
    init_session,
    session_ratio,
    step,
)
from .users import BOLTZMANN, UserModel, make_responder

log = logging.getLogger(__name__)

DEFAULT_PRIORS: tuple[tuple[float, ...], ...] = (
    (1 / 3, 1 / 3, 1 / 3),
    (0.7, 0.2, 0.1),
    (0.1, 0.2, 0.7),
    (0.2, 0.7, 0.1),
)

# Derivation keys so each random stream is independent of the others.
_USER_STREAM = 101
_LOOP_STREAM = 202
_RESPONSE_STREAM = 303


def prior_label(prior: tuple[float, ...]) -> str:
    if len(set(prior)) == 1:
        return "uniform"
    return "-".join(f"{p:g}" for p in prior)


@dataclass
class ExperimentPlan:
    """Everything a sweep needs; serializable to a JSON plan file."""

    scenario: Optional[dict] = None
    scenario_file: Optional[str] = None
    generator: Optional[dict] = None
    sigmas: tuple[float, ...] = (0.5, 10.0)
    priors: tuple[tuple[float, ...], ...] = DEFAULT_PRIORS
    trials: int = 10
    strategies: tuple[str, ...] = (MAX_REGRET, RANDOM_UNIFORM)
    baselines: tuple[str, ...] = BASELINE_LEVELS
    max_iterations: int = 20
    n_regions_sampled: int = 10
    cut_prob: float = 0.8
    beta: float = 20.0
    user_kind: str = BOLTZMANN
    info_gain_samples: int = 300
    master_seed: int = 0

    def validate(self) -> None:
        for s in self.strategies:
            if s not in STRATEGIES:
                raise ValueError(f"unknown strategy {s!r}")
        for b in self.baselines:
            if b not in BASELINE_LEVELS:
                raise ValueError(f"unknown baseline {b!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.sigmas or not self.priors:
            raise ValueError("the user grid needs at least one sigma and one prior")
        if self.max_iterations < 0:
            raise ValueError("max_iterations cannot be negative")

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "scenario_file": self.scenario_file,
            "generator": self.generator,
            "sigmas": list(self.sigmas),
            "priors": [list(p) for p in self.priors],
            "trials": self.trials,
            "strategies": list(self.strategies),
            "baselines": list(self.baselines),
            "max_iterations": self.max_iterations,
            "n_regions_sampled": self.n_regions_sampled,
            "cut_prob": self.cut_prob,
            "beta": self.beta,
            "user_kind": self.user_kind,
            "info_gain_samples": self.info_gain_samples,
            "master_seed": self.master_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentPlan":
        plan = cls(
            scenario=data.get("scenario"),
            scenario_file=data.get("scenario_file"),
            generator=data.get("generator"),
            sigmas=tuple(data.get("sigmas", (0.5, 10.0))),
            priors=tuple(tuple(p) for p in data.get("priors", DEFAULT_PRIORS)),
            trials=int(data.get("trials", 10)),
            strategies=tuple(data.get("strategies", (MAX_REGRET, RANDOM_UNIFORM))),
            baselines=tuple(data.get("baselines", BASELINE_LEVELS)),
            max_iterations=int(data.get("max_iterations", 20)),
            n_regions_sampled=int(data.get("n_regions_sampled", 10)),
            cut_prob=float(data.get("cut_prob", 0.8)),
            beta=float(data.get("beta", 20.0)),
            user_kind=data.get("user_kind", BOLTZMANN),
            info_gain_samples=int(data.get("info_gain_samples", 300)),
            master_seed=int(data.get("master_seed", 0)),
        )
        plan.validate()
        return plan

    @classmethod
    def from_file(cls, path: str) -> "ExperimentPlan":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def resolve_environment(self) -> Environment:
        if self.scenario is not None:
            return environment_from_dict(self.scenario)
        if self.scenario_file is not None:
            return load_scenario(self.scenario_file)
        kwargs = dict(self.generator or {})
        if "points_range" in kwargs:
            kwargs["points_range"] = tuple(kwargs["points_range"])
        if "arena" in kwargs:
            kwargs["arena"] = tuple(kwargs["arena"])
        return generate_random_scenario(ScenarioConfig(**kwargs))


@dataclass
class ResultsTable:
    """Aggregated ratios per (strategy, cell, iteration) plus raw traces."""

    curves: dict = field(default_factory=dict)
    traces: list = field(default_factory=list)
    max_iterations: int = 0

    def add(self, strategy: str, sigma: float, p: str, iteration: int, ratio: float) -> None:
        self.curves.setdefault((strategy, sigma, p, iteration), []).append(ratio)

    def rows(self) -> list[dict]:
        out = []
        for (strategy, sigma, p, iteration), values in sorted(self.curves.items()):
            arr = np.array(values)
            out.append(
                {
                    "strategy": strategy,
                    "sigma": sigma,
                    "p": p,
                    "iteration": iteration,
                    "mean_ratio": float(arr.mean()),
                    "std": float(arr.std()),
                    "trials": len(values),
                }
            )
        return out

    def mean_at(self, strategy: str, iteration: int) -> float:
        """Grand mean over every cell at one iteration (baselines use iteration 0)."""
        values: list[float] = []
        for (strat, _sigma, _p, it), ratios in self.curves.items():
            if strat == strategy and it == iteration:
                values.extend(ratios)
        if not values:
            raise KeyError(f"no data for {strategy!r} at iteration {iteration}")
        return float(np.mean(values))

    def to_csv(self) -> str:
        lines = ["strategy,sigma,p,iteration,mean_ratio,std,trials"]
        for row in self.rows():
            lines.append(
                f"{row['strategy']},{row['sigma']:g},{row['p']},{row['iteration']},"
                f"{row['mean_ratio']:.10g},{row['std']:.10g},{row['trials']}"
            )
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        lines = ["strategy means over all cells"]
        strategies = sorted({key[0] for key in self.curves})
        for strategy in strategies:
            iterations = sorted({it for (s, _, _, it) in self.curves if s == strategy})
            last = iterations[-1]
            lines.append(
                f"  {strategy}: iteration {last} mean ratio {self.mean_at(strategy, last):.4f}"
            )
        return "\n".join(lines) + "\n"


def run_experiment(
    plan: ExperimentPlan,
    env: Optional[Environment] = None,
    decays: DecaySet = DEFAULT_DECAYS,
    solver: GtopSolver = solve_gtop,
    progress: Optional[Callable[[str], None]] = None,
) -> ResultsTable:
    """Run every (cell, trial, strategy) session plus the baselines."""
    plan.validate()
    if env is None:
        env = plan.resolve_environment()
    table = ResultsTable(max_iterations=plan.max_iterations)
    cells = [(sigma, prior) for sigma in plan.sigmas for prior in plan.priors]
    for ci, (sigma, prior) in enumerate(cells):
        label = prior_label(prior)
        if progress:
            progress(f"cell {ci + 1}/{len(cells)}: sigma={sigma:g} p={label}")
        log.info("cell %d/%d sigma=%g p=%s", ci + 1, len(cells), sigma, label)
        for trial in range(plan.trials):
            user_rng = np.random.default_rng([plan.master_seed, _USER_STREAM, ci, trial])
            truth = sample_user(env, sigma, prior, plan.beta, user_rng, decays)
            reference = solver(env, truth.weights, decays)
            opt_reward = reward(reference, truth.weights, env, decays)

            for si, strategy in enumerate(plan.strategies):
                config = LoopConfig(
                    max_iterations=plan.max_iterations,
                    n_regions_sampled=plan.n_regions_sampled,
                    cut_prob=plan.cut_prob,
                    strategy=strategy,
                    seed=(plan.master_seed, _LOOP_STREAM, ci, trial, si),
                    info_gain_samples=plan.info_gain_samples,
                    info_gain_beta=plan.beta,
                )
                responder_rng = np.random.default_rng(
                    [plan.master_seed, _RESPONSE_STREAM, ci, trial, si]
                )
                model = UserModel(truth, plan.user_kind)
                responder = make_responder(model, env, responder_rng, decays)
                state = init_session(env, config, decays, solver, truth=truth)
                table.add(strategy, sigma, label, 0, session_ratio(state, env, decays))
                while not state.terminated and state.iteration < config.max_iterations:
                    if step(state, env, config, responder, decays, solver) is None:
                        break
                for record in state.trace:
                    table.add(strategy, sigma, label, record["k"], record["reward_ratio"])
                table.traces.append(
                    {
                        "strategy": strategy,
                        "sigma": sigma,
                        "p": label,
                        "trial": trial,
                        "master_seed": plan.master_seed,
                        "user": truth.to_dict(),
                        "records": state.trace,
                    }
                )

            for level in plan.baselines:
                tours = baseline_tours(env, truth, level, decays, solver)
                achieved = reward(tours, truth.weights, env, decays)
                ratio = 1.0 if opt_reward <= 0 else achieved / opt_reward
                table.add(level, sigma, label, 0, ratio)
    return table


def emit_results(table: ResultsTable, out_dir: str) -> dict:
    """Write results.csv, traces.jsonl and summary.txt; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "results.csv")
    with open(csv_path, "w") as fh:
        fh.write(table.to_csv())
    traces_path = os.path.join(out_dir, "traces.jsonl")
    with open(traces_path, "w") as fh:
        for entry in table.traces:
            fh.write(json.dumps(entry, separators=(",", ":")) + "\n")
    summary_path = os.path.join(out_dir, "summary.txt")
    with open(summary_path, "w") as fh:
        fh.write(table.summary())
    return {"csv": csv_path, "traces": traces_path, "summary": summary_path}
