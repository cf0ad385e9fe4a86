"""Interactive learning sessions: propose a query, record the answer, repeat.

A session keeps the user-endorsed tour set as its current solution. In the default
noisy mode every iteration samples several cut configurations, computes a max-regret
candidate per configuration and presents the one with the best probability-weighted
regret. In deterministic mode the loop works on the raw cut polyhedron and stops as
soon as the candidate query cannot split it, certifying the current tours.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .gtop import TourSet, solve_gtop
from .polyhedron import Cut, Polyhedron, probable_regions
from .querygen import (
    INFORMATION_GAIN,
    MAX_REGRET,
    RANDOM_POSTERIOR,
    RANDOM_UNIFORM,
    STRATEGIES,
    GtopSolver,
    QueryProposal,
    check_termination,
    information_gain_query,
    max_regret_query,
    random_posterior_query,
    random_uniform_query,
)
from .rewards import DEFAULT_DECAYS, DecaySet, GroundTruthUser, reward
from .scenario import Environment
from .users import QueryOutcome, Responder


@dataclass
class LoopConfig:
    """Settings for one learning session."""

    max_iterations: int = 20
    n_regions_sampled: int = 10
    cut_prob: float = 0.8
    strategy: str = MAX_REGRET
    deterministic: bool = False
    seed: int = 0
    info_gain_samples: int = 300
    info_gain_beta: float = 20.0

    def validate(self) -> None:
        if self.max_iterations < 0:
            raise ValueError("max_iterations cannot be negative")
        if self.n_regions_sampled < 1:
            raise ValueError("n_regions_sampled must be at least 1")
        if not (0.5 < self.cut_prob <= 1):
            raise ValueError("cut_prob must lie in (0.5, 1]")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.deterministic and self.strategy != MAX_REGRET:
            raise ValueError("deterministic mode only applies to the max_regret strategy")


@dataclass
class SessionState:
    """Everything a session accumulates; mutated in place by step/apply."""

    iteration: int
    t_curr: TourSet
    w_curr: np.ndarray
    cuts: list[Cut]
    trace: list[dict]
    terminated: bool
    rng: np.random.Generator
    truth_weights: Optional[np.ndarray] = None
    opt_reward: Optional[float] = None


def init_session(
    env: Environment,
    config: LoopConfig,
    decays: DecaySet = DEFAULT_DECAYS,
    solver: GtopSolver = solve_gtop,
    truth: Optional[GroundTruthUser] = None,
) -> SessionState:
    """Start a session from the all-ones weight vector."""
    config.validate()
    dim = env.num_regions * len(decays)
    w0 = np.ones(dim)
    t0 = solver(env, w0, decays)
    truth_weights = None
    opt_reward = None
    if truth is not None:
        truth_weights = np.asarray(truth.weights, dtype=float)
        opt = solver(env, truth_weights, decays)
        opt_reward = reward(opt, truth_weights, env, decays)
    return SessionState(
        iteration=0,
        t_curr=t0,
        w_curr=w0,
        cuts=[],
        trace=[],
        terminated=config.max_iterations == 0,
        rng=np.random.default_rng(config.seed),
        truth_weights=truth_weights,
        opt_reward=opt_reward,
    )


def propose_query(
    state: SessionState,
    env: Environment,
    config: LoopConfig,
    decays: DecaySet = DEFAULT_DECAYS,
    solver: GtopSolver = solve_gtop,
) -> Optional[QueryProposal]:
    """Produce the next query, or None when the session is over.

    Advances the session rng; call it once per iteration.
    """
    if state.terminated or state.iteration >= config.max_iterations:
        return None
    dim = env.num_regions * len(decays)

    if config.strategy == MAX_REGRET:
        if config.deterministic:
            poly = Polyhedron(dim, tuple(state.cuts))
            proposal = max_regret_query(env, state.t_curr, poly, decays, solver,
                                        rng=state.rng)
            proposal.discounted_regret = proposal.regret
            proposal.region_prob = 1.0
            if check_termination(env, state.t_curr, proposal, poly, decays):
                state.terminated = True
                return None
            return proposal
        regions = probable_regions(dim, state.cuts, config.n_regions_sampled,
                                   config.cut_prob, state.rng)
        best = None
        best_score = -np.inf
        for region, prob in regions:
            proposal = max_regret_query(env, state.t_curr, region, decays, solver,
                                        rng=state.rng)
            proposal.region_prob = prob
            proposal.discounted_regret = prob * proposal.regret
            if proposal.discounted_regret > best_score + 1e-15:
                best_score = proposal.discounted_regret
                best = proposal
        return best

    if config.strategy == RANDOM_UNIFORM:
        return random_uniform_query(env, state.rng, decays, solver)
    if config.strategy == RANDOM_POSTERIOR:
        return random_posterior_query(env, state.cuts, config.cut_prob, state.rng,
                                      decays, solver)
    if config.strategy == INFORMATION_GAIN:
        return information_gain_query(
            env, state.t_curr, state.cuts, config.n_regions_sampled,
            config.info_gain_samples, config.cut_prob, state.rng, decays, solver,
            beta=config.info_gain_beta,
        )
    raise ValueError(f"unknown strategy {config.strategy!r}")


def apply_choice(
    state: SessionState,
    env: Environment,
    config: LoopConfig,
    proposal: QueryProposal,
    outcome: QueryOutcome,
    decays: DecaySet = DEFAULT_DECAYS,
) -> SessionState:
    """Fold one answered query into the session."""
    if outcome.chosen not in (1, 2):
        raise ValueError("chosen must be 1 or 2")
    shown_first = state.t_curr
    if outcome.chosen == 2:
        state.t_curr = proposal.tours
        state.w_curr = proposal.weights
    if outcome.informative and outcome.cut is not None:
        cut = outcome.cut
        cut.query_id = state.iteration
        state.cuts.append(cut)
    state.iteration += 1
    record = {
        "k": state.iteration,
        "strategy": proposal.strategy,
        "shown": {
            "option1": shown_first.to_dict(env),
            "option2": proposal.tours.to_dict(env),
        },
        "chosen": outcome.chosen,
        "cut_direction": None if outcome.cut is None
        else [float(x) for x in outcome.cut.direction],
        "discounted_regret": proposal.discounted_regret,
        "info_gain": proposal.info_gain,
        "prob_chosen": outcome.prob_chosen,
    }
    if state.truth_weights is not None:
        record["reward_ratio"] = session_ratio(state, env, decays)
    state.trace.append(record)
    if state.iteration >= config.max_iterations:
        state.terminated = True
    return state


def session_ratio(state: SessionState, env: Environment,
                  decays: DecaySet = DEFAULT_DECAYS) -> float:
    """Current reward ratio against the session's cached optimum (truth required)."""
    if state.truth_weights is None:
        raise ValueError("session has no ground truth attached")
    if state.opt_reward is None or state.opt_reward <= 0:
        return 1.0
    return reward(state.t_curr, state.truth_weights, env, decays) / state.opt_reward


def step(
    state: SessionState,
    env: Environment,
    config: LoopConfig,
    responder: Responder,
    decays: DecaySet = DEFAULT_DECAYS,
    solver: GtopSolver = solve_gtop,
) -> Optional[QueryProposal]:
    """Propose, ask, record. Returns the shown proposal, or None when finished."""
    shown_current = state.t_curr
    proposal = propose_query(state, env, config, decays, solver)
    if proposal is None:
        return None
    outcome = responder(shown_current, proposal.tours)
    apply_choice(state, env, config, proposal, outcome, decays)
    return proposal


def run_learning_loop(
    env: Environment,
    config: LoopConfig,
    responder: Responder,
    decays: DecaySet = DEFAULT_DECAYS,
    solver: GtopSolver = solve_gtop,
    truth: Optional[GroundTruthUser] = None,
) -> tuple[TourSet, list[dict]]:
    """Run a full session and return the endorsed tours plus the trace."""
    state = init_session(env, config, decays, solver, truth)
    while not state.terminated and state.iteration < config.max_iterations:
        if step(state, env, config, responder, decays, solver) is None:
            break
    return state.t_curr, state.trace


def reward_ratio(
    tours: TourSet,
    truth: GroundTruthUser,
    env: Environment,
    decays: DecaySet = DEFAULT_DECAYS,
    solver: GtopSolver = solve_gtop,
) -> float:
    """Achieved fraction of the reward the solver reaches with the true weights.

    Can exceed 1: the reference tours are themselves heuristic. A zero-reward
    optimum (an indifferent user) counts as fully solved.
    """
    reference = solver(env, np.asarray(truth.weights, dtype=float), decays)
    denom = reward(reference, truth.weights, env, decays)
    if denom <= 0:
        return 1.0
    return reward(tours, truth.weights, env, decays) / denom


BASELINE_LEVELS = ("reward_decay", "reward", "decay", "ranking_decay")


def baseline_weights(
    env: Environment,
    truth: GroundTruthUser,
    level: str,
    decays: DecaySet = DEFAULT_DECAYS,
) -> np.ndarray:
    """Surrogate weights encoding how much upfront knowledge each level carries.

    ``reward_decay`` uses the exact hidden weights; ``reward`` knows per-region
    magnitudes but hedges across decay slots; ``decay`` knows each region's decay
    slot but not its magnitude; ``ranking_decay`` knows the decay slot and only the
    rank order of magnitudes.
    """
    n = env.num_regions
    width = len(decays)
    magnitudes = np.array(
        [truth.weights[i * width + truth.chosen_decay[i]] for i in range(n)]
    )
    w_hat = np.zeros(n * width)
    if level == "reward_decay":
        w_hat = np.asarray(truth.weights, dtype=float).copy()
    elif level == "reward":
        for i in range(n):
            w_hat[i * width : (i + 1) * width] = magnitudes[i] / width
    elif level == "decay":
        for i in range(n):
            w_hat[i * width + truth.chosen_decay[i]] = 1.0
    elif level == "ranking_decay":
        order = sorted(range(n), key=lambda i: (-magnitudes[i], i))
        ranks = np.empty(n, dtype=int)
        for position, i in enumerate(order):
            ranks[i] = position + 1
        for i in range(n):
            w_hat[i * width + truth.chosen_decay[i]] = (n - ranks[i] + 1) / n
    else:
        raise ValueError(f"unknown baseline level {level!r}")
    return w_hat


def baseline_tours(
    env: Environment,
    truth: GroundTruthUser,
    level: str,
    decays: DecaySet = DEFAULT_DECAYS,
    solver: GtopSolver = solve_gtop,
) -> TourSet:
    """Plan directly from richer upfront knowledge instead of learned cuts."""
    return solver(env, baseline_weights(env, truth, level, decays), decays)
