"""Query generation: max-regret, random baselines and information gain.

The max-regret query looks for the feasible weight vector under which the current
tours look worst, then asks the tour solver what those weights would buy. Because
all features are non-negative, the minimum of ``phi(current) . w`` is always 0 and
is attained on the face where every slot the current tours collect is zeroed; the
minimizers differ only in how they weight everything the current tours ignore.
Which vertex of that face we return matters a great deal for learning: always
returning the same corner makes every iteration ask the same question, so when an
rng is supplied we pick the face vertex extremal in a random direction, giving each
sampled polyhedron its own candidate. Without an rng the largest vertex (every free
slot at 1) is returned for reproducible single-shot use. The origin (which is always
feasible and never cut off) comes back only when the face collapses, which is
exactly the loop's stopping signal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .gtop import TourSet, solve_gtop
from .polyhedron import (
    Cut,
    Polyhedron,
    is_valid_cut,
    probable_regions,
    solve_lp,
)
from .rewards import DEFAULT_DECAYS, DecaySet, features
from .scenario import Environment

GtopSolver = Callable[[Environment, np.ndarray, DecaySet], TourSet]

MAX_REGRET = "max_regret"
RANDOM_UNIFORM = "random_uniform"
RANDOM_POSTERIOR = "random_posterior"
INFORMATION_GAIN = "information_gain"

STRATEGIES = (MAX_REGRET, RANDOM_UNIFORM, RANDOM_POSTERIOR, INFORMATION_GAIN)

# Fraction of free slots a sampled adversarial vertex activates on average.
# Lower values yield more concentrated candidate tours.
FACE_ACTIVATION = 0.5


@dataclass
class QueryProposal:
    """A candidate alternative to the current tours."""

    strategy: str
    weights: np.ndarray
    tours: TourSet
    regret: Optional[float] = None
    discounted_regret: Optional[float] = None
    region_prob: Optional[float] = None
    info_gain: Optional[float] = None


def max_regret_query(
    env: Environment,
    t_curr: TourSet,
    poly: Polyhedron,
    decays: DecaySet = DEFAULT_DECAYS,
    solver: GtopSolver = solve_gtop,
    rng: Optional[np.random.Generator] = None,
) -> QueryProposal:
    """Adversarial weights for the current tours, and the tours they would buy."""
    phi_curr = features(t_curr, env, decays)
    free = phi_curr <= 1e-12
    w_new = np.zeros(poly.dimension)
    if free.any():
        sub_cuts = []
        for cut in poly.cuts:
            restricted = cut.direction[free]
            if np.any(restricted != 0):
                sub_cuts.append(Cut(restricted, query_id=cut.query_id,
                                    chosen=cut.chosen, negated=cut.negated))
        sub_poly = Polyhedron(int(free.sum()), tuple(sub_cuts))
        objective = np.ones(sub_poly.dimension) if rng is None \
            else rng.uniform(0.0, 1.0, sub_poly.dimension) - (1.0 - FACE_ACTIVATION)
        result = solve_lp(objective, sub_poly, "max")
        w_new[free] = result.optimizer
        w_new[np.abs(w_new) < 1e-12] = 0.0
        w_new[np.abs(w_new - 1.0) < 1e-12] = 1.0
    t_new = solver(env, w_new, decays)
    regret = float((features(t_new, env, decays) - phi_curr) @ w_new)
    return QueryProposal(strategy=MAX_REGRET, weights=w_new, tours=t_new, regret=regret)


def check_termination(
    env: Environment,
    t_curr: TourSet,
    proposal: QueryProposal,
    poly: Polyhedron,
    decays: DecaySet = DEFAULT_DECAYS,
) -> bool:
    """True when the candidate query can no longer split the feasible weights."""
    direction = features(proposal.tours, env, decays) - features(t_curr, env, decays)
    if np.max(np.abs(direction)) <= 1e-9:
        return True
    return not is_valid_cut(direction, poly)


def random_uniform_query(
    env: Environment,
    rng: np.random.Generator,
    decays: DecaySet = DEFAULT_DECAYS,
    solver: GtopSolver = solve_gtop,
) -> QueryProposal:
    """Tours planned for a uniformly random weight vector."""
    dim = env.num_regions * len(decays)
    w = rng.random(dim)
    return QueryProposal(strategy=RANDOM_UNIFORM, weights=w, tours=solver(env, w, decays))


def random_posterior_query(
    env: Environment,
    cuts: Sequence[Cut],
    q: float,
    rng: np.random.Generator,
    decays: DecaySet = DEFAULT_DECAYS,
    solver: GtopSolver = solve_gtop,
) -> QueryProposal:
    """Extreme point of one sampled cut configuration along a random direction."""
    dim = env.num_regions * len(decays)
    region, prob = probable_regions(dim, cuts, 1, q, rng)[0]
    direction = rng.uniform(-1.0, 1.0, dim)
    w = solve_lp(direction, region, "max").optimizer
    return QueryProposal(
        strategy=RANDOM_POSTERIOR,
        weights=w,
        tours=solver(env, w, decays),
        region_prob=prob,
    )


def sample_weights_from_region(
    poly: Polyhedron,
    count: int,
    rng: np.random.Generator,
    attempts_per_sample: int = 50,
) -> tuple[np.ndarray, bool]:
    """Uniform samples from a cut polytope via rejection from the box.

    Falls back to plain box samples for the shortfall when the acceptance rate is
    too low; the second return value reports whether that happened.
    """
    mat = poly.cut_matrix()
    if mat is None:
        return rng.random((count, poly.dimension)), False
    limit = attempts_per_sample * count
    accepted: list[np.ndarray] = []
    attempts = 0
    while len(accepted) < count and attempts < limit:
        batch = min(limit - attempts, max(count, 256))
        draws = rng.random((batch, poly.dimension))
        attempts += batch
        ok = (draws @ mat.T >= -1e-12).all(axis=1)
        accepted.extend(draws[ok])
    if len(accepted) >= count:
        return np.array(accepted[:count]), False
    shortfall = count - len(accepted)
    fill = rng.random((shortfall, poly.dimension))
    if accepted:
        return np.vstack([np.array(accepted), fill]), True
    return fill, True


def _binary_entropy(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, 1.0)
    out = np.zeros_like(p)
    mask = (p > 0) & (p < 1)
    q = p[mask]
    out[mask] = -(q * np.log2(q) + (1 - q) * np.log2(1 - q))
    return out


def information_gain_query(
    env: Environment,
    t_curr: TourSet,
    cuts: Sequence[Cut],
    n_candidates: int,
    m_samples: int,
    q: float,
    rng: np.random.Generator,
    decays: DecaySet = DEFAULT_DECAYS,
    solver: GtopSolver = solve_gtop,
    beta: float = 20.0,
) -> QueryProposal:
    """Pick the candidate whose answer the sampled posterior is most unsure about.

    Mutual information between the answer and the weights is estimated with
    ``m_samples`` weight draws; a Boltzmann response model with the given beta
    plays the role of the assumed user.
    """
    dim = env.num_regions * len(decays)
    candidates: list[QueryProposal] = []
    for region, prob in probable_regions(dim, cuts, n_candidates, q, rng):
        direction = rng.uniform(-1.0, 1.0, dim)
        w = solve_lp(direction, region, "max").optimizer
        candidates.append(
            QueryProposal(
                strategy=INFORMATION_GAIN,
                weights=w,
                tours=solver(env, w, decays),
                region_prob=prob,
            )
        )
    sample_region, _ = probable_regions(dim, cuts, 1, q, rng)[0]
    samples, _fallback = sample_weights_from_region(sample_region, m_samples, rng)
    phi_curr = features(t_curr, env, decays)
    best = None
    best_gain = -np.inf
    for cand in candidates:
        diff = features(cand.tours, env, decays) - phi_curr
        exponents = np.clip(beta * (samples @ diff), -60.0, 60.0)
        p_first = 1.0 / (1.0 + np.exp(exponents))
        gain = float(_binary_entropy(np.array([p_first.mean()]))[0] - _binary_entropy(p_first).mean())
        cand.info_gain = gain
        if gain > best_gain + 1e-15:
            best_gain = gain
            best = cand
    assert best is not None
    return best
