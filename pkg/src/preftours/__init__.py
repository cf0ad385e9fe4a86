"""Multi-robot tour planning with preference learning from pairwise choices."""

from .gtop import SEQUENTIAL_GREEDY_ETA, Tour, TourSet, approximation_floor, single_op, solve_gtop
from .polyhedron import Cut, Polyhedron, is_valid_cut, probable_regions, solve_lp
from .rewards import (
    DEFAULT_DECAYS,
    DecaySet,
    GroundTruthUser,
    basis_value,
    features,
    full_coverage_reward,
    reward,
    sample_user,
)
from .scenario import Environment, ScenarioConfig, generate_random_scenario, load_scenario
from .session import LoopConfig, baseline_tours, reward_ratio, run_learning_loop
from .users import UserModel, choice_probability, make_responder, respond

__version__ = "0.1.0"

__all__ = [
    "Cut",
    "DecaySet",
    "DEFAULT_DECAYS",
    "Environment",
    "GroundTruthUser",
    "LoopConfig",
    "Polyhedron",
    "ScenarioConfig",
    "SEQUENTIAL_GREEDY_ETA",
    "Tour",
    "TourSet",
    "UserModel",
    "approximation_floor",
    "baseline_tours",
    "basis_value",
    "choice_probability",
    "features",
    "full_coverage_reward",
    "generate_random_scenario",
    "is_valid_cut",
    "load_scenario",
    "make_responder",
    "probable_regions",
    "respond",
    "reward",
    "reward_ratio",
    "run_learning_loop",
    "sample_user",
    "single_op",
    "solve_gtop",
    "solve_lp",
]
