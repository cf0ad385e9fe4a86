"""Independent reference implementations used to check the package.

Everything here is deliberately naive: vertex enumeration for linear programs,
exhaustive subset-and-permutation search for tour planning, and a loop-based
feature evaluator. Slow but obviously correct on small inputs.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from preftours.gtop import Tour, TourSet, tour_length
from preftours.rewards import DEFAULT_DECAYS, DecaySet
from preftours.scenario import Environment, environment_from_dict


def make_env(
    points_by_region,
    depot=(0.0, 0.0),
    num_robots=1,
    budgets=None,
    budget_factor=2.0,
    name="test",
):
    """Build an Environment from literal region point lists."""
    data = {
        "name": name,
        "depot": {"x": float(depot[0]), "y": float(depot[1])},
        "regions": [
            {"id": i, "points": [{"x": float(x), "y": float(y)} for x, y in pts]}
            for i, pts in enumerate(points_by_region)
        ],
        "num_robots": num_robots,
    }
    if budgets is not None:
        data["budgets"] = list(budgets)
    else:
        data["budget_factor"] = budget_factor
    return environment_from_dict(data)


def features_oracle(counts, decays=DEFAULT_DECAYS) -> np.ndarray:
    """Loop evaluation of the geometric basis, one slot per (region, decay)."""
    out = []
    for c in counts:
        for gamma in decays:
            out.append(sum(gamma ** (a - 1) for a in range(1, int(c) + 1)))
    return np.array(out, dtype=float)


def reward_of_counts(counts, weights, decays=DEFAULT_DECAYS) -> float:
    return float(features_oracle(counts, decays) @ np.asarray(weights, dtype=float))


# ---------------------------------------------------------------------------
# Linear programming by exhaustive vertex enumeration.


def polytope_rows(dimension: int, cuts) -> tuple[np.ndarray, np.ndarray]:
    """All constraints as rows of A w >= b: box lower, box upper, cuts."""
    eye = np.eye(dimension)
    rows = [eye, -eye]
    rhs = [np.zeros(dimension), -np.ones(dimension)]
    for cut in cuts:
        direction = np.asarray(cut.direction if hasattr(cut, "direction") else cut,
                               dtype=float)
        rows.append(direction.reshape(1, -1))
        rhs.append(np.zeros(1))
    return np.vstack(rows), np.concatenate(rhs)


def enumerate_vertices(dimension: int, cuts, tol: float = 1e-9) -> np.ndarray:
    """Every vertex of {0 <= w <= 1, d.w >= 0 for all cuts}, deduplicated."""
    A, b = polytope_rows(dimension, cuts)
    n = A.shape[0]
    found = []
    for subset in itertools.combinations(range(n), dimension):
        sub = A[list(subset)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        w = np.linalg.solve(sub, b[list(subset)])
        if np.all(A @ w >= b - tol):
            found.append(np.clip(w, 0.0, 1.0))
    unique: list[np.ndarray] = []
    for w in found:
        if not any(np.allclose(w, u, atol=1e-8) for u in unique):
            unique.append(w)
    return np.array(unique)


def lp_oracle(objective, dimension: int, cuts, sense: str = "max") -> float:
    """Optimal value of objective . w over the cut box, by vertex enumeration."""
    vertices = enumerate_vertices(dimension, cuts)
    values = vertices @ np.asarray(objective, dtype=float)
    return float(values.max() if sense == "max" else values.min())


# ---------------------------------------------------------------------------
# Exhaustive tour planning.


def exact_shortest_tour(env: Environment, ids) -> tuple[float, list[int]]:
    """Minimum-length depot round trip through the given vertex ids."""
    ids = list(ids)
    if not ids:
        return 0.0, [0, 0]
    best_len = math.inf
    best_order = None
    for perm in itertools.permutations(ids):
        length = tour_length(env, [0, *perm, 0])
        if length < best_len - 1e-12:
            best_len = length
            best_order = list(perm)
    return best_len, [0, *best_order, 0]


def feasible_subsets(env: Environment, robot: int):
    """Every budget-feasible subset of one robot's vertices with its best tour."""
    vertices = sorted(env.partitions[robot])
    budget = env.budgets[robot]
    out = []
    for size in range(len(vertices) + 1):
        for subset in itertools.combinations(vertices, size):
            length, order = exact_shortest_tour(env, subset)
            if length <= budget + 1e-9:
                out.append((subset, length, order))
    return out


def brute_force_gtop(
    env: Environment, weights, decays: DecaySet = DEFAULT_DECAYS
) -> tuple[float, TourSet]:
    """Globally optimal tour set by exhaustive search. Tiny instances only.

    Ties break toward smaller total length, then enumeration order, so the
    result is deterministic.
    """
    weights = np.asarray(weights, dtype=float)
    per_robot = [feasible_subsets(env, r) for r in range(env.num_robots)]
    best_reward = -math.inf
    best_total = math.inf
    best_tours = None
    for combo in itertools.product(*per_robot):
        counts = np.zeros(env.num_regions, dtype=int)
        total = 0.0
        for subset, length, _ in combo:
            total += length
            for vid in subset:
                counts[env.region_of(vid)] += 1
        value = reward_of_counts(counts, weights, decays)
        better = value > best_reward + 1e-12
        tie = abs(value - best_reward) <= 1e-12 and total < best_total - 1e-12
        if better or tie:
            best_reward = value
            best_total = total
            best_tours = TourSet(
                tours=tuple(
                    Tour(robot=r, vertices=tuple(order), length=length)
                    for r, (_, length, order) in enumerate(combo)
                )
            )
    return best_reward, best_tours


def make_exact_solver():
    """A drop-in solver callable backed by exhaustive search."""

    def solver(env, weights, decays=DEFAULT_DECAYS):
        _, tours = brute_force_gtop(env, weights, decays)
        return tours

    return solver
