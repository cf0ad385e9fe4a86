"""Budgeted tour planning for robot teams over partitioned vertex sets.

Each robot is planned in turn with a cost-benefit greedy: repeatedly insert the
vertex with the best marginal-reward to insertion-cost ratio at its cheapest
position, keep the tour 2-opt tight, and stop once nothing fits the budget.
Marginal rewards are taken against the visit counts accumulated by the robots
planned earlier, which is what makes the sequential scheme respect the shared
submodular objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .rewards import DEFAULT_DECAYS, DecaySet, marginal_gains
from .scenario import Environment

# Approximation guarantee of the sequential greedy: reward >= OPT / (1 + eta).
SEQUENTIAL_GREEDY_ETA = 2.0 / (1.0 - 1.0 / math.e)


def approximation_floor() -> float:
    """Worst-case fraction of the optimal reward the solver is allowed to return."""
    return 1.0 / (1.0 + SEQUENTIAL_GREEDY_ETA)


@dataclass
class Tour:
    """One robot's closed walk: depot, interior vertices in visiting order, depot."""

    robot: int
    vertices: tuple[int, ...]
    length: float

    def __post_init__(self) -> None:
        self.vertices = tuple(int(v) for v in self.vertices)

    def interior(self) -> tuple[int, ...]:
        return self.vertices[1:-1]


@dataclass
class TourSet:
    """One tour per robot, in robot order."""

    tours: tuple[Tour, ...]

    def __post_init__(self) -> None:
        self.tours = tuple(self.tours)

    def to_dict(self, env: Optional[Environment] = None) -> dict:
        payload = {
            "tours": [
                {"robot": t.robot, "vertices": list(t.vertices), "length": t.length}
                for t in self.tours
            ]
        }
        if env is not None:
            from .rewards import visit_counts

            payload["visit_counts"] = [int(c) for c in visit_counts(self, env)]
        return payload

    @classmethod
    def from_dict(cls, data: dict) -> "TourSet":
        return cls(
            tours=tuple(
                Tour(robot=int(t["robot"]), vertices=tuple(t["vertices"]),
                     length=float(t["length"]))
                for t in data["tours"]
            )
        )


def tour_length(env: Environment, vertices: list[int]) -> float:
    """Total edge length of a vertex sequence."""
    if len(vertices) < 2:
        return 0.0
    arr = np.asarray(vertices)
    return float(env.distance_matrix[arr[:-1], arr[1:]].sum())


def _two_opt(vertices: list[int], dist: np.ndarray) -> tuple[list[int], float]:
    """Tighten a closed tour with best-improvement 2-opt until no move helps."""
    arr = np.array(vertices)
    n = len(arr)
    if n > 4:
        while True:
            pred = arr[:-2]
            cur = arr[1:-1]
            nxt = arr[2:]
            d_in = dist[pred, cur]
            d_out = dist[cur, nxt]
            gain = (
                d_in[:, None]
                + d_out[None, :]
                - dist[pred[:, None], cur[None, :]]
                - dist[cur[:, None], nxt[None, :]]
            )
            k = len(cur)
            gain[np.tril_indices(k)] = -np.inf
            flat = int(np.argmax(gain))
            i, j = divmod(flat, k)
            if gain[i, j] <= 1e-9:
                break
            arr[i + 1 : j + 2] = arr[i + 1 : j + 2][::-1]
    return list(int(v) for v in arr), float(dist[arr[:-1], arr[1:]].sum())


def single_op(
    env: Environment,
    robot: int,
    weights: np.ndarray,
    psi_offset: Optional[np.ndarray] = None,
    decays: DecaySet = DEFAULT_DECAYS,
) -> Tour:
    """Plan one robot's tour given visit counts already claimed by earlier robots."""
    weights = np.asarray(weights, dtype=float)
    if (weights < -1e-12).any():
        raise ValueError("weights must be non-negative")
    budget = env.budgets[robot]
    n = env.num_regions
    psi = np.zeros(n, dtype=int) if psi_offset is None else np.array(psi_offset, dtype=int)
    dist = env.distance_matrix
    depot = env.depot

    w_mat = weights.reshape(n, len(decays))
    region_mass = w_mat.sum(axis=1)
    region_idx = np.array([env.region_of(v) for v in env.partitions[robot]], dtype=int)
    part = np.array(env.partitions[robot], dtype=int)
    keep = region_mass[region_idx] > 1e-12
    cand = part[keep]
    cand_region = region_idx[keep]

    tour = [depot, depot]
    length = 0.0
    while cand.size:
        gains = marginal_gains(weights, psi, decays)
        g = gains[cand_region]
        t = np.asarray(tour)
        heads = t[:-1]
        tails = t[1:]
        base = dist[heads, tails]
        delta_mat = dist[np.ix_(heads, cand)] + dist[np.ix_(cand, tails)].T - base[:, None]
        pos = delta_mat.argmin(axis=0)
        delta = delta_mat[pos, np.arange(cand.size)]
        ratio = g / np.maximum(delta, 1e-12)
        order = np.lexsort((cand, -ratio))

        committed = -1
        for idx in order:
            v = int(cand[idx])
            p = int(pos[idx])
            trial = tour[: p + 1] + [v] + tour[p + 1 :]
            trial, trial_len = _two_opt(trial, dist)
            if trial_len <= budget + 1e-9:
                tour, length = trial, trial_len
                psi[cand_region[idx]] += 1
                committed = idx
                break
        if committed < 0:
            break
        mask = np.ones(cand.size, dtype=bool)
        mask[committed] = False
        cand = cand[mask]
        cand_region = cand_region[mask]

    return Tour(robot=robot, vertices=tour, length=length)


def solve_gtop(
    env: Environment,
    weights: np.ndarray,
    decays: DecaySet = DEFAULT_DECAYS,
) -> TourSet:
    """Plan all robots sequentially in ascending robot order."""
    weights = np.asarray(weights, dtype=float)
    expected = env.num_regions * len(decays)
    if weights.shape != (expected,):
        raise ValueError(f"weight vector has shape {weights.shape}, expected ({expected},)")
    psi = np.zeros(env.num_regions, dtype=int)
    tours = []
    for robot in range(env.num_robots):
        tour = single_op(env, robot, weights, psi_offset=psi, decays=decays)
        for v in tour.interior():
            psi[env.region_of(v)] += 1
        tours.append(tour)
    return TourSet(tours=tours)


def empty_tour_set(env: Environment) -> TourSet:
    """All robots stay at the depot."""
    return TourSet(
        tours=[Tour(robot=r, vertices=[env.depot, env.depot], length=0.0)
               for r in range(env.num_robots)]
    )


def validate_tour_set(tours: TourSet, env: Environment, tol: float = 1e-6) -> None:
    """Raise if any tour breaks the problem rules (budget, partition, repeats)."""
    if len(tours.tours) != env.num_robots:
        raise ValueError("tour set must contain one tour per robot")
    for r, tour in enumerate(tours.tours):
        if tour.robot != r:
            raise ValueError(f"tour {r} is labeled robot {tour.robot}")
        seq = tour.vertices
        if len(seq) < 2 or seq[0] != env.depot or seq[-1] != env.depot:
            raise ValueError(f"robot {r} tour must start and end at the depot")
        interior = seq[1:-1]
        if len(set(interior)) != len(interior):
            raise ValueError(f"robot {r} tour repeats a vertex")
        allowed = set(env.partitions[r])
        for v in interior:
            if v not in allowed:
                raise ValueError(f"vertex {v} is not in robot {r}'s partition")
        actual = tour_length(env, seq)
        if abs(actual - tour.length) > tol:
            raise ValueError(f"robot {r} tour length {tour.length} differs from {actual}")
        if actual > env.budgets[r] + tol:
            raise ValueError(f"robot {r} tour exceeds its budget")
