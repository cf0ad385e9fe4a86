"""Monitoring scenarios: regions of observation points, a shared depot, robots with budgets.

A scenario file or generator config expands into an :class:`Environment` where every
observation point is replicated once per robot, so each robot owns a private copy of
every location (robots may observe the same spot independently). Travel costs are
Euclidean on the plane and the graph is complete.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class ScenarioError(ValueError):
    """Raised when a scenario file or config fails validation."""


@dataclass
class Vertex:
    """A single visitable point. The depot has no region and no robot."""

    id: int
    x: float
    y: float
    region: Optional[int] = None
    robot: Optional[int] = None


@dataclass
class Environment:
    """Immutable problem instance shared by the planner, the harness and the service.

    ``regions[i]`` lists the vertex ids belonging to region ``i`` across all robots;
    ``partitions[r]`` lists the vertex ids robot ``r`` may visit. Distances are
    precomputed on construction and exposed through :meth:`distance`.
    """

    name: str
    vertices: list[Vertex]
    num_robots: int
    budgets: tuple[float, ...]
    regions: tuple[tuple[int, ...], ...]
    region_ids: tuple[int, ...]
    positions: np.ndarray = field(repr=False, default=None)
    _dist: np.ndarray = field(repr=False, default=None)

    def __post_init__(self) -> None:
        if self.positions is None:
            self.positions = np.array([[v.x, v.y] for v in self.vertices], dtype=float)
        if self._dist is None:
            diff = self.positions[:, None, :] - self.positions[None, :, :]
            self._dist = np.sqrt((diff**2).sum(axis=2))
        self._partitions = tuple(
            tuple(v.id for v in self.vertices if v.robot == r) for r in range(self.num_robots)
        )
        self._region_of = {v.id: v.region for v in self.vertices}

    @property
    def depot(self) -> int:
        return 0

    @property
    def num_regions(self) -> int:
        return len(self.regions)

    @property
    def partitions(self) -> tuple[tuple[int, ...], ...]:
        return self._partitions

    def region_of(self, vertex_id: int) -> Optional[int]:
        return self._region_of[vertex_id]

    def distance(self, u: int, v: int) -> float:
        return float(self._dist[u, v])

    @property
    def distance_matrix(self) -> np.ndarray:
        return self._dist

    def region_means(self) -> np.ndarray:
        """Mean position of each region's points, shape (num_regions, 2)."""
        out = np.zeros((self.num_regions, 2))
        for i, members in enumerate(self.regions):
            out[i] = self.positions[list(members)].mean(axis=0)
        return out

    def depot_region_distances(self) -> np.ndarray:
        """Distance from the depot to each region mean."""
        means = self.region_means()
        d = means - self.positions[self.depot]
        return np.sqrt((d**2).sum(axis=1))


@dataclass
class ScenarioConfig:
    """Knobs for the random scenario generator."""

    num_regions: int = 20
    num_robots: int = 4
    budget_factor: float = 2.0
    arena: tuple[float, float] = (100.0, 100.0)
    points_range: tuple[int, int] = (1, 5)
    region_radius: float = 3.0
    seed: int = 0

    def validate(self) -> None:
        if self.num_regions < 1:
            raise ScenarioError("num_regions must be at least 1")
        if self.num_robots < 1:
            raise ScenarioError("num_robots must be at least 1")
        if self.budget_factor <= 0:
            raise ScenarioError("budget_factor must be positive")
        lo, hi = self.points_range
        if not (1 <= lo <= hi <= 5):
            raise ScenarioError("points_range must lie within [1, 5]")
        if self.arena[0] <= 0 or self.arena[1] <= 0:
            raise ScenarioError("arena sides must be positive")


def generate_scenario_dict(config: ScenarioConfig) -> dict:
    """Sample a scenario in the file schema (unreplicated points, one entry per region)."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    width, height = config.arena
    depot = {"x": width / 2.0, "y": height / 2.0}
    lo, hi = config.points_range
    regions = []
    for i in range(config.num_regions):
        cx = float(rng.uniform(0, width))
        cy = float(rng.uniform(0, height))
        count = int(rng.integers(lo, hi + 1))
        points = []
        for _ in range(count):
            angle = rng.uniform(0, 2 * math.pi)
            radius = config.region_radius * math.sqrt(rng.uniform())
            points.append(
                {"x": cx + radius * math.cos(angle), "y": cy + radius * math.sin(angle)}
            )
        regions.append({"id": i, "points": points})
    return {
        "name": f"random-{config.seed}",
        "depot": depot,
        "regions": regions,
        "num_robots": config.num_robots,
        "budget_factor": config.budget_factor,
    }


def _require(data: dict, key: str) -> object:
    if key not in data:
        raise ScenarioError(f"scenario is missing required key {key!r}")
    return data[key]


def environment_from_dict(data: dict) -> Environment:
    """Validate a scenario dict and expand it into an Environment.

    Every point is replicated once per robot; replicas share coordinates and region
    but belong to different robot partitions.
    """
    depot_entry = _require(data, "depot")
    try:
        depot_xy = (float(depot_entry["x"]), float(depot_entry["y"]))
    except (TypeError, KeyError) as exc:
        raise ScenarioError("depot must provide numeric x and y") from exc

    raw_regions = _require(data, "regions")
    if not isinstance(raw_regions, list) or not raw_regions:
        raise ScenarioError("regions must be a non-empty list")

    num_robots = int(_require(data, "num_robots"))
    if num_robots < 1:
        raise ScenarioError("num_robots must be at least 1")

    seen_ids: set[int] = set()
    seen_points: dict[tuple[float, float], int] = {}
    region_points: list[list[tuple[float, float]]] = []
    region_ids: list[int] = []
    for entry in raw_regions:
        rid = entry.get("id")
        if rid is None:
            raise ScenarioError("every region needs an id")
        if rid in seen_ids:
            raise ScenarioError(f"region id {rid} appears more than once")
        seen_ids.add(rid)
        points = entry.get("points")
        if not points:
            raise ScenarioError(f"region {rid} has no points")
        coords = []
        for p in points:
            try:
                xy = (float(p["x"]), float(p["y"]))
            except (TypeError, KeyError) as exc:
                raise ScenarioError(f"region {rid} has a malformed point") from exc
            owner = seen_points.get(xy)
            if owner is not None and owner != rid:
                raise ScenarioError(
                    f"point {xy} belongs to both region {owner} and region {rid}"
                )
            seen_points[xy] = rid
            coords.append(xy)
        region_points.append(coords)
        region_ids.append(int(rid))

    vertices = [Vertex(0, depot_xy[0], depot_xy[1], region=None, robot=None)]
    regions: list[list[int]] = [[] for _ in region_points]
    next_id = 1
    for robot in range(num_robots):
        for i, coords in enumerate(region_points):
            for (x, y) in coords:
                vertices.append(Vertex(next_id, x, y, region=i, robot=robot))
                regions[i].append(next_id)
                next_id += 1

    if "budgets" in data:
        budgets = tuple(float(b) for b in data["budgets"])
        if len(budgets) != num_robots:
            raise ScenarioError(
                f"budgets has {len(budgets)} entries but num_robots is {num_robots}"
            )
    else:
        factor = float(_require(data, "budget_factor"))
        if factor <= 0:
            raise ScenarioError("budget_factor must be positive")
        means = [np.mean(np.array(coords), axis=0) for coords in region_points]
        depot_arr = np.array(depot_xy)
        furthest = max(float(np.linalg.norm(m - depot_arr)) for m in means)
        budgets = tuple(factor * furthest for _ in range(num_robots))
    if any(b <= 0 for b in budgets):
        raise ScenarioError("budgets must be positive")

    return Environment(
        name=str(data.get("name", "scenario")),
        vertices=vertices,
        num_robots=num_robots,
        budgets=budgets,
        regions=tuple(tuple(r) for r in regions),
        region_ids=tuple(region_ids),
    )


def load_scenario(path: str) -> Environment:
    """Read a scenario JSON file and expand it into an Environment."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario file {path} is not valid JSON: {exc}") from exc
    return environment_from_dict(data)


def generate_random_scenario(config: ScenarioConfig) -> Environment:
    """Sample a random scenario and expand it in one step."""
    return environment_from_dict(generate_scenario_dict(config))
