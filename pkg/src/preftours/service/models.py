"""Request and response schemas for the HTTP service."""

from __future__ import annotations

from typing import Optional, Union

from pydantic import BaseModel, Field


class Point(BaseModel):
    x: float
    y: float


class RegionModel(BaseModel):
    id: int
    points: list[Point]


class ScenarioModel(BaseModel):
    """Inline scenario in the same schema as scenario files."""

    name: Optional[str] = None
    depot: Point
    regions: list[RegionModel]
    num_robots: int
    budget_factor: Optional[float] = None
    budgets: Optional[list[float]] = None


class SessionConfigModel(BaseModel):
    max_iterations: int = Field(default=20, ge=0)
    n_regions_sampled: int = Field(default=10, ge=1)
    cut_prob: float = Field(default=0.8, gt=0.5, le=1.0)
    strategy: str = "max_regret"
    deterministic: bool = False
    seed: int = 0


class SessionCreateRequest(BaseModel):
    scenario: Union[str, ScenarioModel] = "coastline"
    config: SessionConfigModel = SessionConfigModel()


class TourModel(BaseModel):
    robot: int
    vertices: list[int]
    length: float


class TourSetModel(BaseModel):
    tours: list[TourModel]
    visit_counts: list[int]


class RegionGeometry(BaseModel):
    index: int
    id: int
    points: list[Point]
    vertex_ids: list[int]
    mean: Point


class GeometryModel(BaseModel):
    depot: Point
    regions: list[RegionGeometry]
    budgets: list[float]
    vertex_positions: dict[int, Point]


class StatusResponse(BaseModel):
    id: str
    status: str
    iteration: int
    max_iterations: int
    cuts: int


class QueryResponse(BaseModel):
    id: str
    iteration: int
    option1: TourSetModel
    option2: TourSetModel
    geometry: GeometryModel


class ComputingResponse(BaseModel):
    id: str
    status: str = "computing"
    retry_after: float = 0.5


class ChoiceRequest(BaseModel):
    chosen: int
    iteration: Optional[int] = None


class ResultResponse(BaseModel):
    id: str
    status: str
    iteration: int
    final_tours: TourSetModel
    trace: list[dict]
    cuts: int


class ScenarioInfo(BaseModel):
    name: str
    num_regions: int
    num_robots: int
