"""FastAPI wiring: sessions, queries, choices, results and shipped scenarios."""

from __future__ import annotations

import json
from contextlib import asynccontextmanager
from importlib import resources

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from ..rewards import DEFAULT_DECAYS, visit_counts
from ..scenario import Environment, ScenarioError, environment_from_dict
from ..session import LoopConfig
from .manager import (
    AWAITING,
    COMPUTING,
    FINISHED,
    ChoiceConflict,
    LiveSession,
    SessionManager,
    SessionNotFound,
    WrongStatus,
)
from .models import (
    ChoiceRequest,
    ComputingResponse,
    GeometryModel,
    Point,
    QueryResponse,
    RegionGeometry,
    ResultResponse,
    ScenarioInfo,
    ScenarioModel,
    SessionCreateRequest,
    StatusResponse,
    TourModel,
    TourSetModel,
)


def _data_dir():
    return resources.files("preftours") / "data"


def list_shipped_scenarios() -> list[str]:
    names = []
    for entry in _data_dir().iterdir():
        if entry.name.endswith(".json"):
            names.append(entry.name[: -len(".json")])
    return sorted(names)


def load_shipped_scenario(name: str) -> dict:
    entry = _data_dir() / f"{name}.json"
    try:
        return json.loads(entry.read_text())
    except FileNotFoundError:
        raise SessionNotFound(name)


def _tour_set_model(tours, env: Environment) -> TourSetModel:
    return TourSetModel(
        tours=[TourModel(robot=t.robot, vertices=list(t.vertices), length=t.length)
               for t in tours.tours],
        visit_counts=[int(c) for c in visit_counts(tours, env)],
    )


def _geometry(env: Environment) -> GeometryModel:
    depot = Point(x=env.positions[env.depot][0], y=env.positions[env.depot][1])
    means = env.region_means()
    regions = []
    for i, members in enumerate(env.regions):
        seen = set()
        points = []
        for v in members:
            xy = (float(env.positions[v][0]), float(env.positions[v][1]))
            if xy not in seen:
                seen.add(xy)
                points.append(Point(x=xy[0], y=xy[1]))
        regions.append(
            RegionGeometry(
                index=i,
                id=env.region_ids[i],
                points=points,
                vertex_ids=list(members),
                mean=Point(x=means[i][0], y=means[i][1]),
            )
        )
    positions = {
        v.id: Point(x=v.x, y=v.y) for v in env.vertices
    }
    return GeometryModel(
        depot=depot,
        regions=regions,
        budgets=list(env.budgets),
        vertex_positions=positions,
    )


def _status(session: LiveSession) -> StatusResponse:
    return StatusResponse(
        id=session.id,
        status=session.status,
        iteration=session.state.iteration,
        max_iterations=session.config.max_iterations,
        cuts=len(session.state.cuts),
    )


def create_app() -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        app.state.manager.shutdown()

    app = FastAPI(title="preftours service", lifespan=lifespan)
    app.state.manager = SessionManager()
    manager: SessionManager = app.state.manager

    @app.post("/sessions", response_model=StatusResponse, status_code=201)
    def create_session(request: SessionCreateRequest) -> StatusResponse:
        if isinstance(request.scenario, str):
            try:
                data = load_shipped_scenario(request.scenario)
            except SessionNotFound:
                raise HTTPException(404, f"unknown scenario {request.scenario!r}; "
                                         f"shipped: {list_shipped_scenarios()}")
        else:
            data = request.scenario.model_dump(exclude_none=True)
        try:
            env = environment_from_dict(data)
        except ScenarioError as exc:
            raise HTTPException(400, str(exc))
        cfg = request.config
        config = LoopConfig(
            max_iterations=cfg.max_iterations,
            n_regions_sampled=cfg.n_regions_sampled,
            cut_prob=cfg.cut_prob,
            strategy=cfg.strategy,
            deterministic=cfg.deterministic,
            seed=cfg.seed,
        )
        try:
            config.validate()
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        session = manager.create(env, config)
        return _status(session)

    @app.get("/sessions/{session_id}/status", response_model=StatusResponse)
    def get_status(session_id: str) -> StatusResponse:
        try:
            session = manager.get(session_id)
        except SessionNotFound:
            raise HTTPException(404, "unknown session")
        with session.lock:
            return _status(session)

    @app.get("/sessions/{session_id}/query")
    def get_query(session_id: str):
        try:
            session = manager.get(session_id)
        except SessionNotFound:
            raise HTTPException(404, "unknown session")
        with session.lock:
            if session.status == FINISHED:
                raise HTTPException(409, "session is finished")
            if session.status == COMPUTING:
                body = ComputingResponse(id=session.id)
                return JSONResponse(status_code=202, content=body.model_dump())
            assert session.pending is not None
            payload = QueryResponse(
                id=session.id,
                iteration=session.state.iteration + 1,
                option1=_tour_set_model(session.state.t_curr, session.env),
                option2=_tour_set_model(session.pending.tours, session.env),
                geometry=_geometry(session.env),
            )
        return payload

    @app.post("/sessions/{session_id}/choice", response_model=StatusResponse)
    def post_choice(session_id: str, request: ChoiceRequest) -> StatusResponse:
        try:
            session = manager.choose(session_id, request.chosen, request.iteration)
        except SessionNotFound:
            raise HTTPException(404, "unknown session")
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        except (WrongStatus, ChoiceConflict) as exc:
            raise HTTPException(409, str(exc))
        with session.lock:
            return _status(session)

    @app.get("/sessions/{session_id}/result", response_model=ResultResponse)
    def get_result(session_id: str) -> ResultResponse:
        try:
            session = manager.get(session_id)
        except SessionNotFound:
            raise HTTPException(404, "unknown session")
        with session.lock:
            if session.status != FINISHED:
                raise HTTPException(409, f"session is {session.status}, not finished")
            return ResultResponse(
                id=session.id,
                status=session.status,
                iteration=session.state.iteration,
                final_tours=_tour_set_model(session.state.t_curr, session.env),
                trace=session.state.trace,
                cuts=len(session.state.cuts),
            )

    @app.get("/scenarios", response_model=list[ScenarioInfo])
    def get_scenarios() -> list[ScenarioInfo]:
        infos = []
        for name in list_shipped_scenarios():
            data = load_shipped_scenario(name)
            infos.append(
                ScenarioInfo(
                    name=name,
                    num_regions=len(data["regions"]),
                    num_robots=int(data["num_robots"]),
                )
            )
        return infos

    return app


app = create_app()
