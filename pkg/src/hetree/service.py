"""HTTP exploration API.

Datasets are uploaded once and kept in memory; sessions reference a
dataset and own their (possibly partial) tree. Mutating operations on one
session are exclusive: a second concurrent mutation gets 409 instead of a
corrupted tree. Idle sessions are evicted lazily after a TTL.
"""

from __future__ import annotations

import itertools
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from pydantic import BaseModel, model_validator

from . import adaptive, explore
from .counters import BuildCounters
from .errors import (
    AdaptationError,
    DataError,
    ExplorationError,
    HETreeError,
    ParameterError,
    StaleOperationError,
    TopOfTreeError,
    UnknownResourceError,
)
from .ingest import Dataset, parse_csv, parse_ntriples, sort_dataset
from .params import DEFAULT_BOUNDS, DEFAULT_MAX_DEGREE, estimate_params
from .tree import TreeParams, build_hetree


@dataclass
class ServiceSettings:
    session_ttl_seconds: float = 30 * 60
    lambda_min: int = DEFAULT_BOUNDS[0]
    lambda_max: int = DEFAULT_BOUNDS[1]
    max_degree: int = DEFAULT_MAX_DEGREE
    ui_dir: Optional[str] = None  # serve a built web client at /ui


@dataclass
class _SessionEntry:
    session: explore.ExplorationSession
    dataset_id: str
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_used: float = field(default_factory=time.monotonic)


class SessionRegistry:
    """In-memory datasets and sessions with per-session mutation locks."""

    def __init__(self, settings: ServiceSettings):
        self.settings = settings
        self.datasets: dict[str, Dataset] = {}
        self.sessions: dict[str, _SessionEntry] = {}
        self._dataset_ids = itertools.count(1)
        self._session_ids = itertools.count(1)
        self._registry_lock = threading.Lock()

    def add_dataset(self, dataset: Dataset) -> str:
        with self._registry_lock:
            dataset_id = f"d{next(self._dataset_ids)}"
            self.datasets[dataset_id] = dataset
        return dataset_id

    def dataset(self, dataset_id: str) -> Dataset:
        try:
            return self.datasets[dataset_id]
        except KeyError:
            raise HTTPException(404, f"unknown dataset {dataset_id!r}") from None

    def add_session(self, session: explore.ExplorationSession, dataset_id: str) -> str:
        with self._registry_lock:
            session_id = f"s{next(self._session_ids)}"
            self.sessions[session_id] = _SessionEntry(session, dataset_id)
        return session_id

    def entry(self, session_id: str) -> _SessionEntry:
        self.evict_idle()
        try:
            entry = self.sessions[session_id]
        except KeyError:
            raise HTTPException(404, f"unknown session {session_id!r}") from None
        entry.last_used = time.monotonic()
        return entry

    def evict_idle(self) -> None:
        cutoff = time.monotonic() - self.settings.session_ttl_seconds
        with self._registry_lock:
            stale = [sid for sid, e in self.sessions.items() if e.last_used < cutoff]
            for sid in stale:
                del self.sessions[sid]


class SessionRequest(BaseModel):
    dataset_id: str
    scenario: str
    variant: str = "C"
    leaves: Optional[int] = None
    degree: Optional[int] = None
    lambda_min: Optional[int] = None
    lambda_max: Optional[int] = None
    resource: Optional[str] = None
    range: Optional[tuple[float, float]] = None
    incremental: bool = False

    @model_validator(mode="after")
    def _check(self):
        if self.scenario not in ("BSC", "RES", "RAN"):
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.scenario == "RES" and not self.resource:
            raise ValueError("RES needs a resource")
        if self.scenario == "RAN" and self.range is None:
            raise ValueError("RAN needs a range")
        return self


class DrillRequest(BaseModel):
    node_id: int


class AdaptRequest(BaseModel):
    degree: Optional[int] = None
    leaves: Optional[int] = None
    root_node_id: Optional[int] = None

    @model_validator(mode="after")
    def _check(self):
        if (self.degree is None) == (self.leaves is None):
            raise ValueError("give exactly one of degree or leaves")
        return self


def _http_error(exc: HETreeError) -> HTTPException:
    if isinstance(exc, UnknownResourceError):
        return HTTPException(404, str(exc))
    return HTTPException(422, str(exc))


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or ServiceSettings()
    app = FastAPI(title="hierarchical exploration service")
    registry = SessionRegistry(settings)
    app.state.registry = registry

    @app.post("/datasets")
    async def upload_dataset(file: UploadFile = File(...), format: str = Form(...),
                             predicate: Optional[str] = Form(None),
                             subject_column: str = Form("subject"),
                             value_column: Optional[str] = Form(None)):
        payload = await file.read()
        try:
            if format == "ntriples":
                dataset = parse_ntriples(payload, predicate)
            elif format == "csv":
                dataset = parse_csv(payload, subject_column, value_column)
            else:
                raise HTTPException(422, f"unknown format {format!r}")
            dataset = sort_dataset(dataset)
        except DataError as exc:
            raise _http_error(exc) from None
        dataset_id = registry.add_dataset(dataset)
        return {
            "dataset_id": dataset_id,
            "size": len(dataset),
            "minv": dataset.minv,
            "maxv": dataset.maxv,
            "kind": dataset.kind,
        }

    @app.post("/sessions")
    def create_session(request: SessionRequest):
        dataset = registry.dataset(request.dataset_id)
        try:
            if request.leaves is not None and request.degree is not None:
                params = TreeParams(request.variant, request.leaves, request.degree)
            else:
                bounds = (request.lambda_min or settings.lambda_min,
                          request.lambda_max or settings.lambda_max)
                params = estimate_params(len(dataset), bounds, request.variant,
                                         settings.max_degree)
            if request.scenario == "RES":
                start = explore.StartingPoint.res(request.resource)
            elif request.scenario == "RAN":
                start = explore.StartingPoint.ran(*request.range)
            else:
                start = explore.StartingPoint.bsc()
            session = explore.start_session(dataset, start, params,
                                            incremental=request.incremental)
        except HETreeError as exc:
            raise _http_error(exc) from None
        session_id = registry.add_session(session, request.dataset_id)
        return {"session_id": session_id, "view": explore.current_view(session)}

    def _mutate(session_id: str, operation):
        entry = registry.entry(session_id)
        if not entry.lock.acquire(blocking=False):
            raise HTTPException(409, "session is busy with another mutation")
        try:
            return operation(entry.session)
        except (StaleOperationError, TopOfTreeError, ExplorationError,
                AdaptationError, ParameterError) as exc:
            raise _http_error(exc) from None
        finally:
            entry.lock.release()

    @app.post("/sessions/{session_id}/drill")
    def drill(session_id: str, request: DrillRequest):
        def op(session):
            explore.drill_down(session, request.node_id)
            return explore.current_view(session)

        return _mutate(session_id, op)

    @app.post("/sessions/{session_id}/rollup")
    def rollup(session_id: str):
        def op(session):
            explore.roll_up(session)
            return explore.current_view(session)

        return _mutate(session_id, op)

    @app.post("/sessions/{session_id}/adapt")
    def adapt_session(session_id: str, request: AdaptRequest):
        def op(session: explore.ExplorationSession):
            if session.incremental:
                # Reshaping works on a complete tree: materialize, then adapt.
                tree, counters = build_hetree(session.state.dataset, session.state.params)
                session.tree = tree
                session.state = None
                session.counters = counters
            _, report = adaptive.adapt(session.tree, new_degree=request.degree,
                                       new_leaves=request.leaves,
                                       root_id=request.root_node_id)
            anchor = session.tree.root
            if request.root_node_id is not None:
                anchor = session.tree.node_by_id(request.root_node_id) or anchor
            session.cur = explore.RenderedSet.of_nodes(list(anchor.children) or [anchor])
            session.history.append(("adapt", (request.degree, request.leaves)))
            return {"view": explore.current_view(session),
                    "adaptation_report": report.to_json()}

        return _mutate(session_id, op)

    @app.get("/sessions/{session_id}/view")
    def view(session_id: str):
        entry = registry.entry(session_id)
        return explore.current_view(entry.session)

    @app.get("/sessions/{session_id}/counters")
    def counters(session_id: str):
        entry = registry.entry(session_id)
        return entry.session.counters.snapshot()

    if settings.ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=settings.ui_dir, html=True), name="ui")

    return app


def main(port: int = 8000, settings: ServiceSettings | None = None) -> None:  # pragma: no cover
    import uvicorn

    uvicorn.run(create_app(settings), host="127.0.0.1", port=port)
