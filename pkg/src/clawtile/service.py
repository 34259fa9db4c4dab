"""HTTP service exposing solver sessions.

A session wraps a live :class:`Simulation` built from posted config text.
Clients evolve it to explicit target times and fetch the current state as
a binary frame (the same format the CLI writes to disk).  Sessions are
in-memory and single-writer: concurrent operations on one session get a
409 rather than queueing behind a long solve.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Response

from . import __version__
from .config import loads as load_config_text, parse_tiles
from .errors import ClawtileError, ConfigError
from .frames import frame_bytes
from .runner import build_simulation
from .schemas import (
    EvolveRequest,
    EvolveResponse,
    HealthResponse,
    SessionCreateRequest,
    SessionInfo,
)
from .timestep import Simulation


@dataclass
class _Session:
    sid: str
    sim: Simulation
    problem: str
    precision: str
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionManager:
    """Registry of live sessions with non-blocking per-session locking."""

    def __init__(self):
        self._sessions: dict[str, _Session] = {}
        self._registry_lock = threading.Lock()

    def create(self, req: SessionCreateRequest) -> _Session:
        try:
            cfg = load_config_text(req.config_text)
            overrides = {}
            if req.workers is not None:
                overrides["workers"] = req.workers
            if req.tiles is not None:
                overrides["tiles"] = parse_tiles(req.tiles)
            if req.serial:
                overrides["serial"] = True
            if overrides:
                cfg = cfg.with_overrides(**overrides)
            sim = build_simulation(cfg)
        except ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except ClawtileError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        session = _Session(
            sid=uuid.uuid4().hex,
            sim=sim,
            problem=cfg.problem,
            precision=cfg.precision,
        )
        with self._registry_lock:
            self._sessions[session.sid] = session
        return session

    def get(self, sid: str) -> _Session:
        with self._registry_lock:
            session = self._sessions.get(sid)
        if session is None:
            raise HTTPException(status_code=404, detail=f"no session {sid!r}")
        return session

    def remove(self, sid: str) -> _Session:
        with self._registry_lock:
            session = self._sessions.pop(sid, None)
        if session is None:
            raise HTTPException(status_code=404, detail=f"no session {sid!r}")
        return session


def _acquired(session: _Session) -> threading.Lock:
    if not session.lock.acquire(blocking=False):
        raise HTTPException(
            status_code=409, detail=f"session {session.sid!r} is busy"
        )
    return session.lock


def _info(session: _Session) -> SessionInfo:
    sim = session.sim
    return SessionInfo(
        session_id=session.sid,
        problem=session.problem,
        ndim=sim.grid.spec.ndim,
        cells=list(sim.grid.spec.cells),
        num_states=sim.grid.spec.num_states,
        precision=session.precision,
        time=sim.t,
        steps_accepted=sim.steps_accepted,
        steps_reverted=sim.steps_reverted,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="clawtile", version=__version__)
    manager = SessionManager()
    app.state.sessions = manager

    @app.get("/healthz", response_model=HealthResponse)
    def healthz():
        return HealthResponse(status="ok", version=__version__)

    @app.post("/sessions", response_model=SessionInfo, status_code=201)
    def create_session(req: SessionCreateRequest):
        return _info(manager.create(req))

    @app.get("/sessions/{sid}", response_model=SessionInfo)
    def get_session(sid: str):
        return _info(manager.get(sid))

    @app.post("/sessions/{sid}/evolve", response_model=EvolveResponse)
    def evolve(sid: str, req: EvolveRequest):
        session = manager.get(sid)
        lock = _acquired(session)
        try:
            sim = session.sim
            if req.t_target < sim.t:
                raise HTTPException(
                    status_code=422,
                    detail=f"t_target {req.t_target} is behind session time {sim.t}",
                )
            try:
                report = sim.run_until(req.t_target)
            except ClawtileError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            return EvolveResponse(
                time=sim.t,
                steps_accepted=report.steps_accepted,
                steps_reverted=report.steps_reverted,
                nu_max=report.nu_max,
            )
        finally:
            lock.release()

    @app.get("/sessions/{sid}/state")
    def state(sid: str):
        session = manager.get(sid)
        lock = _acquired(session)
        try:
            payload = frame_bytes(session.sim.grid, session.sim.t,
                                  session.sim.steps_accepted)
        finally:
            lock.release()
        return Response(content=payload, media_type="application/octet-stream")

    @app.delete("/sessions/{sid}", status_code=204)
    def delete_session(sid: str):
        session = manager.get(sid)
        lock = _acquired(session)
        try:
            manager.remove(sid)
            session.sim.close()
        finally:
            lock.release()
        return Response(status_code=204)

    return app


app = create_app()
