"""Request and response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class SessionCreateRequest(BaseModel):
    """A new session from config text, with optional execution overrides."""

    config_text: str = Field(min_length=1, description="run config in INI form")
    workers: int | None = Field(default=None, ge=1)
    tiles: str | None = Field(default=None, description="tile shape, e.g. 64x4")
    serial: bool = False


class SessionInfo(BaseModel):
    session_id: str
    problem: str
    ndim: int
    cells: list[int]
    num_states: int
    precision: str
    time: float
    steps_accepted: int
    steps_reverted: int


class EvolveRequest(BaseModel):
    t_target: float


class EvolveResponse(BaseModel):
    time: float
    steps_accepted: int
    steps_reverted: int
    nu_max: float


class HealthResponse(BaseModel):
    status: str
    version: str
