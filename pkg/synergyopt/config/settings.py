"""Application settings via Pydantic BaseSettings."""

from __future__ import annotations

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from synergyopt.constants import (
    DEFAULT_CHUNK_SIZE,
    DEFAULT_CLOSURE_SUBDIVISIONS,
    DEFAULT_FRICTION_EDGES,
    DEFAULT_OPEN_POSE_WEIGHT,
    DEFAULT_QP_MAX_ITER,
    DEFAULT_QP_TOL,
)


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="SYNERGY_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    # Search
    threads: int = Field(default=0, ge=0)  # 0 = one worker per CPU
    chunk_size: int = Field(default=DEFAULT_CHUNK_SIZE, ge=1)

    # Solver
    qp_tol: float = Field(default=DEFAULT_QP_TOL, gt=0.0, le=1e-2)
    qp_max_iter: int = Field(default=DEFAULT_QP_MAX_ITER, ge=1)

    # Models
    edges_default: int = Field(default=DEFAULT_FRICTION_EDGES, ge=3)
    open_pose_weight: float = Field(default=DEFAULT_OPEN_POSE_WEIGHT, gt=0.0)
    closure_subdivisions: int = Field(default=DEFAULT_CLOSURE_SUBDIVISIONS, ge=0, le=5)

    # Logging
    log_level: str = "INFO"
    json_logs: bool = False


@lru_cache
def get_settings() -> Settings:
    """Return cached settings instance."""
    return Settings()
