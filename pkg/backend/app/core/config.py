"""Application settings read from the environment and an optional .env file."""

from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

DEFAULT_BOUNDS_CATALOG = Path(__file__).resolve().parent.parent / "modules" / "bench" / "data" / "bounds.csv"


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # ── Application ──────────────────────────────────────────────
    app_port: int = 8000
    log_level: str = "INFO"

    # ── Benchmark data ───────────────────────────────────────────
    bounds_catalog: Path = DEFAULT_BOUNDS_CATALOG

    # ── Runs ─────────────────────────────────────────────────────
    default_seed: int = 0
    bench_workers: int = Field(default=1, ge=1)
    clock: Literal["wall", "work"] = "wall"
    work_rate: float = Field(default=2000.0, gt=0)  # TS iterations per virtual second

    # ── API ──────────────────────────────────────────────────────
    api_max_time_limit: float = Field(default=60.0, gt=0)


settings = Settings()
