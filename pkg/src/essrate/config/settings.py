"""
Settings configuration for essrate using Pydantic Settings.

Environment variables prefixed with ``ESSRATE_`` are used for configuration,
with optional .env file support.
"""

import os
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="ESSRATE_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application settings
    log_level: str = Field(default="INFO", description="Logging level")
    threads: int | None = Field(
        default=None,
        ge=1,
        description="Cap on parallel workers for sweeps; unset means one per CPU",
    )

    # Method registry
    method_registry_path: str = Field(
        default="config/rk_methods.json",
        description="Path to a JSON file with additional Runge-Kutta methods",
    )

    # Step control defaults
    default_safety: float = Field(
        default=0.9,
        gt=0.0,
        le=1.0,
        description="Fraction of the maximal stable step taken by stability-capped runs",
    )
    default_h_floor: float = Field(default=1e-12, gt=0.0, description="Smallest admissible step")
    default_h_cap: float = Field(default=1e3, gt=0.0, description="Largest admissible step")
    max_steps: int = Field(
        default=5_000_000,
        gt=0,
        description="Hard cap on the number of steps of a single run",
    )

    # Analysis defaults
    tail_frac: float = Field(
        default=0.25,
        gt=0.0,
        le=1.0,
        description="Fraction of trailing records used as the limsup surrogate",
    )
    fit_window: float = Field(
        default=0.5,
        gt=0.0,
        le=1.0,
        description="Fraction of trailing records used when fitting rates",
    )
    essential_tol: float = Field(
        default=1e-2,
        gt=0.0,
        description="Tolerance of the 1-essential verdict",
    )

    def resolved_threads(self) -> int:
        """Return the effective number of parallel workers."""
        return max(1, self.threads or os.cpu_count() or 1)


@lru_cache
def get_settings() -> Settings:
    """Get cached application settings."""
    return Settings()
