"""Configuration settings for linecut."""

from typing import Optional, Tuple

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


STRATEGIES = ("cond", "first", "last")
DOMAINS = ("all", "unit")


class Settings(BaseSettings):
    """Application settings loaded from environment variables (prefix ``LINECUT_``)."""

    model_config = SettingsConfigDict(
        env_prefix="LINECUT_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = Field("INFO")
    log_file: str = Field("logs/linecut.log")

    # Implicitization
    rank_tol: Optional[float] = Field(None, description="Relative SVD rank threshold; None uses max(m,n)*eps")
    row_scaling: bool = Field(True)
    max_degree: int = Field(10)
    effective_degree_tol: float = Field(1e-12)

    # Intersection
    confirm_tol: float = Field(1e-6)
    complex_tol: float = Field(1e-8)
    cluster_tol: float = Field(1e-7)
    pencil_null_tol: float = Field(1e-7)
    infinite_tol: float = Field(1e-12)
    column_scaling: bool = Field(False)
    strategy: str = Field("cond")
    domain: str = Field("all")

    # Oracle
    oracle_grid: int = Field(200)
    oracle_box: Tuple[float, float] = Field((-0.5, 1.5))
    oracle_dedup_tol: float = Field(1e-7)

    # Output
    digits: int = Field(6)
    jobs: int = Field(1)

    @field_validator("strategy")
    @classmethod
    def _check_strategy(cls, value: str) -> str:
        if value not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        return value

    @field_validator("domain")
    @classmethod
    def _check_domain(cls, value: str) -> str:
        if value not in DOMAINS:
            raise ValueError(f"domain must be one of {DOMAINS}")
        return value

    @field_validator(
        "confirm_tol", "complex_tol", "cluster_tol", "pencil_null_tol",
        "infinite_tol", "effective_degree_tol", "oracle_dedup_tol",
    )
    @classmethod
    def _check_positive(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("tolerances must be positive")
        return value

    @field_validator("rank_tol")
    @classmethod
    def _check_rank_tol(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and value <= 0:
            raise ValueError("rank_tol must be positive")
        return value

    @field_validator("max_degree", "digits", "jobs", "oracle_grid")
    @classmethod
    def _check_at_least_one(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be at least 1")
        return value


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get the global settings instance."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reset_settings() -> None:
    """Drop the cached instance so the next call re-reads the environment."""
    global _settings
    _settings = None
