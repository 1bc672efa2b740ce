"""
Centralised configuration using Pydantic settings.
Numerical defaults live here; run-specific choices come from the run config file.
"""
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide defaults loaded from environment variables."""

    log_level: str = Field(default="INFO", alias="LOG_LEVEL")
    log_format: str = Field(default="json", alias="LOG_FORMAT")

    # Minimax solver
    grid_resolution: int = Field(default=101, alias="GRID_RESOLUTION")
    solver_starts: int = Field(default=3, alias="SOLVER_STARTS")
    solver_seed: int = Field(default=1234, alias="SOLVER_SEED")
    solver_grid_check: bool = Field(default=True, alias="SOLVER_GRID_CHECK")
    solver_check_resolution: int = Field(default=101, alias="SOLVER_CHECK_RESOLUTION")
    max_alphabet: int = Field(default=5, alias="MAX_ALPHABET")

    # Coding lab
    varshamov_max_tries: int = Field(default=1000, alias="VARSHAMOV_MAX_TRIES")
    codebook_limit: int = Field(default=2**20, alias="CODEBOOK_LIMIT")
    max_block_length: int = Field(default=64, alias="MAX_BLOCK_LENGTH")

    # Adversaries
    exhaustive_limit: int = Field(default=10**6, alias="EXHAUSTIVE_LIMIT")
    max_routes: int = Field(default=20, alias="MAX_ROUTES")

    # Monte Carlo
    mc_workers: int = Field(default=1, alias="MC_WORKERS")
    min_trials: int = Field(default=100, alias="MIN_TRIALS")
    trace_limit: int = Field(default=1000, alias="TRACE_LIMIT")

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", case_sensitive=False, extra="ignore")


settings = Settings()
