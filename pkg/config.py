"""Configuration settings for the adjoint Bergman projection toolkit."""

from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment or .env file."""

    model_config = SettingsConfigDict(
        env_prefix="PSTAR_",
        env_file=".env",
        env_file_encoding="utf-8",
    )

    # Disk quadrature (polar product rule)
    quad_radial_nodes: int = Field(default=64, description="Initial radial node count")
    quad_angular_nodes: int = Field(default=128, description="Initial angular node count (even)")
    quad_rel_tol: float = Field(default=1e-9, description="Relative tolerance between refinement levels")
    quad_abs_tol: float = Field(default=1e-12, description="Absolute tolerance between refinement levels")
    quad_max_refinements: int = Field(default=6, description="Maximum number of node doublings")

    limit_radii: tuple[float, ...] = Field(
        default=(0.99, 0.995, 0.999),
        description="Outer radii used to realize r -> 1 limits",
    )

    # Sup scans over the disk
    sup_levels: int = Field(default=20, description="Rings at radii 1 - 2^-j, j = 0..levels")
    sup_min_angular_exp: int = Field(default=8, description="log2 of the smallest angular sample count")
    sup_max_angular_exp: int = Field(default=14, description="log2 of the largest angular sample count")
    sup_refine_rounds: int = Field(default=2, description="Minimum local refinement rounds")

    # Extremal search
    search_degree: int = Field(default=12, description="Polynomial degree of the search family")
    search_restarts: int = Field(default=20, description="Seeded random restarts")
    search_iterations: int = Field(default=2000, description="Simplex iterations per restart")
    search_seed: int = Field(default=7, description="Seed for random starts")
    search_step_init: float = Field(default=0.1, description="Initial simplex edge")
    search_step_tol: float = Field(default=1e-8, description="Simplex convergence tolerance")
    search_workers: int = Field(default=1, description="Threads running restarts")

    # Results ledger
    results_db_path: Path = Field(
        default=Path("results.db"),
        description="SQLite file recording verification and search runs",
    )


settings = Settings()
