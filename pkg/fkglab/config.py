"""
Configuration management for the FKG correlation-inequality toolkit
"""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="FKGLAB_",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    app_name: str = "fkglab"
    app_version: str = "1.0.0"

    # Parallelism (mirrors --workers); 1 keeps every run deterministic
    workers: int = 1

    # Dense structures
    dimension_cap: int = 20  # 2^20 exact weights
    upset_enumeration_cap: int = 5  # Dedekind number D(5) = 7581
    pushforward_cap: int = 24  # source bits in an exhaustive pushforward

    # Percolation
    exact_edge_cap: int = 26
    embedding_edge_cap: int = 20

    # Degree sets
    degree_exact_cap: int = 3
    degree_force_cap: int = 4
    degree_chunk_size: int = 1 << 20  # masks per numpy block

    # Monte Carlo
    mc_confidence: float = 0.99
    mc_chunk_size: int = 1 << 16  # samples per draw block

    # Display
    decimal_digits: int = 6

    # Property suite
    suite_seed: int = 42
    suite_trials: int = 1000
    suite_min_nontrivial_share: float = 0.25  # of random-partition trials with two nonempty C blocks

    # Random partitions
    partition_draw_attempts: int = 64  # redraws before a trivial partition is accepted

    # Logging
    log_level: str = "WARNING"
    log_format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


# Global settings instance
settings = Settings()
