from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Optional


class Settings(BaseSettings):
    """Toolkit configuration from environment variables"""

    # Reproducibility
    CPCG_SEED: int = 7

    # Logging
    LOG_LEVEL: str = "INFO"

    # Hardware defaults
    DEFAULT_SHORE_SIZE: int = 4

    # CPCG construction
    ALLOW_GENERAL_NEXUS: bool = False
    AUTO_ORIENT_FACTORS: bool = True

    # Fault-tolerant embedder
    FT_MAX_EXTENSIONS: int = 4
    FT_COUPLER_RETRIES: int = 1

    # Heuristic baseline
    HEURISTIC_TRIES: int = 16
    HEURISTIC_MAX_NO_IMPROVEMENT: int = 10
    HEURISTIC_STEP_BUDGET: int = 5000
    HEURISTIC_MAX_TIME: float = 0.0

    # Bench harness
    BENCH_WORKERS: int = 1

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"
    )

    @property
    def heuristic_max_time_or_none(self) -> Optional[float]:
        """Wall-clock cutoff in seconds, or None when disabled"""
        return self.HEURISTIC_MAX_TIME if self.HEURISTIC_MAX_TIME > 0 else None


# Global settings instance
settings = Settings()
