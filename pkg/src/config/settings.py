import os

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="FPLS_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Parallelism (FPLS_THREADS caps forest workers)
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)

    # Application
    log_level: str = "INFO"
    log_file: str | None = None

    # Run defaults (FPLS_OUTPUT_DIR, FPLS_DEFAULT_SEED)
    output_dir: str = "output"
    default_seed: int = 1


def get_settings() -> Settings:
    """Get settings instance (for dependency injection)."""
    return Settings()


# Global settings instance
settings = get_settings()
