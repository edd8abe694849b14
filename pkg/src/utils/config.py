"""
Configuration Management

Loads process-level configuration (default input paths, logging, parallelism)
from environment variables with sensible defaults. Model hyperparameters live in
`src.wespad.config.WespadConfig`, not here.
"""

import os
from dataclasses import dataclass, field
from pathlib import Path

from dotenv import load_dotenv

# Load .env file if present
load_dotenv()

EMBEDDING_FORMATS = ("word2vec-binary", "word2vec-text", "glove-text")


def _optional_path(name: str) -> Path | None:
    value = os.getenv(name, "")
    return Path(value) if value else None


@dataclass
class Config:
    """Application configuration from environment variables."""

    # Inputs
    WESPAD_EMBEDDINGS: Path | None = field(
        default_factory=lambda: _optional_path("WESPAD_EMBEDDINGS")
    )
    WESPAD_EMBEDDINGS_FORMAT: str = field(
        default_factory=lambda: os.getenv("WESPAD_EMBEDDINGS_FORMAT", "word2vec-text")
    )

    # Application Settings
    LOG_LEVEL: str = field(default_factory=lambda: os.getenv("LOG_LEVEL", "INFO"))
    WESPAD_JOBS: int = field(
        default_factory=lambda: int(os.getenv("WESPAD_JOBS", str(os.cpu_count() or 1)))
    )

    # Paths
    LOGS_DIR: Path | None = field(default_factory=lambda: _optional_path("LOGS_DIR"))
    REPORTS_DIR: Path = field(
        default_factory=lambda: Path(os.getenv("REPORTS_DIR", "reports"))
    )

    def __post_init__(self):
        """Validate configuration."""
        if self.WESPAD_EMBEDDINGS_FORMAT not in EMBEDDING_FORMATS:
            raise ValueError(
                f"Invalid WESPAD_EMBEDDINGS_FORMAT: {self.WESPAD_EMBEDDINGS_FORMAT} "
                f"(expected one of {', '.join(EMBEDDING_FORMATS)})"
            )
        if self.WESPAD_JOBS < 1:
            raise ValueError(f"WESPAD_JOBS must be >= 1, got {self.WESPAD_JOBS}")

    def __repr__(self) -> str:
        return (
            f"Config(\n"
            f"  WESPAD_EMBEDDINGS={self.WESPAD_EMBEDDINGS},\n"
            f"  WESPAD_EMBEDDINGS_FORMAT={self.WESPAD_EMBEDDINGS_FORMAT},\n"
            f"  LOG_LEVEL={self.LOG_LEVEL},\n"
            f"  WESPAD_JOBS={self.WESPAD_JOBS},\n"
            f"  REPORTS_DIR={self.REPORTS_DIR}\n"
            f")"
        )


# Global config instance
_config: Config | None = None


def get_config() -> Config:
    """
    Get global config instance (singleton).

    Returns:
        Config instance
    """
    global _config
    if _config is None:
        _config = Config()
    return _config


def reload_config() -> Config:
    """
    Force reload configuration from environment.

    Returns:
        New Config instance
    """
    global _config
    load_dotenv(override=True)
    _config = Config()
    return _config
