"""
Application settings using Pydantic Settings.

Environment variables are loaded from .env file.
"""
from pathlib import Path
from typing import Literal, Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Library and CLI configuration loaded from environment variables.

    Every value here is a default; experiment configs and CLI flags
    override them.
    """
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    # ========================================================================
    # Random Forest
    # ========================================================================
    N_TREES: int = 512
    FINAL_N_TREES: Optional[int] = None  # None = same as N_TREES
    N_JOBS: int = 1

    @property
    def final_n_trees(self) -> int:
        """Tree count of the final (dissimilarity-space) forests"""
        return self.FINAL_N_TREES or self.N_TREES

    # ========================================================================
    # Dissimilarities
    # ========================================================================
    KAPPA: int = 5
    PATH_LENGTH_W: float = 0.5

    # ========================================================================
    # View weighting and dynamic selection
    # ========================================================================
    OOB_WEIGHT_MODE: Literal["accuracy", "error"] = "accuracy"
    DCS_K: int = 7
    DCS_CRITERION: Literal["oob", "lca"] = "oob"
    DCS_SELECTION: Literal["accuracy", "literal_error"] = "accuracy"
    POOL_CAP: int = 12

    # ========================================================================
    # Benchmark protocol
    # ========================================================================
    RUNS: int = 10
    TRAIN_FRACTION: float = 0.5
    MASTER_SEED: int = 0
    SIGN_TEST_ALPHA: float = 0.05

    REPORT_DIR: Path = Path("reports")
    MODEL_DIR: Path = Path("models")

    # ========================================================================
    # Logging
    # ========================================================================
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # ========================================================================
    # Application
    # ========================================================================
    APP_NAME: str = "RFD Multi-view"
    APP_VERSION: str = "0.1.0"


# Singleton instance
settings = Settings()
