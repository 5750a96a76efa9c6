from pydantic import ValidationInfo, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Constants
MIN_MC_SAMPLES = 1_000


class Settings(BaseSettings):
    """
    Toolkit settings with environment variable support.
    All settings can be overridden using environment variables.
    """

    model_config = SettingsConfigDict(
        case_sensitive=True,
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # API Settings
    API_V1_PREFIX: str = "/api/v1"
    ROOT_PATH: str = ""
    PROJECT_NAME: str = "j-Santalo Toolkit"
    VERSION: str = "0.1.0"
    DEBUG: bool = False

    # Logging Settings
    LOG_LEVEL: str = "INFO"
    LOG_DIR: str = "logs"
    LOG_TO_FILE: bool = True

    # Reproducibility / parallelism
    DEFAULT_SEED: int = 20240517
    WORKERS: int = 4

    # --- Monte Carlo ---
    MC_SAMPLES: int = 1_000_000
    MC_BATCH: int = 100_000

    # --- Tolerances ---
    POLARITY_TOL: float = 1e-9
    SLACK_TOL: float = 1e-9
    HULL_TOL: float = 1e-12
    BISECTION_TOL: float = 1e-12

    # --- Optimizers ---
    NM_RESTARTS: int = 8
    NM_MAX_ITER: int = 400
    NM_TOL: float = 1e-10
    ASCENT_SWEEPS: int = 5
    ASCENT_RESTARTS: int = 3
    ASCENT_IMPROVEMENT_TOL: float = 1e-6
    EQUAL_MOMENTS_MAX_ITER: int = 200

    # --- Symmetrization ---
    SWEEP_CAP: int = 50
    UNCONDITIONAL_DEFECT_TOL: float = 1e-7

    # --- Functional side ---
    RHO_EPSILON: float = 1e-6
    LATTICE_MAX_TUPLES: int = 10_000_000

    # Reports
    OUTPUT_DIR: str = "reports"

    # -------- Validators & helpers --------

    @field_validator("DEFAULT_SEED", mode="before")
    @classmethod
    def validate_seed(cls, v: int | str) -> int:
        """Seeds are unsigned 64-bit integers."""
        seed = int(v)
        if not 0 <= seed < 2**64:
            raise ValueError("DEFAULT_SEED must fit in an unsigned 64-bit integer")
        return seed

    @field_validator("WORKERS", "NM_RESTARTS", "NM_MAX_ITER", "SWEEP_CAP")
    @classmethod
    def validate_positive_int(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    @field_validator("MC_SAMPLES")
    @classmethod
    def validate_mc_samples(cls, v: int) -> int:
        if v < MIN_MC_SAMPLES:
            raise ValueError(f"MC_SAMPLES must be at least {MIN_MC_SAMPLES}")
        return v

    @field_validator("MC_BATCH")
    @classmethod
    def validate_mc_batch(cls, v: int, info: ValidationInfo) -> int:
        """The batch size must divide the sample count."""
        samples = info.data.get("MC_SAMPLES")
        if v < 1:
            raise ValueError("MC_BATCH must be at least 1")
        if samples is not None and samples % v:
            raise ValueError(f"MC_BATCH={v} does not divide MC_SAMPLES={samples}")
        return v

    @field_validator(
        "POLARITY_TOL",
        "SLACK_TOL",
        "HULL_TOL",
        "BISECTION_TOL",
        "NM_TOL",
        "ASCENT_IMPROVEMENT_TOL",
        "UNCONDITIONAL_DEFECT_TOL",
        "RHO_EPSILON",
    )
    @classmethod
    def validate_tolerance(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("tolerances must be strictly positive")
        return v


# Create settings instance
settings = Settings()
