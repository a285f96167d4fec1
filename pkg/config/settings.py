# config/settings.py
import math
import os

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings

# Load environment variables from .env file
load_dotenv()


class LoggingSettings(BaseModel):
    """Configuration for logging."""
    LEVEL: str = Field(default="INFO", description="Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)")
    FORMAT: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        description="Log format string"
    )

    @field_validator("LEVEL")
    @classmethod
    def level_must_be_known(cls, v: str) -> str:
        if v.upper() not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level '{v}'")
        return v.upper()


class SimulationSettings(BaseModel):
    """Numerical defaults shared by every scenario."""
    PHONON_CUTOFF: int = Field(default=16, ge=2, description="Fock states kept for noiseless runs")
    ELECTRIC_PHONON_CUTOFF: int = Field(default=30, ge=2, description="Fock states kept when the electric drive is on")
    OUTPUT_SAMPLES: int = Field(default=500, ge=2, description="Points on the uniform trajectory grid")
    STEP_FACTOR: float = Field(default=100.0, description="Steps per period of the fastest harmonic")
    MIN_STEP_FACTOR: float = Field(default=50.0, description="Coarsest allowed steps per fastest period")
    TOLERANCE: float = Field(default=1e-8, gt=0.0, description="Allowed norm drift per gate")
    HIERARCHY_SLACK: float = Field(default=4.0, gt=1.0, description="Factor each '<<' link must satisfy")
    NOMINAL_OMEGA0: float = Field(default=2 * math.pi * 12.6e9, gt=0.0, description="Nominal qubit splitting (rad/s)")
    INTEGRATOR: str = Field(default="magnus4", description="Default integration method")

    @field_validator("STEP_FACTOR")
    @classmethod
    def step_factor_must_resolve(cls, v: float) -> float:
        if v < 50.0:
            raise ValueError("STEP_FACTOR below 50 under-resolves the fastest harmonic")
        return v


class OutputSettings(BaseModel):
    """Where and how results are written."""
    DIRECTORY: str = Field(default="results", description="Default output directory")
    FLOAT_FORMAT: str = Field(default="%.12g", description="printf-style float format for CSV bodies")


class Settings(BaseSettings):
    """Main settings class that combines all configuration sections."""
    APP_NAME: str = Field(default="Dressed-state gate simulator", description="Application name")
    VERSION: str = Field(default="0.3.0", description="Package version")
    ENVIRONMENT: str = Field(default="development", description="Environment (development, testing, production)")

    LOGGING: LoggingSettings = Field(default_factory=LoggingSettings)
    SIMULATION: SimulationSettings = Field(default_factory=SimulationSettings)
    OUTPUT: OutputSettings = Field(default_factory=OutputSettings)

    model_config = {
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "env_nested_delimiter": "__",  # SIMULATION__PHONON_CUTOFF=20 in .env
        "case_sensitive": False,
        "extra": "ignore",
    }


settings = Settings(
    ENVIRONMENT=os.getenv("ENVIRONMENT", "development"),
    LOGGING=LoggingSettings(
        LEVEL=os.getenv("LOG_LEVEL", "INFO"),
        FORMAT=os.getenv("LOG_FORMAT", "%(asctime)s - %(name)s - %(levelname)s - %(message)s"),
    ),
    SIMULATION=SimulationSettings(
        PHONON_CUTOFF=int(os.getenv("PHONON_CUTOFF", "16")),
        ELECTRIC_PHONON_CUTOFF=int(os.getenv("ELECTRIC_PHONON_CUTOFF", "30")),
        OUTPUT_SAMPLES=int(os.getenv("OUTPUT_SAMPLES", "500")),
        STEP_FACTOR=float(os.getenv("STEP_FACTOR", "100")),
        TOLERANCE=float(os.getenv("INTEGRATION_TOLERANCE", "1e-8")),
        HIERARCHY_SLACK=float(os.getenv("HIERARCHY_SLACK", "4.0")),
        INTEGRATOR=os.getenv("INTEGRATOR", "magnus4"),
    ),
    OUTPUT=OutputSettings(
        DIRECTORY=os.getenv("OUTPUT_DIR", "results"),
    ),
)
