"""
Configuration settings for the solver and the command line tools
"""

import os
from pydantic_settings import BaseSettings, SettingsConfigDict

class Settings(BaseSettings):
    """Application settings"""

    # Accept unrelated .env keys without validation errors
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    # Parallelism
    QPT_THREADS: int = int(os.getenv("QPT_THREADS", "1"))

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # Quadrature
    QUAD_REL_TOL: float = 1e-10
    QUAD_ABS_TOL: float = 1e-14
    QUAD_MAX_SUBDIVISIONS: int = 200
    SPECTRAL_CACHE_SIZE: int = 65536

    # Self-consistency
    SOLVER_MAX_ITER: int = 10_000
    SOLVER_FP_TOL: float = 1e-11
    SOLVER_DAMPING: float = 0.5

    # Bias guard (units of omega_c)
    BIAS_WARN: float = 1e-5
    BIAS_MAX: float = 1e-3

    # Validity window of the ansatz
    VALIDITY_EPS_PRIME: float = 0.05
    VALIDITY_ALPHA_FACTOR: float = 1.1

    # Bath discretization
    LOG_DISCRETIZATION_BASE: float = 1.08

    # Acceptance suite
    GOLDEN_DIR: str = os.getenv("GOLDEN_DIR", "golden")

settings = Settings()
