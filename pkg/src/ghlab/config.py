"""Laboratory configuration management."""

from __future__ import annotations

from functools import lru_cache

from pydantic import Field, PositiveFloat, PositiveInt
from pydantic_settings import BaseSettings, SettingsConfigDict


class Tolerances(BaseSettings):
    """Tolerance set embedded in every certificate.

    Attributes:
        algebra: Basis construction residuals (orthonormality, brackets, Casimir).
        group: Group membership of sampled points.
        eigen: Deviation of pointwise eigen ratios.
        morphism: Normalized harmonic-morphism residuals.
        dual: Sign-flip agreement on the non-compact side.
        crosscheck: Relative deviation of finite-difference cross-checks.
    """

    algebra: PositiveFloat = 1e-10
    group: PositiveFloat = 1e-12
    eigen: PositiveFloat = 1e-8
    morphism: PositiveFloat = 1e-9
    dual: PositiveFloat = 1e-6
    crosscheck: PositiveFloat = 1e-4

    model_config = SettingsConfigDict(
        env_prefix="GHLAB_TOL_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


class LabConfig(BaseSettings):
    """Laboratory configuration loaded from environment variables.

    Attributes:
        seed: Base seed for every deterministic sampler (``GHLAB_SEED``).
        samples: Number of accepted sample points per measurement.
        workers: Worker threads used by pointwise sweeps; 1 runs inline.
        log_level: Logging level.
        value_floor: Minimal |f(g)| for a point to enter a ratio estimate.
        denominator_floor: Minimal |Q(g)| for rational-map verification.
        dual_radius: Norm of the i*m coefficients of dual sample points.
        max_resample: Consecutive rejected points before sampling gives up.
        tolerances: The tolerance set.
    """

    seed: int = 42
    samples: PositiveInt = 50
    workers: PositiveInt = 1
    log_level: str = "INFO"
    value_floor: PositiveFloat = 1e-6
    denominator_floor: PositiveFloat = 1e-3
    dual_radius: PositiveFloat = 0.5
    max_resample: PositiveInt = 100
    tolerances: Tolerances = Field(default_factory=Tolerances)

    model_config = SettingsConfigDict(
        env_prefix="GHLAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


@lru_cache
def get_config() -> LabConfig:
    """Return cached laboratory configuration."""

    return LabConfig()
