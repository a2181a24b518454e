"""
COMBWALK - Configuration (environnement + fichier de run)
"""
from pathlib import Path
from typing import Literal, Optional
from functools import lru_cache

from pydantic import BaseModel, Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict, TomlConfigSettingsSource


class Settings(BaseSettings):
    # === App ===
    APP_NAME: str = "CombWalk"
    APP_VERSION: str = "1.0.0"
    LOG_LEVEL: str = "INFO"

    # === Régimes (défauts) ===
    REGIME_A: float = 0.05
    REGIME_C: float = 0.05
    REGIME_ALPHA: float = 0.25
    REGIME_EPSILON: float = 0.05
    REGIME_EPSILON_TINY: float = 0.3
    REGIME_BOUNDARY_BAND: float = 0.02

    # === Précision ===
    EXACT_CAP: int = 300  # pas de marche, mode rationnel
    SERIES_EXACT_CAP: int = 400  # ordre N, séries rationnelles
    SERIES_FLOAT_CAP: int = 2000  # ordre N, séries mpmath
    MANTISSA_BITS: int = 128
    QUAD_TOL: float = 1e-10
    CONTOUR_NODE_FACTOR: int = 16
    CONTOUR_MAX_NODES: int = 2_000_000

    # === Balayages ===
    SWEEP_WORKERS: int = 1

    class Config:
        env_file = ".env"
        case_sensitive = True


@lru_cache()
def get_settings() -> Settings:
    return Settings()


settings = get_settings()


# ============================================
# SEUILS DE CALIBRATION (erreur relative max par régime)
# ============================================

CALIBRATION_THRESHOLDS = {
    "Y_BULK": 0.10,
    "Y_MID": 0.15,
    "Y_SMALL": 0.15,
    "Y_TINY": 0.10,
    "X_BULK": 0.10,
    "X_MID": 0.20,
    "X_CROSSOVER": 0.20,
    "X_SMALL": 0.15,
    "X_TINY": 0.10,
    "LOCAL": 0.05,
}


def get_thresholds() -> dict:
    """Retourne les seuils de calibration par régime"""
    return CALIBRATION_THRESHOLDS


# ============================================
# RUN CONFIG (sections du fichier TOML)
# ============================================

class RegimeParams(BaseModel):
    a: float = Field(default_factory=lambda: settings.REGIME_A, gt=0, le=0.5)
    c: float = Field(default_factory=lambda: settings.REGIME_C, gt=0, lt=1)
    alpha: float = Field(default_factory=lambda: settings.REGIME_ALPHA, gt=0, le=0.25)
    epsilon: float = Field(default_factory=lambda: settings.REGIME_EPSILON, gt=0, lt=0.25)
    epsilon_tiny: float = Field(default_factory=lambda: settings.REGIME_EPSILON_TINY, gt=0)
    epsilon_o: Optional[float] = Field(default=None, gt=0)
    kappa: float = 2 ** (7 / 6) * 3 / (3 ** 0.5 - 1)  # changement de signe de l'intégrande de transition, en θ·t
    boundary_band: float = Field(default_factory=lambda: settings.REGIME_BOUNDARY_BAND, ge=0, lt=0.5)

    @model_validator(mode="after")
    def _default_epsilon_o(self):
        if self.epsilon_o is None:
            self.epsilon_o = self.alpha ** 4 / 2
        if self.a >= 1 - self.c:
            raise ValueError("a doit être < 1 - c")
        return self


class PrecisionParams(BaseModel):
    exact_cap: int = Field(default_factory=lambda: settings.EXACT_CAP, ge=0)
    series_exact_cap: int = Field(default_factory=lambda: settings.SERIES_EXACT_CAP, ge=0)
    series_float_cap: int = Field(default_factory=lambda: settings.SERIES_FLOAT_CAP, ge=0)
    mantissa_bits: int = Field(default_factory=lambda: settings.MANTISSA_BITS, ge=53)
    quad_tol: float = Field(default_factory=lambda: settings.QUAD_TOL, gt=0, lt=1)
    node_factor: int = Field(default_factory=lambda: settings.CONTOUR_NODE_FACTOR, ge=4)
    max_nodes: int = Field(default_factory=lambda: settings.CONTOUR_MAX_NODES, ge=64)


class OutputParams(BaseModel):
    format: Literal["csv", "json"] = "csv"
    path: Optional[Path] = None


class RunConfig(BaseSettings):
    regime: RegimeParams = Field(default_factory=RegimeParams)
    precision: PrecisionParams = Field(default_factory=PrecisionParams)
    output: OutputParams = Field(default_factory=OutputParams)
    workers: int = Field(default_factory=lambda: settings.SWEEP_WORKERS, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="COMBWALK_",
        env_nested_delimiter="__",
        extra="ignore",
    )


def _deep_merge(base: dict, overrides: dict) -> dict:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict):
            nested = merged.get(key)
            merged[key] = _deep_merge(nested if isinstance(nested, dict) else {}, value)
        elif value is not None:
            merged[key] = value
    return merged


def load_run_config(path: Optional[Path] = None, overrides: Optional[dict] = None) -> RunConfig:
    """
    Construit la RunConfig : défauts (Settings) < fichier TOML < flags.
    """
    data: dict = {}
    if path is not None:
        if not Path(path).is_file():
            raise FileNotFoundError(f"Fichier de config introuvable: {path}")
        data = TomlConfigSettingsSource(RunConfig, toml_file=path)()
    if overrides:
        data = _deep_merge(data, overrides)
    return RunConfig(**data)
