"""
COMBWALK - Pydantic Schemas
"""
from enum import Enum
from fractions import Fraction
from typing import Any, Literal, NamedTuple, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


Axis = Literal["Y", "X"]


# ============================================
# LATTICE
# ============================================

class CombVertex(NamedTuple):
    x: int
    y: int


ORIGIN = CombVertex(0, 0)


class DistTable(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    step: int = Field(ge=0)
    entries: dict[CombVertex, Fraction]

    @model_validator(mode="after")
    def _check_distribution(self):
        if self.total() != 1:
            raise ValueError(f"Masse totale {self.total()} != 1")
        parities = set()
        for v, mass in self.entries.items():
            if mass < 0:
                raise ValueError(f"Probabilité négative en {v}: {mass}")
            denominator = mass.denominator
            if denominator & (denominator - 1):
                raise ValueError(f"Probabilité non dyadique en {v}: {mass}")
            if mass:
                parities.add((v.x + v.y + self.step) % 2)
        if len(parities) > 1:
            raise ValueError("Support réparti sur les deux classes de parité")
        return self


    def total(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0))

    def prob(self, v: CombVertex) -> Fraction:
        return self.entries.get(v, Fraction(0))


class LatticeProbability(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    value: Union[Fraction, float]
    mode: Literal["exact", "float"]


# ============================================
# GREEN FUNCTIONS
# ============================================

class SingularDecomposition(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    h_coeffs: list[Any]
    k_coeffs: list[Any]
    order: int


# ============================================
# SADDLE
# ============================================

class SaddleData(BaseModel):
    axis: Axis
    xi: float
    z_o: float
    u_o: float  # √(1 - z_o) ; vaut ξ sur l'axe y
    v_o: Optional[float] = None  # √u_o, contours du plan v (axe x)
    phi: float
    psi2: float
    psi3: float
    residual: float


class XTaylorCoeffs(BaseModel):
    xi: float
    beta: float
    v: float
    b_n: list[float]
    d_n: list[float]
    d_prime_n: list[complex]
    g_m: list[float]
    g_prime_m: list[complex]
    a2: complex
    a3: complex
    a4: complex
    a2p: complex
    a3p: complex
    a4p: complex


class YTaylorValue(BaseModel):
    value: complex
    quadratic: float
    remainder: complex
    bound_constant: float


# ============================================
# CONTOURS
# ============================================

class ContourKind(str, Enum):
    SADDLE_CIRCLE = "SaddleCircle"
    UPLANE_HYBRID = "UPlaneHybrid"
    VPLANE_QUARTER = "VPlaneQuarter"
    VPLANE_TWO_BETA = "VPlaneTwoBeta"


class ContourPiece(BaseModel):
    """Noeuds z, radical u = √(1-z) et poids dz déjà multipliés par la quadrature"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    label: Literal["A", "B"]
    z: np.ndarray
    u: np.ndarray
    weight: np.ndarray


class ContourSpec(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: ContourKind
    xi: float
    alpha: float
    betas: list[float]
    t0: Optional[float] = None
    nodes: int
    end_modulus: float
    pieces: list[ContourPiece]

    def points(self) -> np.ndarray:
        return np.concatenate([piece.z for piece in self.pieces])


class SplitResult(BaseModel):
    kind: ContourKind
    part_a: complex
    part_b: complex
    total: complex
    log_scale: float = 0.0  # valeurs réelles = part_x · e^log_scale


# ============================================
# ESTIMATES
# ============================================

class Regime(str, Enum):
    Y_BULK = "Y_BULK"
    Y_MID = "Y_MID"
    Y_SMALL = "Y_SMALL"
    Y_TINY = "Y_TINY"
    X_BULK = "X_BULK"
    X_MID = "X_MID"
    X_CROSSOVER = "X_CROSSOVER"
    X_SMALL = "X_SMALL"
    X_TINY = "X_TINY"
    LOCAL = "LOCAL"


class EstimateResult(BaseModel):
    log_value: float
    value: float
    regime: Regime
    formula_id: str
    axis: Optional[Axis] = None
    k: Optional[int] = None
    n: Optional[int] = None
    xi: Optional[float] = None
    adjacent: list["EstimateResult"] = Field(default_factory=list)


# ============================================
# VERIFICATION
# ============================================

OracleName = Literal["latticeExact", "seriesExact", "seriesFloat", "contour"]


class ErrorRow(BaseModel):
    axis: Axis
    n: int
    k: int
    xi: float
    exact_log: float
    estimate_log: float
    rel_error: float
    regime: Regime
    oracle: OracleName


class ErrorTable(BaseModel):
    axis: Axis
    rows: list[ErrorRow]
    regime_max: dict[str, dict[int, float]] = Field(default_factory=dict)


class JonesRow(BaseModel):
    n: int
    k: int
    xi: float
    log_px: float
    log_py: float
    log_ratio: float
    source: Literal["oracle", "estimate"]
    estimate_log_px: float
    estimate_log_py: float


class EinsteinConstants(BaseModel):
    delta_s: Fraction
    delta_f: Fraction
    delta_w: Fraction
    relation_holds: bool

    model_config = ConfigDict(arbitrary_types_allowed=True)


class UniformityTrend(BaseModel):
    axis: Axis
    regime_max: dict[str, dict[int, float]]
    non_increasing: dict[str, bool]


class DominationReport(BaseModel):
    """|f(z)| <= f(|z|) pour les séries à coefficients positifs"""
    samples: int
    violations: int
    min_margin_nonreal: float
    max_real_deviation: float
    functions: list[str]


class ExactValue(NamedTuple):
    log_value: float
    rational: Optional[Fraction]
    oracle: str


# ============================================
# API
# ============================================

class ExactResponse(BaseModel):
    axis: Axis
    k: int
    n: int
    rational: Optional[str] = None
    log_value: float
    oracle: OracleName


class SeriesResponse(BaseModel):
    axis: Axis
    k: int
    order: int
    coeffs: list[str]


class GreenResponse(BaseModel):
    function: Literal["g", "f1sq", "f2sq", "gd"]
    d: Optional[int] = None
    z: complex
    value: complex


class CompareRequest(BaseModel):
    axis: Axis = "Y"
    n: list[int] = Field(min_length=1)
    xi: list[float] = Field(min_length=1)
    oracle: Optional[OracleName] = None


class JonesResponse(BaseModel):
    rows: list[JonesRow]
    delta_s: str
    delta_f: str
    delta_w: str
    relation_holds: bool
