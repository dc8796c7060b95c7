from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from app.config import settings


class BasinVerdict(str, Enum):
    ATTRACTED_TO_ONE = "AttractedTo1"
    ATTRACTED_TO_INFINITY = "AttractedToInfinity"
    UNDETERMINED = "Undetermined"


class VerdictKind(str, Enum):
    CAPTURE_DEPTH = "CaptureDepth"
    NON_ESCAPING = "NonEscapingWithinBudget"
    DEGENERATE = "Degenerate"


class FixedPointStability(str, Enum):
    ATTRACTING = "attracting"
    PARABOLIC = "parabolic"
    REPELLING = "repelling"


class BasinTestConfig(BaseModel):
    attract_eps: float = Field(default_factory=lambda: settings.basin.attract_eps, gt=0, lt=1)
    escape_R: float = Field(default_factory=lambda: settings.basin.escape_R, gt=10)
    max_iter: int = Field(default_factory=lambda: settings.basin.max_iter, ge=1)
    green_eps: float = Field(default_factory=lambda: settings.basin.green_eps, gt=0, lt=1)
    ascent_max_steps: int = Field(default_factory=lambda: settings.basin.ascent_max_steps, ge=1)
    ascent_max_halvings: int = Field(default_factory=lambda: settings.basin.ascent_max_halvings, ge=1)

    class Config:
        frozen = True

    def doubled(self) -> "BasinTestConfig":
        return self.model_copy(
            update={
                "max_iter": 2 * self.max_iter,
                "ascent_max_steps": 2 * self.ascent_max_steps,
                "ascent_max_halvings": 2 * self.ascent_max_halvings,
            }
        )

    def tightened(self, factor: float = 10.0) -> "BasinTestConfig":
        return self.model_copy(
            update={
                "attract_eps": self.attract_eps / factor,
                "escape_R": self.escape_R * factor,
                "green_eps": self.green_eps / factor,
            }
        )


class PointVerdict(BaseModel):
    verdict: BasinVerdict
    iterations: int
    exit_modulus: float = 0.0


class ParamVerdict(BaseModel):
    kind: VerdictKind
    depth: Optional[int] = Field(default=None, ge=0)
    iterations_used: int = 0
    witness_re: Optional[float] = None
    witness_im: Optional[float] = None

    @model_validator(mode="after")
    def _depth_matches_kind(self) -> "ParamVerdict":
        if (self.kind == VerdictKind.CAPTURE_DEPTH) != (self.depth is not None):
            raise ValueError("depth is set exactly for CaptureDepth verdicts")
        return self

    @classmethod
    def capture(cls, depth: int, iterations: int, witness: complex) -> "ParamVerdict":
        return cls(
            kind=VerdictKind.CAPTURE_DEPTH,
            depth=depth,
            iterations_used=iterations,
            witness_re=witness.real,
            witness_im=witness.imag,
        )

    @classmethod
    def non_escaping(cls, iterations: int) -> "ParamVerdict":
        return cls(kind=VerdictKind.NON_ESCAPING, iterations_used=iterations)

    @classmethod
    def degenerate(cls) -> "ParamVerdict":
        return cls(kind=VerdictKind.DEGENERATE)

    @property
    def label(self) -> str:
        if self.kind == VerdictKind.CAPTURE_DEPTH:
            return f"CaptureDepth({self.depth})"
        return self.kind.value


class EquivalenceReport(BaseModel):
    """The five equivalent conditions for the Julia set to be a quasicircle."""
    quasicircle: Optional[bool]
    xi_in_basin_infinity: Optional[bool]
    omega_in_basin_one: Optional[bool]
    critical_value_in_basin_infinity: Optional[bool]
    zero_in_basin_one: Optional[bool]

    @property
    def conditions(self) -> List[Optional[bool]]:
        return [
            self.quasicircle,
            self.xi_in_basin_infinity,
            self.omega_in_basin_one,
            self.critical_value_in_basin_infinity,
            self.zero_in_basin_one,
        ]

    @property
    def undetermined(self) -> bool:
        return any(c is None for c in self.conditions)

    @property
    def all_equal(self) -> bool:
        return not self.undetermined and len(set(self.conditions)) == 1


class GreenValue(BaseModel):
    value: float
    is_center: bool = False
    k_used: int = 0
    increment: float = 0.0


class CenterResult(BaseModel):
    lam_re: float
    lam_im: float
    n: int
    residual: float
    iterations: int
    converged: bool
    verdict: Optional[str] = None

    @property
    def lam(self) -> complex:
        return complex(self.lam_re, self.lam_im)


class RealFixedPoint(BaseModel):
    x: float
    multiplier: float
    stability: FixedPointStability


class RealFixedPointReport(BaseModel):
    interval: Tuple[float, float]
    points: List[RealFixedPoint]
    adjacent_sign_changes: bool = False
    increasing_on_ray: Optional[bool] = None
    min_increment: Optional[float] = None

    @model_validator(mode="after")
    def _strictly_increasing(self) -> "RealFixedPointReport":
        xs = [p.x for p in self.points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("fixed points must be strictly increasing")
        return self


class CriticalOrbitReport(BaseModel):
    """Residuals of the critical-orbit identities of T."""
    residuals: List[Tuple[str, float]]

    @property
    def max_residual(self) -> float:
        return max((r for _, r in self.residuals), default=0.0)
