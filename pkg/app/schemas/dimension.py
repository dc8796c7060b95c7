from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator


class PeriodicOrbitSet(BaseModel):
    """Fixed points of f_alpha^n, ordered by their seed index j, with multipliers."""
    d: int
    n: int = Field(..., ge=1)
    alpha_re: float
    alpha_im: float = 0.0
    points: np.ndarray
    multipliers: np.ndarray
    max_residual: float = 0.0
    min_separation: float = np.inf

    class Config:
        arbitrary_types_allowed = True

    @model_validator(mode="after")
    def _count(self) -> "PeriodicOrbitSet":
        expected = abs((-self.d) ** self.n - 1)
        if self.points.shape != (expected,) or self.multipliers.shape != (expected,):
            raise ValueError(f"expected {expected} periodic points, got {self.points.shape}")
        return self

    @property
    def alpha(self) -> complex:
        return complex(self.alpha_re, self.alpha_im)

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.multipliers)

    def __len__(self) -> int:
        return int(self.points.size)


class DimensionEstimate(BaseModel):
    D: float = Field(..., gt=0.5, lt=2.0)
    n_used: int
    residual: float
    bracket: Tuple[float, float]
    iterations: int = 0
    alpha_re: float
    alpha_im: float = 0.0

    @model_validator(mode="after")
    def _bracketed(self) -> "DimensionEstimate":
        lo, hi = self.bracket
        if not lo <= self.D <= hi:
            raise ValueError("D must lie in its bracket")
        return self

    @property
    def alpha(self) -> complex:
        return complex(self.alpha_re, self.alpha_im)


class IfsBounds(BaseModel):
    """Similarity-dimension bounds s_lower <= D <= s_upper from per-branch contraction extrema."""
    n: int
    branches: int
    s_lower: float
    s_upper: float
    D: Optional[float] = None

    @property
    def sandwiched(self) -> bool:
        return self.D is not None and self.s_lower <= self.D <= self.s_upper


class DimensionRecord(BaseModel):
    """One row of a dimension table."""
    d: int
    lam_re: float
    lam_im: float
    alpha_modulus: float
    n: int
    D_bowen: float
    D_formula: float
    residual: float
    deviation: float

    @property
    def error(self) -> float:
        return abs(self.D_bowen - self.D_formula)

    def row(self) -> List[str]:
        return [
            str(self.d),
            f"{self.lam_re:.10g}",
            f"{self.lam_im:.10g}",
            f"{self.alpha_modulus:.10g}",
            str(self.n),
            f"{self.D_bowen:.12f}",
            f"{self.D_formula:.12f}",
            f"{self.residual:.3e}",
            f"{self.deviation:.6e}",
        ]

    @staticmethod
    def header() -> List[str]:
        return ["d", "lambda_re", "lambda_im", "alpha_modulus", "n", "D_bowen", "D_formula", "residual", "deviation"]
