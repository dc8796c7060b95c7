from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from app.config import settings


class SeriesConfig(BaseModel):
    K: int = Field(default_factory=lambda: settings.series.truncation_K, ge=20)
    q: int = Field(..., le=-2)

    class Config:
        frozen = True

    @model_validator(mode="after")
    def _tail_bound(self) -> "SeriesConfig":
        if self.K >= 60 and self.tail > 1e-15:
            raise ValueError(f"truncation tail {self.tail:.2e} exceeds 1e-15")
        return self

    @classmethod
    def for_degree(cls, d: int, K: Optional[int] = None) -> "SeriesConfig":
        return cls(q=-d) if K is None else cls(q=-d, K=K)

    @property
    def d(self) -> int:
        return -self.q

    @property
    def tail(self) -> float:
        r = 1.0 / abs(self.q)
        return r ** self.K / (1.0 - r)


class AverageContext(BaseModel):
    """Sample t_j = j / (q^n - 1), j = 1..|q^n - 1|."""
    n: int = Field(..., ge=1)
    q: int = Field(..., le=-2)

    class Config:
        frozen = True

    @model_validator(mode="after")
    def _budget(self) -> "AverageContext":
        if self.size > settings.series.sample_budget:
            raise ValueError(f"sample of {self.size} points exceeds the budget of {settings.series.sample_budget}")
        return self

    @property
    def modulus(self) -> int:
        return self.q ** self.n - 1

    @property
    def size(self) -> int:
        return abs(self.modulus)


class IdentityRecord(BaseModel):
    name: str
    value_re: float
    value_im: float = 0.0
    expected_re: float
    expected_im: float = 0.0
    residual: float
    tolerance: float

    @classmethod
    def create(cls, name: str, value: complex, expected: complex, tolerance: float) -> "IdentityRecord":
        value, expected = complex(value), complex(expected)
        return cls(
            name=name,
            value_re=value.real,
            value_im=value.imag,
            expected_re=expected.real,
            expected_im=expected.imag,
            residual=abs(value - expected),
            tolerance=tolerance,
        )

    @property
    def value(self) -> complex:
        return complex(self.value_re, self.value_im)

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


class ModularLemmaReport(BaseModel):
    q: int
    n: int
    m_range: int
    nonzero_powers: bool
    nonzero_sums: bool
    difference_criterion: bool
    counterexamples: List[Tuple[str, int, int]] = []

    @property
    def passed(self) -> bool:
        return self.nonzero_powers and self.nonzero_sums and self.difference_criterion


class SecondOrderReport(BaseModel):
    """Average of the product of |f_alpha'|^{-D} over an n-orbit, two ways."""
    d: int
    n: int
    D: float
    alpha_re: float
    alpha_im: float = 0.0
    lhs_motion: float
    lhs_fixed_points: float
    rhs_polynomial: float
    rhs_exponential: float

    @property
    def alpha(self) -> complex:
        return complex(self.alpha_re, self.alpha_im)

    @property
    def discrepancy_motion(self) -> float:
        return abs(self.lhs_motion - self.rhs_exponential)

    @property
    def discrepancy_fixed_points(self) -> float:
        return abs(self.lhs_fixed_points - self.rhs_exponential)


class SecondOrderSweep(BaseModel):
    reports: List[SecondOrderReport]
    slope_motion: float
    slope_fixed_points: float
    fitted_constant: float
    quadratic_coefficient: float
    expected_coefficient: float

    @property
    def coefficient_error(self) -> float:
        return abs(self.quadratic_coefficient - self.expected_coefficient) / abs(self.expected_coefficient)
