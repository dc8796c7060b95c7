import cmath
import math
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, model_validator


class SpherePoint(BaseModel):
    """
    A point of the Riemann sphere stored in one of three charts.

    chart "origin":   z = value
    chart "one":      z = 1 + value      (precise near the pole of T)
    chart "infinity": z = 1 / value      (value == 0 is the point at infinity)
    """
    chart: Literal["origin", "one", "infinity"] = "origin"
    re: float = 0.0
    im: float = 0.0

    class Config:
        frozen = True

    @model_validator(mode="after")
    def _finite_components(self) -> "SpherePoint":
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError("chart coordinates must be finite; use SpherePoint.infinity()")
        return self

    # ===== CONSTRUCTORS =====

    @classmethod
    def finite(cls, z: complex) -> "SpherePoint":
        z = complex(z)
        if cmath.isinf(z):
            return cls.infinity()
        return cls(chart="origin", re=z.real, im=z.imag)

    @classmethod
    def infinity(cls) -> "SpherePoint":
        return cls(chart="infinity", re=0.0, im=0.0)

    @classmethod
    def near_one(cls, offset: complex) -> "SpherePoint":
        offset = complex(offset)
        if cmath.isinf(offset):
            return cls.infinity()
        return cls(chart="one", re=offset.real, im=offset.imag)

    @classmethod
    def from_reciprocal(cls, w: complex) -> "SpherePoint":
        w = complex(w)
        if cmath.isinf(w):
            return cls(chart="origin", re=0.0, im=0.0)
        return cls(chart="infinity", re=w.real, im=w.imag)

    # ===== ACCESSORS =====

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @property
    def is_infinity(self) -> bool:
        return self.chart == "infinity" and self.re == 0.0 and self.im == 0.0

    @property
    def is_finite(self) -> bool:
        return not self.is_infinity

    def to_complex(self) -> complex:
        """Plain complex value; the point at infinity maps to complex(inf, 0)."""
        if self.is_infinity:
            return complex(math.inf, 0.0)
        if self.chart == "one":
            return 1.0 + self.value
        if self.chart == "infinity":
            return 1.0 / self.value
        return self.value

    def offset_from_one(self) -> complex:
        """z - 1 without cancellation in the "one" chart."""
        if self.is_infinity:
            return complex(math.inf, 0.0)
        if self.chart == "one":
            return self.value
        if self.chart == "infinity":
            w = self.value
            return (1.0 - w) / w
        return self.value - 1.0

    def reciprocal(self) -> complex:
        """1 / z, exact zero at infinity."""
        if self.chart == "infinity":
            return self.value
        z = self.to_complex()
        if z == 0:
            return complex(math.inf, 0.0)
        return 1.0 / z

    def modulus(self) -> float:
        if self.is_infinity:
            return math.inf
        if self.chart == "infinity":
            return 1.0 / abs(self.value)
        return abs(self.to_complex())

    def homogeneous(self) -> Tuple[complex, complex]:
        """Projective coordinates (a, b) with z = a / b and max(|a|, |b|) of order one."""
        if self.chart == "infinity":
            return 1.0 + 0.0j, self.value
        z = self.to_complex()
        if abs(z) <= 1.0:
            return z, 1.0 + 0.0j
        return 1.0 + 0.0j, 1.0 / z

    def chordal_distance(self, other: "SpherePoint") -> float:
        """Chordal metric on the sphere, bounded by 2."""
        a1, b1 = self.homogeneous()
        a2, b2 = other.homogeneous()
        norm = math.sqrt(abs(a1) ** 2 + abs(b1) ** 2) * math.sqrt(abs(a2) ** 2 + abs(b2) ** 2)
        return 2.0 * abs(a1 * b2 - a2 * b1) / norm


class FamilyParams(BaseModel):
    """Degree d and parameter lambda of T(z) = ((z+lambda-1)/(z-1))^d."""
    d: int = Field(ge=2, description="Degree of T")
    lam_re: float = Field(default=0.0, description="Real part of lambda")
    lam_im: float = Field(default=0.0, description="Imaginary part of lambda")
    degenerate: bool = Field(default=False, description="Allow lambda = 0 (polynomial branch)")
    alpha_re: Optional[float] = Field(default=None, description="Explicit rescaled parameter (real)")
    alpha_im: Optional[float] = Field(default=None, description="Explicit rescaled parameter (imag)")

    class Config:
        frozen = True

    @model_validator(mode="after")
    def _check_lambda(self) -> "FamilyParams":
        if self.lam_re == 0.0 and self.lam_im == 0.0 and not self.degenerate and self.alpha_re is None:
            raise ValueError("lambda = 0 requires the degenerate branch")
        return self

    @classmethod
    def create(cls, d: int, lam: complex, degenerate: bool = False) -> "FamilyParams":
        lam = complex(lam)
        return cls(d=d, lam_re=lam.real, lam_im=lam.imag, degenerate=degenerate)

    @classmethod
    def from_alpha(cls, d: int, alpha: complex) -> "FamilyParams":
        """Parameter given by alpha; alpha = 0 stands for lambda = infinity."""
        alpha = complex(alpha)
        if alpha == 0:
            lam = complex(math.inf, 0.0)
        else:
            lam = alpha ** (-(d + 1))
        return cls(d=d, lam_re=lam.real, lam_im=lam.imag, alpha_re=alpha.real, alpha_im=alpha.imag)

    @property
    def lam(self) -> complex:
        return complex(self.lam_re, self.lam_im)

    @property
    def is_degenerate(self) -> bool:
        return self.lam == 0

    @property
    def q(self) -> int:
        return -self.d

    @property
    def alpha(self) -> complex:
        if self.alpha_re is not None:
            return complex(self.alpha_re, self.alpha_im or 0.0)
        if self.lam == 0:
            return complex(math.inf, 0.0)
        return cmath.exp(-cmath.log(self.lam) / (self.d + 1))

    def label(self) -> str:
        return f"d={self.d}, lambda={self.lam_re:.6g}{self.lam_im:+.6g}i"


class CriticalData(BaseModel):
    xi: List[SpherePoint]
    omega: List[SpherePoint]
    fixed_crit: List[SpherePoint]

    class Config:
        frozen = True
