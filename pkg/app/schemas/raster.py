from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from app.schemas.sphere import FamilyParams
from app.schemas.verdict import BasinTestConfig

# parameter-plane cell codes below the capture depths
NON_ESCAPING = -1
DEGENERATE = -2

PALETTES = ("paper-bw", "depth-cycle", "smooth-escape")


class RasterSpec(BaseModel):
    """A pixel grid over a rectangle of the dynamical or parameter plane; row 0 is the top edge."""
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    width: int = Field(..., ge=16)
    height: int = Field(..., ge=16)
    mode: Literal["dynamical", "parameter"]
    d: int = Field(..., ge=2)
    lam_re: float = 0.0
    lam_im: float = 0.0
    cfg: BasinTestConfig = Field(default_factory=BasinTestConfig)

    class Config:
        frozen = True

    @model_validator(mode="after")
    def _bounds(self) -> "RasterSpec":
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("raster bounds must be a non-degenerate rectangle")
        if self.mode == "dynamical" and self.lam_re == 0.0 and self.lam_im == 0.0:
            raise ValueError("dynamical rasters need lambda != 0")
        return self

    @property
    def params(self) -> Optional[FamilyParams]:
        if self.mode != "dynamical":
            return None
        return FamilyParams.create(self.d, complex(self.lam_re, self.lam_im))

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        return self.re_min, self.re_max, self.im_min, self.im_max

    def row_centers(self, row: int) -> np.ndarray:
        dx = (self.re_max - self.re_min) / self.width
        dy = (self.im_max - self.im_min) / self.height
        re = self.re_min + (np.arange(self.width) + 0.5) * dx
        im = self.im_max - (row + 0.5) * dy
        return re + 1j * im

    def cell_of(self, z: complex) -> Tuple[int, int]:
        """(row, column) of the cell containing z."""
        col = int((z.real - self.re_min) / (self.re_max - self.re_min) * self.width)
        row = int((self.im_max - z.imag) / (self.im_max - self.im_min) * self.height)
        return min(max(row, 0), self.height - 1), min(max(col, 0), self.width - 1)


class VerdictGrid(BaseModel):
    """
    Row-major cells. Dynamical codes: 0 undetermined, 1 basin of 1, 2 basin of
    infinity. Parameter codes: capture depth >= 0, NON_ESCAPING, DEGENERATE.
    """
    spec: RasterSpec
    codes: np.ndarray
    iterations: np.ndarray
    exit_modulus: np.ndarray

    class Config:
        arbitrary_types_allowed = True

    @model_validator(mode="after")
    def _shape(self) -> "VerdictGrid":
        shape = (self.spec.height, self.spec.width)
        for name in ("codes", "iterations", "exit_modulus"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} must have shape {shape}")
        return self

    def identical(self, other: "VerdictGrid") -> bool:
        return (
            np.array_equal(self.codes, other.codes)
            and np.array_equal(self.iterations, other.iterations)
            and np.array_equal(self.exit_modulus, other.exit_modulus)
        )
