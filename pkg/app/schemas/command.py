from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, ValidationError, model_validator

from app.config import settings
from app.exceptions import DomainError
from app.schemas.raster import PALETTES
from app.schemas.verdict import BasinTestConfig

Command = Literal[
    "classify",
    "render-julia",
    "render-param",
    "dimension",
    "verify-asymptotic",
    "series-check",
    "centers",
    "real-fixed",
]

# field name -> command-line flag, for error messages
FLAGS = {
    "d": "-d",
    "lambdas": "--lambda",
    "n": "--n",
    "n_list": "--n-list",
    "alphas": "--alpha",
    "D": "--D",
    "seed": "--seed",
    "window": "--window",
    "grid": "--grid",
    "interval": "--interval",
    "width": "--width",
    "height": "--height",
    "palette": "--palette",
    "name": "--name",
    "records": "--records",
    "max_iter": "--max-iter",
    "attract_eps": "--attract-eps",
    "escape_R": "--escape-R",
    "K": "--K",
    "deviation_samples": "--deviation-samples",
    "workers": "--workers",
    "log_level": "--log-level",
    "storage": "--storage",
}

# lambda ladders used when verify-asymptotic gets no --lambda
ASYMPTOTIC_LADDERS = {
    2: (1e2, 1e3, 1e4, 1e5),
    3: (1e4, 1e6),
}


class RunConfig(BaseModel):
    """Fully validated options of one CLI invocation."""
    command: Command
    d: int = Field(default=2, ge=2)
    lambdas: List[Tuple[float, float]] = []
    n: Optional[int] = Field(default=None, ge=1)
    n_list: List[int] = []
    alphas: List[float] = []
    D: float = Field(default=1.0, gt=0)
    seed: Optional[Tuple[float, float]] = None
    window: Optional[Tuple[float, float, float, float]] = None
    grid: int = Field(default=40, ge=1)
    interval: Tuple[float, float] = (1.0, 100.0)
    width: int = Field(default_factory=lambda: settings.render.size, ge=16)
    height: int = Field(default_factory=lambda: settings.render.size, ge=16)
    palette: str = Field(default_factory=lambda: settings.render.palette)
    name: Optional[str] = None
    records: Optional[str] = None
    max_iter: int = Field(default_factory=lambda: settings.basin.max_iter, ge=1)
    attract_eps: float = Field(default_factory=lambda: settings.basin.attract_eps, gt=0, lt=1)
    escape_R: float = Field(default_factory=lambda: settings.basin.escape_R, gt=10)
    K: int = Field(default_factory=lambda: settings.series.truncation_K, ge=20)
    deviation_samples: int = Field(default=0, ge=0)
    workers: int = Field(default_factory=lambda: settings.workers, ge=1)
    log_level: str = Field(default_factory=lambda: settings.log_level)
    output_dir: Optional[str] = None
    storage: str = Field(default_factory=lambda: settings.storage.storage_provider)

    class Config:
        frozen = True

    @model_validator(mode="after")
    def _combinations(self) -> "RunConfig":
        command = self.command
        if self.palette not in PALETTES:
            raise ValueError(f"--palette must be one of {', '.join(PALETTES)}")
        if self.log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"--log-level {self.log_level!r} is not a logging level")
        if self.window is not None:
            re_min, re_max, im_min, im_max = self.window
            if not (re_min < re_max and im_min < im_max):
                raise ValueError("--window must be re_min,re_max,im_min,im_max with min < max")

        if command in ("classify", "dimension") and not self.lambdas:
            raise ValueError(f"{command} needs at least one --lambda (or --lambda-file)")
        if command == "render-julia":
            if len(self.lambdas) != 1:
                raise ValueError("render-julia takes exactly one --lambda")
            if self.lambdas[0] == (0.0, 0.0):
                raise ValueError("--lambda must be nonzero for a dynamical render")
        if command == "render-param" and self.lambdas:
            raise ValueError("render-param does not take --lambda")
        if command == "real-fixed":
            if len(self.lambdas) != 1 or self.lambdas[0][1] != 0.0:
                raise ValueError("real-fixed takes exactly one real --lambda")
            if not self.interval[0] < self.interval[1]:
                raise ValueError("--interval must be a,b with a < b")
        if command == "centers":
            if self.n is None:
                raise ValueError("centers needs --n")
            if (self.seed is None) == (self.window is None):
                raise ValueError("centers takes either --seed or --window, not both")
        if command == "verify-asymptotic" and not self.lambdas and self.d not in ASYMPTOTIC_LADDERS:
            raise ValueError(f"verify-asymptotic has no default ladder for -d {self.d}; pass --lambda")
        if command in ("dimension", "verify-asymptotic") and self.n is not None:
            if self.n > settings.periodic.n_max(self.d):
                raise ValueError(f"--n {self.n} exceeds the limit {settings.periodic.n_max(self.d)} for -d {self.d}")
        if command == "series-check" and any(n < 1 for n in self.n_list):
            raise ValueError("--n-list entries must be >= 1")
        if command == "series-check" and any(not 0 < abs(a) <= 0.05 for a in self.alphas):
            raise ValueError("--alpha entries must satisfy 0 < |alpha| <= 0.05")
        return self

    @classmethod
    def build(cls, **options) -> "RunConfig":
        """Validate options; any failure becomes a DomainError naming the flag."""
        try:
            return cls(**{k: v for k, v in options.items() if v is not None})
        except ValidationError as e:
            error = e.errors()[0]
            loc = error.get("loc") or ()
            flag = FLAGS.get(str(loc[0])) if loc else None
            message = error.get("msg", str(e)).removeprefix("Value error, ")
            if flag and flag not in message:
                message = f"{flag}: {message}"
            raise DomainError(message, "error.domain.flag", {"flag": flag} if flag else None)

    # ===== DERIVED =====

    @property
    def lambda_values(self) -> List[complex]:
        return [complex(re, im) for re, im in self.lambdas]

    @property
    def basin_config(self) -> BasinTestConfig:
        return BasinTestConfig(attract_eps=self.attract_eps, escape_R=self.escape_R, max_iter=self.max_iter)

    @property
    def period(self) -> int:
        """Period for dimension tables: --n, else 12 for d=2 and the degree's limit otherwise."""
        if self.n is not None:
            return self.n
        return 12 if self.d == 2 else settings.periodic.n_max(self.d)

    @property
    def ladder(self) -> List[complex]:
        if self.lambdas:
            return self.lambda_values
        return [complex(lam) for lam in ASYMPTOTIC_LADDERS[self.d]]

    @property
    def series_periods(self) -> List[int]:
        if self.n_list:
            return self.n_list
        return [3, 4] if self.d == 2 else [2, 3]

    @property
    def render_window(self) -> Tuple[float, float, float, float]:
        if self.window is not None:
            return self.window
        return settings.render.param_window if self.command == "render-param" else settings.render.julia_window
