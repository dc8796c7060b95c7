# app/config.py -  configuration
import os
from typing import Tuple

import psutil
from dotenv import load_dotenv
from pydantic_settings import BaseSettings

load_dotenv(override=True)


class BasinSettings(BaseSettings):
    attract_eps: float = 1e-8
    escape_R: float = 1e8
    max_iter: int = 5000

    # Green function / internal-ray ascent
    green_eps: float = 1e-10
    ascent_max_steps: int = 400
    ascent_max_halvings: int = 60
    certify_samples: int = 64

    class Config:
        case_sensitive = False


class CenterSettings(BaseSettings):
    newton_step: float = 1e-7
    max_newton: int = 100
    tolerance: float = 1e-10
    dedup_tol: float = 1e-8

    class Config:
        case_sensitive = False


class RealAxisSettings(BaseSettings):
    grid_points: int = 10000
    bisect_tol: float = 1e-12
    parabolic_tol: float = 1e-9

    class Config:
        case_sensitive = False


class PeriodicSettings(BaseSettings):
    alpha_step: float = 0.02
    alpha_ceiling: float = 0.35
    newton_max: int = 50
    residual_tol: float = 1e-10
    distinct_tol: float = 1e-8
    n_max_d2: int = 14
    n_max_d3: int = 9
    max_points: int = 200000
    bracket_lo: float = 0.5
    bracket_hi: float = 2.0
    bisect_tol: float = 1e-13

    def n_max(self, d: int) -> int:
        if d == 2:
            return self.n_max_d2
        if d == 3:
            return self.n_max_d3
        n = 1
        while d ** (n + 1) <= self.max_points:
            n += 1
        return n

    class Config:
        case_sensitive = False


class SeriesSettings(BaseSettings):
    truncation_K: int = 60
    sample_budget: int = 100000

    class Config:
        case_sensitive = False


class RenderSettings(BaseSettings):
    param_window: Tuple[float, float, float, float] = (-3.0, 5.0, -4.0, 4.0)
    julia_window: Tuple[float, float, float, float] = (-4.0, 6.0, -5.0, 5.0)
    size: int = 512
    palette: str = "paper-bw"
    format_version: str = "1"

    class Config:
        case_sensitive = False


class StorageSettings(BaseSettings):
    storage_provider: str = os.getenv("POTTS_STORAGE_PROVIDER", "local")
    output_dir: str = os.getenv("POTTS_OUTPUT_DIR", "output")

    class Config:
        case_sensitive = False


class Settings(BaseSettings):
    log_level: str = "INFO"
    log_format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    workers: int = int(os.getenv("POTTS_WORKERS", "0")) or (psutil.cpu_count(logical=True) or 1)
    records_version: str = "1"

    basin: BasinSettings = BasinSettings()
    center: CenterSettings = CenterSettings()
    real_axis: RealAxisSettings = RealAxisSettings()
    periodic: PeriodicSettings = PeriodicSettings()
    series: SeriesSettings = SeriesSettings()
    render: RenderSettings = RenderSettings()
    storage: StorageSettings = StorageSettings()

    class Config:
        case_sensitive = False


settings = Settings()
