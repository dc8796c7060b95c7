from .dynamics_processor import dynamics_processor
from .basin_processor import basin_processor
from .series_processor import series_processor

__all__ = [
    "dynamics_processor",
    "basin_processor",
    "series_processor",
]
