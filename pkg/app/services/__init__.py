from .classification_service import classification_service
from .dimension_service import dimension_service
from .series_service import series_service
from .render_service import render_service

__all__ = [
    "classification_service",
    "dimension_service",
    "series_service",
    "render_service",
]
