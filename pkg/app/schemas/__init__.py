from .message import *
from .sphere import *
from .verdict import *
from .series import *
from .dimension import *
from .raster import *

__all__ = [
    # Message schemas
    "MessageResponse",

    # Sphere schemas
    "SpherePoint", "FamilyParams", "CriticalData",

    # Verdict schemas
    "BasinVerdict", "VerdictKind", "FixedPointStability", "BasinTestConfig", "PointVerdict",
    "ParamVerdict", "EquivalenceReport", "GreenValue", "CenterResult", "RealFixedPoint",
    "RealFixedPointReport", "CriticalOrbitReport",

    # Series schemas
    "SeriesConfig", "AverageContext", "IdentityRecord", "ModularLemmaReport",
    "SecondOrderReport", "SecondOrderSweep",

    # Dimension schemas
    "PeriodicOrbitSet", "DimensionEstimate", "IfsBounds", "DimensionRecord",

    # Raster schemas
    "RasterSpec", "VerdictGrid", "PALETTES", "NON_ESCAPING", "DEGENERATE",
]
