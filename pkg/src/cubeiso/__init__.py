"""Exact and sampled isoperimetric quantities of Boolean functions on the cube."""

__version__ = "0.1.0"

from ._accel import BACKEND  # noqa: E402
from .errors import (  # noqa: E402
    ArgumentError,
    CapacityError,
    ConstructionError,
    CubeIsoError,
    StructureError,
    UndefinedRatioError,
)
from .hypercube import (  # noqa: E402
    BooleanFunction,
    build_function,
    evaluate,
    flip,
    mean_variance,
    monotone_direction,
    restrict,
)
from .metrics import (  # noqa: E402
    influence,
    influence_report,
    inequality_report,
    negative_influence,
    sensitivity_profile,
    total_influence,
)
from .monotone import (  # noqa: E402
    bilinear_variance,
    distance_to_monotone_bruteforce,
    distance_to_monotone_exact,
    matching_lower_bound,
)
from .tribes import (  # noqa: E402
    estimate_metrics,
    instance_to_function,
    sample_counterexample,
    zoo,
)

__all__ = [
    "BACKEND",
    "ArgumentError",
    "BooleanFunction",
    "CapacityError",
    "ConstructionError",
    "CubeIsoError",
    "StructureError",
    "UndefinedRatioError",
    "bilinear_variance",
    "build_function",
    "distance_to_monotone_bruteforce",
    "distance_to_monotone_exact",
    "estimate_metrics",
    "evaluate",
    "flip",
    "inequality_report",
    "influence",
    "influence_report",
    "instance_to_function",
    "matching_lower_bound",
    "mean_variance",
    "monotone_direction",
    "negative_influence",
    "restrict",
    "sample_counterexample",
    "sensitivity_profile",
    "total_influence",
    "zoo",
]
