"""Experiment handlers, one per experiment kind."""

from .base import (
    BaseExperimentHandler,
    ExperimentOutcome,
    get_handler,
    list_handlers,
    register_handler,
)

# Import handlers to register them
from .accdim import AccessibleDimensionHandler
from .bounds_table import BoundsTableHandler
from .design_check import DesignCheckHandler
from .shadow_run import ShadowRunHandler
from .spacetime_clifford import SpacetimeCliffordHandler
from .spacetime_random import SpacetimeRandomHandler
from .teleport_verify import TeleportVerifyHandler

__all__ = [
    "BaseExperimentHandler",
    "ExperimentOutcome",
    "get_handler",
    "list_handlers",
    "register_handler",
    "AccessibleDimensionHandler",
    "BoundsTableHandler",
    "DesignCheckHandler",
    "ShadowRunHandler",
    "SpacetimeCliffordHandler",
    "SpacetimeRandomHandler",
    "TeleportVerifyHandler",
]
