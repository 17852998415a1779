"""Hawk-style swarm optimization for optical-downlink placement and power."""

__version__ = "0.1.0"

from . import baselines, config, experiments, fnn, hho, planner, vlc
from .config import ExperimentConfig, load_config
from .hho import SearchSpace, optimize
from .planner import HhoParams, PenaltyConfig, Solution, solve
from .vlc import OpticalParams, Placement, Scenario

__all__ = [
    "__version__",
    "ExperimentConfig",
    "HhoParams",
    "OpticalParams",
    "PenaltyConfig",
    "Placement",
    "Scenario",
    "SearchSpace",
    "Solution",
    "baselines",
    "config",
    "experiments",
    "fnn",
    "hho",
    "load_config",
    "optimize",
    "planner",
    "solve",
    "vlc",
]
