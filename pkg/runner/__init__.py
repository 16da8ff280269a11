# runner/__init__.py
"""
PaST-NoC experiment runner.

Modules:
    config: INI experiment configs and sweep axes
    scenarios: fig9, fig11 and fig14 regression scenarios
    run: single runs, the analysis bundle and cross-validation
    sweep: resumable cross-product sweeps on a worker pool
"""

__version__ = "0.1.0"
__author__ = "Cerevia Inc."
__license__ = "Proprietary"
__email__ = "research@cerevia.ai"

from .config import ExperimentConfig, load_config, parse_axis, parse_config
from .run import analyze, run, run_point, validate
from .scenarios import SCENARIOS, ScenarioResult, fig9, fig11, fig14
from .sweep import sweep, sweep_points

__all__ = [
    # Config
    "ExperimentConfig",
    "load_config",
    "parse_axis",
    "parse_config",

    # Scenarios
    "SCENARIOS",
    "ScenarioResult",
    "fig9",
    "fig11",
    "fig14",

    # Execution
    "analyze",
    "run",
    "run_point",
    "sweep",
    "sweep_points",
    "validate",
]
