# calculators/__init__.py
"""
PaST-NoC calculators package.

Closed-form models: payload capacity of a race-logic packet, the baseline
catalog, and throughput per port per JJ with crossover search.

Modules:
    capacity: bins-and-balls payload model
    baselines: binary and rotary NoC baselines, reported crossovers
    goodput: delivery efficiency, goodput curves, crossovers, improvement factors
"""

# Package metadata
__version__ = "0.1.0"
__author__ = "Cerevia Inc."
__license__ = "Proprietary"
__email__ = "research@cerevia.ai"

from .baselines import (
    BASELINES,
    CASES,
    POWER_CONSTANTS,
    PUBLISHED_CROSSOVERS,
    BaselineSpec,
    baseline_catalog,
    competitor,
    parse_case,
)
from .capacity import (
    CAPACITY_NOTE,
    PUBLISHED_M_AT_64,
    bits_per_packet,
    expected_pulses_asymptotic,
    expected_pulses_exact,
    monte_carlo_occupancy,
    pack_values,
)
from .goodput import (
    butterfly_efficiency,
    crossover,
    crossover_table,
    delivery_efficiency,
    goodput_curve,
    improvement_factor,
    measured_efficiency,
    pastnoc_goodput,
    scale_control_period,
    worst_case_efficiency,
)

# Define public API
__all__ = [
    # Capacity
    "CAPACITY_NOTE",
    "PUBLISHED_M_AT_64",
    "bits_per_packet",
    "expected_pulses_asymptotic",
    "expected_pulses_exact",
    "monte_carlo_occupancy",
    "pack_values",

    # Baselines
    "BASELINES",
    "CASES",
    "POWER_CONSTANTS",
    "PUBLISHED_CROSSOVERS",
    "BaselineSpec",
    "baseline_catalog",
    "competitor",
    "parse_case",

    # Goodput
    "butterfly_efficiency",
    "crossover",
    "crossover_table",
    "delivery_efficiency",
    "goodput_curve",
    "improvement_factor",
    "measured_efficiency",
    "pastnoc_goodput",
    "scale_control_period",
    "worst_case_efficiency",
]
