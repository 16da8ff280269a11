"""
PaST-NoC Input Validators

Reusable checks for epoch geometry, router settings, traffic patterns and
experiment configs, plus the domain error hierarchy.

All errors derive from `PastNocError`, itself a `ValueError`, so callers
can keep guarding with `except ValueError`.

Modules:
    - errors: PastNocError and every domain error
    - config_input: field, type, range and choice validators
"""

from .config_input import (
    validate_epoch_input,
    validate_in_set,
    validate_range,
    validate_required_fields,
    validate_router_input,
    validate_traffic_input,
    validate_type,
)
from .errors import ConfigError, PastNocError

# Define public API
__all__ = [
    "ConfigError",
    "PastNocError",
    "validate_epoch_input",
    "validate_in_set",
    "validate_range",
    "validate_required_fields",
    "validate_router_input",
    "validate_traffic_input",
    "validate_type",
]

# Package metadata
__version__ = "0.1.0"
__author__ = "Cerevia Inc."
__license__ = "Proprietary"
__email__ = "research@cerevia.ai"
