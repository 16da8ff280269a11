# ui/__init__.py
"""
PaST-NoC command-line text.

Modules:
    templates: summaries for run, sweep, analyze and validate
"""

__version__ = "0.1.0"
__author__ = "Cerevia Inc."
__license__ = "Proprietary"
__email__ = "research@cerevia.ai"

from .templates import format_crossovers, format_error, format_run_summary, format_validation

__all__ = [
    "format_crossovers",
    "format_error",
    "format_run_summary",
    "format_validation",
]
