# reports/__init__.py
"""
PaST-NoC result artifacts.

Modules:
    artifacts: sorted CSV tables (pandas) and JSON manifests
    pdf: one-page fpdf summary of an analysis run
"""

__version__ = "0.1.0"
__author__ = "Cerevia Inc."
__license__ = "Proprietary"
__email__ = "research@cerevia.ai"

from .artifacts import read_rows, rows_frame, write_frame, write_json, write_rows
from .pdf import create_pdf_report

__all__ = [
    # Tables
    "read_rows",
    "rows_frame",
    "write_frame",
    "write_rows",

    # Manifests
    "write_json",

    # Reports
    "create_pdf_report",
]
