# cells/__init__.py
"""
RSFQ cell library.

Behavioral models of the superconducting primitives used by the router:
splitters, mergers, last-arrival, inhibit, NDRO, clocked AND, TFF, DFF,
DFF2, the flux shift register and JTL delay lines, each with a JJ count and
an integer-ps propagation delay.

Modules:
    primitives: cell classes, JJ table, default delays
    library: cell factory and JSON manifest for the area model
"""

__version__ = "0.1.0"
__author__ = "Cerevia Inc."
__license__ = "Proprietary"
__email__ = "research@cerevia.ai"

from .library import cell_library_manifest, make_cell, write_library_manifest
from .primitives import (
    DEFAULT_DELAYS_PS,
    DFF,
    DFF2,
    JJ_COUNTS,
    JTL,
    NDRO,
    TFF,
    AndClocked,
    Cell,
    CellKind,
    Inhibit,
    LastArrival,
    Merger,
    ShiftRegister,
    Splitter,
    jj_count_of,
)

__all__ = [
    # Kinds and tables
    "CellKind",
    "JJ_COUNTS",
    "DEFAULT_DELAYS_PS",
    "jj_count_of",

    # Cells
    "Cell",
    "Splitter",
    "Merger",
    "LastArrival",
    "Inhibit",
    "NDRO",
    "AndClocked",
    "TFF",
    "DFF",
    "DFF2",
    "ShiftRegister",
    "JTL",

    # Library
    "make_cell",
    "cell_library_manifest",
    "write_library_manifest",
]
