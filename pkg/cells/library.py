# cells/library.py
import json
from pathlib import Path
from typing import Any, Dict, List, Type, Union

from cells.primitives import (
    DEFAULT_DELAYS_PS,
    DFF,
    DFF2,
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
from validators.config_input import validate_in_set

CELL_CLASSES: Dict[CellKind, Type[Cell]] = {
    CellKind.SPLITTER: Splitter,
    CellKind.MERGER: Merger,
    CellKind.LAST_ARRIVAL: LastArrival,
    CellKind.INHIBIT: Inhibit,
    CellKind.NDRO: NDRO,
    CellKind.AND_CLOCKED: AndClocked,
    CellKind.TFF: TFF,
    CellKind.DFF: DFF,
    CellKind.DFF2: DFF2,
    CellKind.SHIFT_REGISTER: ShiftRegister,
    CellKind.JTL: JTL,
}

# Manifest rows for parameterised cells are given at their reference size.
_REFERENCE_OPTIONS: Dict[CellKind, Dict[str, int]] = {
    CellKind.SHIFT_REGISTER: {"stages": 10},
    CellKind.JTL: {"segments": 1},
}


def make_cell(kind: Union[str, CellKind], name: str, **options: Any) -> Cell:
    """Instantiate a cell by kind name, e.g. ``make_cell("NDRO", "x")``."""
    kind_name = kind.value if isinstance(kind, CellKind) else kind
    validate_in_set(kind_name, "kind", {k.value for k in CellKind}, "cell library")
    return CELL_CLASSES[CellKind(kind_name)](name, **options)


def cell_library_manifest() -> List[Dict[str, Any]]:
    rows = []
    for kind in CellKind:
        opts = _REFERENCE_OPTIONS.get(kind, {})
        row: Dict[str, Any] = {
            "name": kind.value,
            "jj_count": jj_count_of(kind, **opts),
            "default_delay_ps": DEFAULT_DELAYS_PS[kind],
        }
        if opts:
            row["reference"] = opts
        rows.append(row)
    return rows


def write_library_manifest(path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(json.dumps({"cells": cell_library_manifest()}, indent=2, sort_keys=True) + "\n")
    return path
