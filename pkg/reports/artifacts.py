# reports/artifacts.py
"""
Result artifacts: CSV tables through pandas and JSON manifests.

Rows are sorted and columns fixed so identical runs write identical bytes.
"""
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

PathLike = Union[str, Path]


def _plain(value: Any) -> Any:
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats as strings."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_plain(v) for v in items]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "value") and type(value).__module__ != "builtins" and isinstance(value.value, str):
        return value.value
    return value


def write_json(data: Any, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(data), indent=2, sort_keys=True) + "\n")
    return path


def rows_frame(rows: Iterable[Dict[str, Any]], columns: Optional[Sequence[str]] = None,
               sort_by: Optional[Sequence[str]] = None) -> pd.DataFrame:
    rows = list(rows)
    if columns is None:
        columns = []
        for row in rows:
            columns.extend(k for k in row if k not in columns)
    frame = pd.DataFrame(rows, columns=list(columns))
    if sort_by and not frame.empty:
        frame = frame.sort_values(list(sort_by), kind="mergesort").reset_index(drop=True)
    return frame


def write_rows(rows: Iterable[Dict[str, Any]], path: PathLike, columns: Optional[Sequence[str]] = None,
               sort_by: Optional[Sequence[str]] = None) -> Path:
    return write_frame(rows_frame(rows, columns, sort_by), path)


def write_frame(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def read_rows(path: PathLike) -> List[Dict[str, str]]:
    """Rows of a CSV written by ``write_rows``, every cell kept as its text."""
    path = Path(path)
    if not path.exists() or path.stat().st_size == 0:
        return []
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    return frame.to_dict(orient="records")
