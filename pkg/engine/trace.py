# engine/trace.py
"""Trace export: VCD (one-bit toggle per pulse) and flat CSV."""
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Set, Union

import pandas as pd
from vcd import VCDWriter

from engine.kernel import PulseEvent

# fixed header date keeps repeated exports byte-identical
VCD_DATE = "pastnoc trace"


def trace_to_frame(trace: Iterable[PulseEvent]) -> pd.DataFrame:
    rows = sorted(trace)
    return pd.DataFrame(
        {"time_ps": [ev.time for ev in rows], "wire": [ev.wire for ev in rows]},
        columns=["time_ps", "wire"],
    )


def write_csv(trace: Iterable[PulseEvent], path: Union[str, Path]) -> Path:
    path = Path(path)
    trace_to_frame(trace).to_csv(path, index=False)
    return path


def write_vcd(trace: Iterable[PulseEvent], path: Union[str, Path], wires: Optional[List[str]] = None,
              scope: str = "pastnoc") -> Path:
    """
    Write a VCD where each pulse flips its wire's 1-bit variable.

    Args:
        trace: pulses to export (any order).
        path: destination file.
        wires: variables to declare; defaults to every wire seen in the trace.
        scope: VCD scope name.
    """
    path = Path(path)
    events = sorted(trace)
    names = sorted(set(wires) if wires is not None else {ev.wire for ev in events})
    with open(path, "w") as fh:
        with VCDWriter(fh, timescale="1 ps", date=VCD_DATE, version="pastnoc") as writer:
            variables = {w: writer.register_var(scope, name, "wire", size=1, init=0)
                         for w, name in vcd_names(names).items()}
            level: Dict[str, int] = {w: 0 for w in names}
            for ev in events:
                if ev.wire not in variables:
                    continue
                level[ev.wire] ^= 1
                writer.change(variables[ev.wire], ev.time, level[ev.wire])
    return path


def _vcd_name(wire: str) -> str:
    return wire.replace(".", "_").replace(" ", "_")


def vcd_names(wires: Iterable[str]) -> Dict[str, str]:
    """
    VCD variable name per wire, in sorted wire order. A sanitized name that
    is already taken gets the first free suffix ``_1``, ``_2``, ...
    """
    used: Set[str] = set()
    names: Dict[str, str] = {}
    for wire in sorted(wires):
        base = name = _vcd_name(wire)
        n = 0
        while name in used:
            n += 1
            name = f"{base}_{n}"
        used.add(name)
        names[wire] = name
    return names
