# cells/primitives.py
"""
Behavioral RSFQ cell models.

Each cell is stateful, owns a JJ count and a propagation delay (integer ps)
and reacts to one input pulse at a time through ``evaluate``. Port names:

    Splitter      in -> out1, out2
    Merger        in1, in2 -> out
    LastArrival   in1, in2 -> out
    Inhibit       in (input 1), inh (input 2) -> out
    NDRO          set, reset, clk -> out
    AndClocked    a, b, clk -> out
    TFF           in -> out1, out2
    DFF           d, clk -> out
    DFF2          d, clk1, clk2 -> out1, out2
    ShiftRegister in -> out
    JTL           in -> out
"""
import logging
import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from validators.errors import SchedulingInPast, UnknownPort

logger = logging.getLogger(__name__)

Emission = List[Tuple[str, int]]


class CellKind(str, Enum):
    SPLITTER = "Splitter"
    MERGER = "Merger"
    LAST_ARRIVAL = "LastArrival"
    INHIBIT = "Inhibit"
    NDRO = "NDRO"
    AND_CLOCKED = "AndClocked"
    TFF = "TFF"
    DFF = "DFF"
    DFF2 = "DFF2"
    SHIFT_REGISTER = "ShiftRegister"
    JTL = "JTL"


# -----------------------------
# LOOKUP TABLES
# -----------------------------
JJ_COUNTS: Dict[CellKind, int] = {
    CellKind.SPLITTER: 3,
    CellKind.MERGER: 5,
    CellKind.LAST_ARRIVAL: 6,
    CellKind.INHIBIT: 8,
    CellKind.NDRO: 7,
    CellKind.AND_CLOCKED: 11,
    CellKind.TFF: 10,
    CellKind.DFF: 4,
    CellKind.DFF2: 12,
}

JJ_PER_UNUSED_DFF2_OUTPUT = 2
JJ_PER_JTL_SEGMENT = 2

# Default propagation delays in ps. Calibrated so the router modules land on
# their characterised path delays; see router/netlist.py for the overrides.
DEFAULT_DELAYS_PS: Dict[CellKind, int] = {
    CellKind.SPLITTER: 4,
    CellKind.MERGER: 5,
    CellKind.LAST_ARRIVAL: 6,
    CellKind.INHIBIT: 5,
    CellKind.NDRO: 4,
    CellKind.AND_CLOCKED: 9,
    CellKind.TFF: 8,
    CellKind.DFF: 5,
    CellKind.DFF2: 6,
    CellKind.SHIFT_REGISTER: 0,
    CellKind.JTL: 3,
}


def jj_count_of(kind: CellKind, unused_outputs: int = 0, stages: int = 0, segments: int = 1) -> int:
    """
    JJ count of one cell.

    Args:
        kind: cell kind.
        unused_outputs: DFF2 outputs left unconnected (2 JJs saved each).
        stages: ShiftRegister stage count.
        segments: JTL segment count.

    Returns:
        int: number of Josephson junctions.
    """
    kind = CellKind(kind)
    if kind is CellKind.SHIFT_REGISTER:
        return 2 * stages + 2
    if kind is CellKind.JTL:
        return JJ_PER_JTL_SEGMENT * segments
    count = JJ_COUNTS[kind]
    if kind is CellKind.DFF2:
        count -= JJ_PER_UNUSED_DFF2_OUTPUT * unused_outputs
    return count


# -----------------------------
# BASE CELL
# -----------------------------
class Cell:
    kind: CellKind
    inputs: Tuple[str, ...] = ()
    outputs: Tuple[str, ...] = ()

    def __init__(self, name: str, delay: Optional[int] = None, module: str = "misc"):
        self.name = name
        self.delay = DEFAULT_DELAYS_PS[self.kind] if delay is None else int(delay)
        if self.delay < 0:
            raise ValueError(f"delay of {self.kind.value} '{name}' must be non-negative, got {delay}")
        self.module = module
        self.rng: Optional[np.random.Generator] = None
        self.reset()

    @property
    def jj_count(self) -> int:
        return jj_count_of(self.kind)

    def reset(self) -> None:
        self._last_t = -1

    def bind_rng(self, rng: np.random.Generator) -> None:
        self.rng = rng

    def evaluate(self, port: str, t: int) -> Emission:
        if port not in self.inputs:
            raise UnknownPort(f"{self.kind.value} '{self.name}'", port)
        if t < self._last_t:
            raise SchedulingInPast(t, self._last_t, f"{self.name}.{port}")
        self._last_t = t
        return self._on_pulse(port, t)

    def _on_pulse(self, port: str, t: int) -> Emission:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r}, delay={self.delay}, module={self.module!r})"


# -----------------------------
# STATELESS FAN CELLS
# -----------------------------
class Splitter(Cell):
    kind = CellKind.SPLITTER
    inputs = ("in",)
    outputs = ("out1", "out2")

    def _on_pulse(self, port: str, t: int) -> Emission:
        return [("out1", t + self.delay), ("out2", t + self.delay)]


class Merger(Cell):
    """Either input produces one output pulse; identical timestamps collapse into one."""

    kind = CellKind.MERGER
    inputs = ("in1", "in2")
    outputs = ("out",)

    def reset(self) -> None:
        super().reset()
        self._last_in = -1
        self.collisions = 0

    def _on_pulse(self, port: str, t: int) -> Emission:
        if t == self._last_in:
            self.collisions += 1
            logger.debug(f"merger collision on '{self.name}' at t={t} ps")
            return []
        self._last_in = t
        return [("out", t + self.delay)]


class JTL(Cell):
    """Josephson transmission line used as a fixed delay element."""

    kind = CellKind.JTL
    inputs = ("in",)
    outputs = ("out",)

    def __init__(self, name: str, segments: int = 1, delay: Optional[int] = None, module: str = "misc"):
        if segments < 1:
            raise ValueError(f"JTL '{name}' needs at least one segment, got {segments}")
        self.segments = segments
        super().__init__(name, delay, module)

    @property
    def jj_count(self) -> int:
        return jj_count_of(self.kind, segments=self.segments)

    def _on_pulse(self, port: str, t: int) -> Emission:
        return [("out", t + self.segments * self.delay)]


# -----------------------------
# STATEFUL LOGIC
# -----------------------------
class LastArrival(Cell):
    kind = CellKind.LAST_ARRIVAL
    inputs = ("in1", "in2")
    outputs = ("out",)

    def reset(self) -> None:
        super().reset()
        self.seen = {"in1": False, "in2": False}

    def _on_pulse(self, port: str, t: int) -> Emission:
        self.seen[port] = True
        if all(self.seen.values()):
            self.seen = {"in1": False, "in2": False}
            return [("out", t + self.delay)]
        return []


class Inhibit(Cell):
    """
    Input 1 propagates unless input 2 pulsed more recently than the previous input-1 pulse.

    Armed reading: an ``inh`` pulse arms the cell and the next ``in`` pulse is
    consumed, whenever it comes. ``inh`` at 5 ps followed by ``in`` at 10 ps is
    therefore suppressed; an ``in`` pulse before any ``inh`` passes.
    """

    kind = CellKind.INHIBIT
    inputs = ("in", "inh")
    outputs = ("out",)

    def reset(self) -> None:
        super().reset()
        self.armed = False

    def _on_pulse(self, port: str, t: int) -> Emission:
        if port == "inh":
            self.armed = True
            return []
        if self.armed:
            self.armed = False
            return []
        return [("out", t + self.delay)]


class NDRO(Cell):
    kind = CellKind.NDRO
    inputs = ("set", "reset", "clk")
    outputs = ("out",)

    def reset(self) -> None:
        super().reset()
        self.is_set = False

    def _on_pulse(self, port: str, t: int) -> Emission:
        if port == "set":
            self.is_set = True
        elif port == "reset":
            self.is_set = False
        elif self.is_set:
            return [("out", t + self.delay)]
        return []


class AndClocked(Cell):
    kind = CellKind.AND_CLOCKED
    inputs = ("a", "b", "clk")
    outputs = ("out",)

    def reset(self) -> None:
        super().reset()
        self.flags = {"a": False, "b": False}

    def _on_pulse(self, port: str, t: int) -> Emission:
        if port != "clk":
            self.flags[port] = True
            return []
        fire = self.flags["a"] and self.flags["b"]
        self.flags = {"a": False, "b": False}
        return [("out", t + self.delay)] if fire else []


class TFF(Cell):
    kind = CellKind.TFF
    inputs = ("in",)
    outputs = ("out1", "out2")

    def reset(self) -> None:
        super().reset()
        self.phase = 0

    def _on_pulse(self, port: str, t: int) -> Emission:
        out = "out1" if self.phase == 0 else "out2"
        self.phase ^= 1
        return [(out, t + self.delay)]


class DFF(Cell):
    kind = CellKind.DFF
    inputs = ("d", "clk")
    outputs = ("out",)

    def reset(self) -> None:
        super().reset()
        self.stored = False
        self.overwrites = 0

    def _store(self, t: int) -> None:
        if self.stored:
            self.overwrites += 1
            logger.debug(f"{self.kind.value} '{self.name}' overwritten before readout at t={t} ps")
        self.stored = True

    def _on_pulse(self, port: str, t: int) -> Emission:
        if port == "d":
            self._store(t)
            return []
        if self.stored:
            self.stored = False
            return [("out", t + self.delay)]
        return []


class DFF2(DFF):
    """DFF with two readout inputs, each with its own output."""

    kind = CellKind.DFF2
    inputs = ("d", "clk1", "clk2")
    outputs = ("out1", "out2")

    def __init__(self, name: str, delay: Optional[int] = None, module: str = "misc", unused_outputs: int = 0):
        if unused_outputs not in (0, 1, 2):
            raise ValueError(f"DFF2 '{name}' has two outputs; unused_outputs={unused_outputs}")
        self.unused_outputs = unused_outputs
        super().__init__(name, delay, module)

    @property
    def jj_count(self) -> int:
        return jj_count_of(self.kind, unused_outputs=self.unused_outputs)

    def _on_pulse(self, port: str, t: int) -> Emission:
        if port == "d":
            self._store(t)
            return []
        if not self.stored:
            return []
        self.stored = False
        return [("out1" if port == "clk1" else "out2", t + self.delay)]


# -----------------------------
# FLUX SHIFT REGISTER
# -----------------------------
class ShiftRegister(Cell):
    """
    Clocked delay line of ``stages`` flux stages.

    A pulse entering at ``t`` is captured on the next stage-clock edge
    (edges at ``phase + k*period``) and leaves ``stages*period + overhead``
    later. With ``jitter_ps > 0`` each traversal adds one seeded integer
    draw from ``[-jitter_ps, +jitter_ps]``. One flux quantum fits per stage,
    so two pulses captured on the same edge merge into one.
    """

    kind = CellKind.SHIFT_REGISTER
    inputs = ("in",)
    outputs = ("out",)

    def __init__(self, name: str, stages: int, period: int, phase: int = 0, overhead: int = 0,
                 jitter_ps: int = 0, module: str = "shift_register"):
        if stages < 1 or period < 1:
            raise ValueError(f"ShiftRegister '{name}' needs stages >= 1 and period >= 1, got {stages}, {period}")
        if jitter_ps < 0:
            raise ValueError(f"jitter_ps must be non-negative, got {jitter_ps}")
        self.stages = stages
        self.period = period
        self.phase = phase % period
        self.overhead = overhead
        self.jitter_ps = jitter_ps
        super().__init__(name, delay=overhead, module=module)

    @property
    def jj_count(self) -> int:
        return jj_count_of(self.kind, stages=self.stages)

    @property
    def latency(self) -> int:
        return self.stages * self.period + self.overhead

    def reset(self) -> None:
        super().reset()
        self.collisions = 0
        self._last_edge = None

    def next_edge(self, t: int) -> int:
        return self.phase + math.ceil((t - self.phase) / self.period) * self.period

    def _on_pulse(self, port: str, t: int) -> Emission:
        edge = self.next_edge(t)
        if edge == self._last_edge:
            self.collisions += 1
            return []
        self._last_edge = edge
        out = edge + self.latency
        if self.jitter_ps and self.rng is not None:
            out += int(self.rng.integers(-self.jitter_ps, self.jitter_ps + 1))
        return [("out", max(out, t + 1))]
