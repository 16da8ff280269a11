# engine/kernel.py
"""
Discrete-event kernel for picosecond pulse simulation.

Time is integer picoseconds. Events are ordered by ``(time, wire)`` so that
same-timestamp pulses on different wires are always processed in wire-name
order, which makes every run with the same netlist, stimulus and seed
reproduce the same trace.
"""
import heapq
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Protocol, Set, Tuple, Union

import numpy as np

from validators.errors import FanoutError, SchedulingInPast, UnknownPort

logger = logging.getLogger(__name__)

SimTime = int
Endpoint = Union[str, Tuple[str, str]]


@dataclass(frozen=True, order=True)
class PulseEvent:
    time: SimTime
    wire: str


class CellLike(Protocol):
    name: str
    inputs: Tuple[str, ...]
    outputs: Tuple[str, ...]
    jj_count: int
    module: str

    def evaluate(self, port: str, t: SimTime) -> List[Tuple[str, SimTime]]: ...

    def reset(self) -> None: ...

    def bind_rng(self, rng: np.random.Generator) -> None: ...


# -----------------------------
# NETLIST
# -----------------------------
@dataclass
class Netlist:
    """
    Cells plus point-to-point wires.

    A wire has exactly one driver (a cell output or a primary input) and one
    sink (a cell input or a primary output). Fanout has to be built from
    splitter cells, so a second connection from the same driver raises
    ``FanoutError``.
    """

    name: str = "netlist"
    cells: Dict[str, Any] = field(default_factory=dict)
    inputs: List[str] = field(default_factory=list)
    outputs: List[str] = field(default_factory=list)
    probes: Set[str] = field(default_factory=set)
    meta: Dict[str, Any] = field(default_factory=dict)
    # wire name -> (driver, sink)
    wires: Dict[str, Tuple[Endpoint, Endpoint]] = field(default_factory=dict)
    # label -> (module, jj) for circuitry counted but not simulated
    charges: Dict[str, Tuple[str, int]] = field(default_factory=dict)
    _driven: Dict[Endpoint, str] = field(default_factory=dict, repr=False)
    _sunk: Dict[Endpoint, str] = field(default_factory=dict, repr=False)

    def add_cell(self, cell: CellLike) -> CellLike:
        if cell.name in self.cells:
            raise FanoutError(f"Duplicate cell name '{cell.name}' in {self.name}")
        self.cells[cell.name] = cell
        return cell

    def add_input(self, name: str) -> str:
        if name not in self.inputs:
            self.inputs.append(name)
        return name

    def add_output(self, name: str) -> str:
        if name not in self.outputs:
            self.outputs.append(name)
        return name

    def connect(self, src: Endpoint, dst: Endpoint, wire: Optional[str] = None) -> str:
        """Wire a cell output or primary input to a cell input or primary output."""
        self._check_endpoint(src, driver=True)
        self._check_endpoint(dst, driver=False)
        if src in self._driven:
            raise FanoutError(f"{_label(src)} already drives wire '{self._driven[src]}'; use a splitter")
        if dst in self._sunk:
            raise FanoutError(f"{_label(dst)} is already driven by wire '{self._sunk[dst]}'; use a merger")
        if wire is None:
            wire = dst if isinstance(dst, str) else _label(src)
        if wire in self.wires:
            raise FanoutError(f"Wire '{wire}' already exists in {self.name}")
        self.wires[wire] = (src, dst)
        self._driven[src] = wire
        self._sunk[dst] = wire
        return wire

    def probe(self, *wires: str) -> None:
        for w in wires:
            if w not in self.wires:
                raise UnknownPort(self.name, w)
            self.probes.add(w)

    def probe_all(self) -> None:
        self.probes.update(self.wires)

    def wire_from(self, src: Endpoint) -> Optional[str]:
        return self._driven.get(src)

    def sink_of(self, wire: str) -> Endpoint:
        return self.wires[wire][1]

    def charge(self, label: str, module: str, jj: int) -> None:
        """Count ``jj`` junctions under ``module`` for circuitry the simulator does not model."""
        if jj < 0:
            raise ValueError(f"Charge '{label}' in {self.name} must be non-negative, got {jj}")
        if label in self.charges:
            raise FanoutError(f"Duplicate charge '{label}' in {self.name}")
        self.charges[label] = (module, jj)

    def jj_report(self) -> Dict[str, int]:
        """JJ totals per module tag plus ``total``; explicit charges are included."""
        report: Dict[str, int] = defaultdict(int)
        for cell in self.cells.values():
            report[cell.module] += cell.jj_count
        for module, jj in self.charges.values():
            report[module] += jj
        out = dict(sorted(report.items()))
        out["total"] = sum(report.values())
        return out

    def embed(self, sub: "Netlist", prefix: str) -> Tuple[Dict[str, Endpoint], Dict[str, Endpoint]]:
        """
        Copy ``sub`` into this netlist under ``prefix/``.

        Cells, internal wires, probes and charges are renamed. The sub-netlist's
        primary ports are not copied: the caller wires them up using the returned
        maps, which give the sink endpoint behind each sub input and the driver
        endpoint behind each sub output. ``sub`` must not be simulated afterwards.
        """

        def rename(ep: Endpoint) -> Endpoint:
            return ep if isinstance(ep, str) else (f"{prefix}/{ep[0]}", ep[1])

        for name in list(sub.cells):
            cell = sub.cells[name]
            cell.name = f"{prefix}/{name}"
            self.add_cell(cell)
        input_sinks: Dict[str, Endpoint] = {}
        output_drivers: Dict[str, Endpoint] = {}
        for wire, (src, dst) in sub.wires.items():
            if isinstance(src, str):
                input_sinks[src] = rename(dst)
            elif isinstance(dst, str):
                output_drivers[dst] = rename(src)
            else:
                self.connect(rename(src), rename(dst), wire=f"{prefix}/{wire}")
        self.probes.update(f"{prefix}/{w}" for w in sub.probes if f"{prefix}/{w}" in self.wires)
        for label, (module, jj) in sub.charges.items():
            self.charge(f"{prefix}/{label}", module, jj)
        return input_sinks, output_drivers

    def _check_endpoint(self, ep: Endpoint, driver: bool) -> None:
        if isinstance(ep, str):
            pool = self.inputs if driver else self.outputs
            if ep not in pool:
                kind = "primary input" if driver else "primary output"
                raise UnknownPort(f"{self.name} ({kind})", ep)
            return
        cell_name, port = ep
        cell = self.cells.get(cell_name)
        if cell is None:
            raise UnknownPort(self.name, cell_name)
        ports = cell.outputs if driver else cell.inputs
        if port not in ports:
            raise UnknownPort(f"cell '{cell_name}'", port)


def _label(ep: Endpoint) -> str:
    return ep if isinstance(ep, str) else f"{ep[0]}.{ep[1]}"


# -----------------------------
# SIMULATOR
# -----------------------------
class Simulator:
    """
    Single-threaded event loop over a ``Netlist``.

    Args:
        netlist: finalized netlist; its cells are reset on construction.
        seed: seeds one numpy Generator per cell (cells sorted by name).
    """

    def __init__(self, netlist: Netlist, seed: int = 0):
        self.netlist = netlist
        self.seed = seed
        self.reset()

    def reset(self) -> None:
        self.now: SimTime = 0
        self._queue: List[Tuple[SimTime, str]] = []
        self._pending: Set[Tuple[SimTime, str]] = set()
        self.trace: List[PulseEvent] = []
        self.received: Dict[str, List[SimTime]] = {name: [] for name in self.netlist.outputs}
        self.processed = 0
        self.coalesced = 0
        self.dropped = 0
        for idx, name in enumerate(sorted(self.netlist.cells)):
            cell = self.netlist.cells[name]
            cell.reset()
            cell.bind_rng(np.random.default_rng([self.seed, idx]))

    def schedule(self, event: PulseEvent) -> None:
        if event.time < self.now:
            raise SchedulingInPast(event.time, self.now, event.wire)
        if event.wire not in self.netlist.wires:
            raise UnknownPort(self.netlist.name, event.wire)
        key = (event.time, event.wire)
        if key in self._pending:
            self.coalesced += 1
            return
        self._pending.add(key)
        heapq.heappush(self._queue, key)

    def schedule_many(self, events: Iterable[PulseEvent]) -> None:
        for ev in events:
            self.schedule(ev)

    def inject(self, input_name: str, t: SimTime) -> None:
        """Schedule a pulse on the wire driven by a primary input."""
        wire = self.netlist.wire_from(input_name)
        if wire is None:
            raise UnknownPort(f"{self.netlist.name} (unconnected input)", input_name)
        self.schedule(PulseEvent(t, wire))

    def run_until(self, t: SimTime) -> List[PulseEvent]:
        """Process every event with time <= t; return the probed pulses of this call in (time, wire) order."""
        window: List[PulseEvent] = []
        while self._queue and self._queue[0][0] <= t:
            time, wire = heapq.heappop(self._queue)
            self._pending.discard((time, wire))
            self.now = time
            self.processed += 1
            if wire in self.netlist.probes:
                window.append(PulseEvent(time, wire))
            self._deliver(time, wire)
        self.now = max(self.now, t)
        window.sort()
        self.trace.extend(window)
        return window

    def _deliver(self, time: SimTime, wire: str) -> None:
        sink = self.netlist.sink_of(wire)
        if isinstance(sink, str):
            self.received[sink].append(time)
            return
        cell_name, port = sink
        cell = self.netlist.cells[cell_name]
        for out_port, t_out in cell.evaluate(port, time):
            if t_out < time:
                raise SchedulingInPast(t_out, time, f"{cell_name}.{out_port}")
            out_wire = self.netlist.wire_from((cell_name, out_port))
            if out_wire is None:
                self.dropped += 1
                continue
            self.schedule(PulseEvent(t_out, out_wire))
