# topology/pulsenet.py
"""
Pulse-level network: every element's router netlist composed into one netlist.

A router in column ``c`` runs its epoch ``c * pd_b`` ps after the endpoints'
epoch start, where ``pd_b`` is the router's input-B delay. Outputs leaving
through input A arrive 1 ps ahead of that grid; the input shift registers of
the next router capture them on the same clock edge.

Links with an epoch delay (mesh links, loop-backs) pass through a retimer
shift register clocked on the sending column's output grid; its latency
lands every pulse on the receiving router's grid one epoch later.
"""
import logging
from collections import defaultdict
from typing import Dict, List, Mapping, Optional, Sequence

from cells.primitives import ShiftRegister
from engine.kernel import Endpoint, Netlist, Simulator
from packet.epoch import Packet, decode_packet, encode_packet
from router.behavioral import Policy
from router.lfsr import Lfsr
from router.netlist import build_router_netlist, control_schedule, input_b_delay, propagation_delay
from topology.model import Topology
from validators.errors import InvalidGeometry

logger = logging.getLogger(__name__)

PULSE_MAX_ENDPOINTS = 8
PORT_IN = ("a_in", "b_in")
PORT_OUT = ("out_a", "out_b")

EpochInjections = Mapping[int, Packet]


def retimer_budget(epoch: int, delay: int, column: int, target_column: int, pd_b: int) -> int:
    """Retimer latency (ps) from a column-``column`` output to a column-``target_column`` input ``delay`` epochs on."""
    return delay * epoch + target_column * pd_b - (column + 1) * pd_b


def check_pulse_geometry(topology: Topology) -> None:
    """
    Geometry checks of ``PulseNetwork`` that need no netlist.

    Raises:
        InvalidGeometry: too many endpoints, an epoch off the register grid,
            control slot centres that early or retimed pulses would move to
            another register edge, an injection past the first column, a
            router schedule that does not fit, or a retimer shorter than one
            register stage.
    """
    ecfg = topology.epoch_cfg
    sp = ecfg.data_spacing
    if topology.n_endpoints > PULSE_MAX_ENDPOINTS:
        raise InvalidGeometry(f"pulse-level networks are limited to {PULSE_MAX_ENDPOINTS} endpoints, "
                              f"got {topology.name} ({topology.n_endpoints})")
    if ecfg.epoch % sp:
        raise InvalidGeometry(f"epoch {ecfg.epoch} ps must be a whole number of {sp} ps register stages")
    columns = max(e.column for e in topology.order)
    retimed = any(link.delay for link in topology.links.values())
    for s in range(1, ecfg.num_destinations + 1):
        r = ecfg.control_offset(s) % sp
        if (retimed and r) or 0 < r <= columns + 1:
            raise InvalidGeometry(
                f"control slot {s} centre ({ecfg.control_offset(s)} ps) must sit on the {sp} ps register grid; "
                f"use a control_slot that is an even multiple of data_spacing"
            )
    for ep, (name, _port) in sorted(topology.injection.items()):
        if topology.elements[name].column:
            raise InvalidGeometry(f"endpoint {ep} injects into column {topology.elements[name].column}")
    pd_b = input_b_delay(topology.order[0].cfg)
    for elem in topology.order:
        control_schedule(elem.cfg)
    for (name, port), link in sorted(topology.links.items()):
        if link.kind != "element" or not link.delay:
            continue
        budget = retimer_budget(ecfg.epoch, link.delay, topology.elements[name].column,
                                topology.elements[link.target].column, pd_b)
        if budget < sp:
            raise InvalidGeometry(f"link {name}.{PORT_OUT[port]} -> {link.target} leaves {budget} ps for its "
                                  f"retimer; lengthen the data period")


class PulseNetwork:
    """
    Args:
        topology: built topology of at most ``PULSE_MAX_ENDPOINTS`` endpoints.
        seed: seeds the LFSR of randomized round robin the same way
            ``FlitNetwork(rand_source="lfsr")`` does.

    Raises:
        InvalidGeometry: see ``check_pulse_geometry``.
    """

    def __init__(self, topology: Topology, seed: int = 0):
        ecfg = topology.epoch_cfg
        sp = ecfg.data_spacing
        check_pulse_geometry(topology)
        self.topology = topology
        self.seed = seed
        self.ecfg = ecfg
        first = topology.order[0].cfg
        self.pd_a = propagation_delay(first)
        self.pd_b = input_b_delay(first)

        self.netlist = Netlist(name=topology.name)
        self.offsets: Dict[str, int] = {}
        self.schedules: Dict[str, Dict[str, List[int]]] = {}
        self.jj_routers: Dict[str, Dict[str, int]] = {}
        inputs: Dict[str, Dict[str, Endpoint]] = {}
        outputs: Dict[str, Dict[str, Endpoint]] = {}
        for elem in topology.order:
            offset = elem.column * self.pd_b
            sub, jj = build_router_netlist(elem.cfg, name=elem.name, time_offset=offset % sp)
            self.offsets[elem.name] = offset
            self.schedules[elem.name] = sub.meta["schedule"]
            self.jj_routers[elem.name] = jj
            sinks, drivers = self.netlist.embed(sub, elem.name)
            inputs[elem.name], outputs[elem.name] = sinks, drivers
            for pin, sink in sinks.items():
                if pin in PORT_IN:
                    continue
                top = self.netlist.add_input(f"{elem.name}/{pin}")
                self.netlist.connect(top, sink, wire=top)

        for ep, (name, port) in sorted(topology.injection.items()):
            pin = self.netlist.add_input(f"ep{ep}")
            self.netlist.connect(pin, inputs[name][PORT_IN[port]], wire=pin)

        self.exits: Dict[int, int] = {}
        self.retimers: List[str] = []
        for (name, port), link in sorted(topology.links.items()):
            driver = outputs[name][PORT_OUT[port]]
            wire = f"{name}/{PORT_OUT[port]}"
            if link.kind == "endpoint":
                out = self.netlist.add_output(f"ep{link.target}_out")
                self.netlist.connect(driver, out, wire=out)
                self.exits[link.target] = topology.elements[name].column
                continue
            sink = inputs[link.target][PORT_IN[link.port]]
            if link.delay == 0:
                self.netlist.connect(driver, sink, wire=wire)
                continue
            retimer = self._retimer(name, port, link.target, link.delay)
            self.netlist.connect(driver, (retimer.name, "in"), wire=wire)
            self.netlist.connect((retimer.name, "out"), sink, wire=f"{retimer.name}/out")

        self.netlist.probe(*(w for w in self.netlist.wires if w.startswith("ep")))
        self.netlist.meta.update({"pd_a": self.pd_a, "pd_b": self.pd_b, "offsets": dict(self.offsets)})
        self.sim = Simulator(self.netlist, seed=seed)
        self.lfsr: Optional[Lfsr] = None
        logger.debug(f"pulse network {topology.name}: {len(self.netlist.cells)} cells, "
                     f"{len(self.retimers)} retimers, {self.jj_report()['total']} JJ")

    def _retimer(self, name: str, port: int, target: str, delay: int) -> ShiftRegister:
        sp = self.ecfg.data_spacing
        column = self.topology.elements[name].column
        budget = retimer_budget(self.ecfg.epoch, delay, column, self.topology.elements[target].column, self.pd_b)
        retimer = ShiftRegister(f"retimer/{name}.{PORT_OUT[port]}", stages=budget // sp, period=sp,
                                phase=((column + 1) * self.pd_b) % sp, overhead=budget % sp, module="retimer")
        self.netlist.add_cell(retimer)
        self.retimers.append(retimer.name)
        return retimer

    def jj_report(self) -> Dict[str, int]:
        return self.netlist.jj_report()

    @property
    def epoch_ps(self) -> int:
        return self.ecfg.epoch

    def _rand_bits(self) -> Dict[str, bool]:
        if self.topology.policy is not Policy.RANDOMIZED_RR:
            return {}
        self.lfsr.step()
        reg = self.lfsr.register
        return {e.name: bool((reg >> e.rand_bit_position) & 1) for e in self.topology.order}

    # -----------------------------
    # SIMULATION
    # -----------------------------
    def run(self, injections: Sequence[EpochInjections]) -> List[Dict[int, Packet]]:
        """
        Simulate consecutive epochs from a fresh start.

        Args:
            injections: per epoch, the packet each endpoint sends.

        Returns:
            Per epoch, the packet decoded at every endpoint that received one.

        Raises:
            PastNocError subclasses when an endpoint's pulses do not decode.
        """
        self.sim.reset()
        self.lfsr = Lfsr(seed=self.seed % 255 + 1) if self.topology.policy is Policy.RANDOMIZED_RR else None
        epoch = self.epoch_ps
        for k, packets in enumerate(injections):
            start = k * epoch
            for ep, pkt in sorted(packets.items()):
                for t in encode_packet(self.ecfg, pkt, epoch_start=start):
                    self.sim.inject(f"ep{ep}", t)
            rand_bits = self._rand_bits()
            for elem in self.topology.order:
                base = start + self.offsets[elem.name]
                for pin, times in self.schedules[elem.name].items():
                    if pin == "rnd" and not rand_bits.get(elem.name, False):
                        continue
                    for t in times:
                        self.sim.inject(f"{elem.name}/{pin}", base + t)
        n = len(injections)
        self.sim.run_until((n + 1) * epoch + max(self.offsets.values()) + self.pd_b)
        return self.decode_outputs(n)

    def decode_outputs(self, n: int) -> List[Dict[int, Packet]]:
        epoch = self.epoch_ps
        decoded: List[Dict[int, Packet]] = [{} for _ in range(n)]
        stray = set()
        for ep, column in sorted(self.exits.items()):
            base = column * self.pd_b + self.pd_a
            bins: Dict[int, List[int]] = defaultdict(list)
            for t in self.sim.received[f"ep{ep}_out"]:
                bins[(t - base) // epoch].append(t)
            for k, pulses in sorted(bins.items()):
                if not 0 <= k < n:
                    stray.add(k)
                    continue
                decoded[k][ep] = decode_packet(self.ecfg, pulses, epoch_start=k * epoch + base, tolerance_ps=1)
        if stray:
            logger.warning(f"endpoint pulses outside the simulated epochs: {sorted(stray)}")
        return decoded
