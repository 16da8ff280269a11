# runner/scenarios.py
"""
Named regression scenarios.

    fig9   pulse level: one 2x2 round-robin router, both inputs request
           output 1 in two consecutive epochs
    fig11  4x4 butterfly, inputs 1 and 3 both addressed to destination 2
           while input 2 sends to destination 4
    fig14  8x8 mesh, inputs 2 and 3 both addressed to destination 3,
           input 1 to destination 2

fig11 and fig14 run on the flit-level network, or in pulse mode on the
pulse-level network checked epoch by epoch against the flit level.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from engine.kernel import PulseEvent
from flitsim.network import FlitNetwork, FlitRecord
from packet.epoch import EpochConfig, Packet
from router.behavioral import Policy, RouterConfig, RouterState, route_epoch
from router.harness import RouterHarness
from topology import PulseNetwork, Topology, build_topology
from validators.errors import MismatchReport

logger = logging.getLogger(__name__)

FIG9_PACKETS = (Packet(1, frozenset({1, 5})), Packet(1, frozenset({2, 6})))
FIG11_TRAFFIC = ((1, 2), (3, 2), (2, 4))
FIG14_TRAFFIC = ((1, 2), (2, 3), (3, 3))
FLUSH_EPOCHS = 16
PULSE_DATA_PERIOD = 600
ARRIVAL_EVENTS = ("deliver", "misdeliver", "retire")


@dataclass
class ScenarioResult:
    name: str
    topology: str
    rows: List[Dict[str, Any]]
    packets: List[Dict[str, Any]] = field(default_factory=list)
    trace: List[PulseEvent] = field(default_factory=list)
    wires: List[str] = field(default_factory=list)


# -----------------------------
# PULSE LEVEL
# -----------------------------
def run_router_epochs(stimulus: Sequence[Tuple[Optional[Packet], Optional[Packet], bool]], policy="round_robin",
                      epoch_cfg: Optional[EpochConfig] = None, seed: int = 0, jitter_ps: int = 0,
                      name: str = "pulse") -> ScenarioResult:
    """
    Drive the router netlist epoch by epoch; every row also carries the
    behavioral model's outputs for the same epoch.
    """
    cfg = RouterConfig(Policy.parse(policy), 1, epoch_cfg or EpochConfig(num_destinations=2))
    harness = RouterHarness(cfg, seed=seed, jitter_ps=jitter_ps)
    wires = harness.probe_ports()
    outputs = harness.run(stimulus)
    state = RouterState()
    rows = []
    for k, ((a, b, rand_bit), (out_a, out_b)) in enumerate(zip(stimulus, outputs)):
        decision, exp_a, exp_b = route_epoch(cfg, state, a, b, rand_bit=rand_bit)
        rows.append({
            "epoch": k,
            "in_a": _lit(a),
            "in_b": _lit(b),
            "rand_bit": bool(rand_bit),
            "out_a": _lit(out_a),
            "out_b": _lit(out_b),
            "winner": _winner(a, b, out_a),
            "behavioral_out_a": _lit(exp_a),
            "behavioral_out_b": _lit(exp_b),
            "setting": decision.setting,
        })
    return ScenarioResult(name, "router2", rows, trace=list(harness.sim.trace), wires=wires)


def fig9(seed: int = 0, jitter_ps: int = 0) -> ScenarioResult:
    a, b = FIG9_PACKETS
    return run_router_epochs([(a, b, False), (a, b, False)], "round_robin", seed=seed, jitter_ps=jitter_ps,
                             name="fig9")


def _lit(pkt: Optional[Packet]) -> Optional[str]:
    return None if pkt is None else pkt.literal()


def _winner(a: Optional[Packet], b: Optional[Packet], out_a: Optional[Packet]) -> Optional[str]:
    if out_a is None:
        return None
    if a is not None and out_a == a:
        return "A"
    if b is not None and out_a == b:
        return "B"
    return None


# -----------------------------
# EPOCH LEVEL
# -----------------------------
def _drive_script(net: FlitNetwork, script: Dict[int, Sequence[Tuple[int, int]]],
                  name: str) -> Tuple[List[Dict[str, Any]], List[FlitRecord]]:
    flits: List[FlitRecord] = []
    rows: List[Dict[str, Any]] = []
    last = max(script) if script else 0
    for epoch in range(last + 1 + FLUSH_EPOCHS):
        for src, dst in script.get(epoch, ()):
            flits.append(net.offer(src, dst))
        rows.extend(net.step())
        if epoch >= last and not net.in_flight and not net.queued:
            break
    else:
        logger.warning(f"{name}: network still holds packets after {FLUSH_EPOCHS} flush epochs")
    return rows, flits


def _packet_rows(flits: Sequence[FlitRecord]) -> List[Dict[str, Any]]:
    return [{
        "flit": f.id, "src": f.src, "dst": f.dst, "inject_epoch": f.inject_epoch,
        "deliver_epoch": f.deliver_epoch, "hops": f.hops, "deflections": f.deflections,
        "reinjections": f.reinjections, "path": " ".join(f.path),
    } for f in flits]


def run_flit_script(topology: str, script: Dict[int, Sequence[Tuple[int, int]]], reinject: bool = True,
                    policy="round_robin", seed: int = 0, name: str = "script") -> ScenarioResult:
    """
    Offer the scripted (source, destination) pairs in their epochs, then step
    until the network drains.
    """
    topo = build_topology(topology, policy=policy)
    net = FlitNetwork(topo, seed=seed, reinject=reinject, record_paths=True)
    rows, flits = _drive_script(net, script, name)
    return ScenarioResult(name, topology, rows, packets=_packet_rows(flits))


# -----------------------------
# PULSE-LEVEL NETWORK
# -----------------------------
def payload_tag(flit_id: int, n_slots: int) -> frozenset:
    """Data slots spelling ``flit_id`` in binary, slot 1 holding the lowest bit."""
    if flit_id < 1 or flit_id >= 1 << n_slots:
        raise ValueError(f"flit id {flit_id} does not fit in {n_slots} data slots")
    return frozenset(i + 1 for i in range(n_slots) if (flit_id >> i) & 1)


def _cross_check(topology: Topology, pulse: PulseNetwork, injections: List[Dict[int, Packet]],
                 expected: List[Dict[int, Packet]], name: str) -> None:
    got = pulse.run(injections)
    mismatches = []
    for k, (want_k, got_k) in enumerate(zip(expected, got)):
        for ep in sorted(set(want_k) | set(got_k)):
            if want_k.get(ep) != got_k.get(ep):
                mismatches.append({"epoch": k, "endpoint": ep, "expected": _lit(want_k.get(ep)),
                                   "got": _lit(got_k.get(ep))})
    if mismatches:
        logger.error(f"{name}: {len(mismatches)} endpoint epochs differ between pulse and flit level")
        raise MismatchReport(mismatches, len(injections) * topology.n_endpoints)
    logger.info(f"{name}: pulse-level {topology.name} agrees with the flit-level network "
                f"over {len(injections)} epochs")


def _replay(rows: List[Dict[str, Any]], packets: Dict[int, Packet],
            epochs: int) -> Tuple[List[Dict[int, Packet]], List[Dict[int, Packet]]]:
    """Per-epoch injections and arrivals of a flit-level event log, as packets."""
    injections: List[Dict[int, Packet]] = [{} for _ in range(epochs)]
    arrivals: List[Dict[int, Packet]] = [{} for _ in range(epochs)]
    for row in rows:
        if row["event"] == "inject":
            injections[row["epoch"]][row["at"]] = packets[row["flit"]]
        elif row["event"] in ARRIVAL_EVENTS:
            arrivals[row["epoch"]][row["at"]] = packets[row["flit"]]
        row["packet"] = packets[row["flit"]].literal()
    return injections, arrivals


def run_pulse_script(topology: str, script: Dict[int, Sequence[Tuple[int, int]]], reinject: bool = True,
                     policy="round_robin", seed: int = 0, data_period: int = PULSE_DATA_PERIOD,
                     name: str = "script") -> ScenarioResult:
    """
    Play the script on the flit-level network, then push the same injections
    through the pulse-level network and compare every endpoint in every epoch.

    Each packet carries its flit id in its data slots, so a packet arriving
    at the wrong endpoint or in the wrong epoch is identified exactly. The
    flit-level run draws its random bits from the LFSR the pulse network uses.
    Re-injections enter the pulse network in the epochs the flit level
    re-injected them.

    Raises:
        MismatchReport: an endpoint decodes a different packet (or none) than
            the flit-level network delivered there.
        InvalidGeometry: the topology cannot be built at pulse level.
    """
    topo = build_topology(topology, policy=policy, data_period=data_period)
    pulse = PulseNetwork(topo, seed=seed)
    net = FlitNetwork(topo, seed=seed, reinject=reinject, rand_source="lfsr", record_paths=True)
    rows, flits = _drive_script(net, script, name)
    tagged = {f.id: Packet(f.dst, payload_tag(f.id, topo.epoch_cfg.n_data_slots)) for f in flits}
    injections, expected = _replay(rows, tagged, net.epoch)
    _cross_check(topo, pulse, injections, expected, name)
    return ScenarioResult(name, topology, rows, packets=_packet_rows(flits), trace=list(pulse.sim.trace),
                          wires=sorted(pulse.netlist.probes))


def run_network_epochs(topology: str, stimulus: Sequence[Dict[int, Packet]], policy="round_robin", seed: int = 0,
                       epoch_cfg: Optional[EpochConfig] = None, name: str = "pulse") -> ScenarioResult:
    """
    Send explicit packets from the endpoints of a pulse-level network, one
    mapping endpoint -> packet per epoch, and check the arrivals against the
    flit-level network. Misdelivered packets are retired.
    """
    kw = {}
    if epoch_cfg is not None:
        kw = dict(data_period=epoch_cfg.data_period, control_slot=epoch_cfg.control_slot,
                  data_spacing=epoch_cfg.data_spacing)
    topo = build_topology(topology, policy=policy, **kw)
    pulse = PulseNetwork(topo, seed=seed)
    net = FlitNetwork(topo, seed=seed, reinject=False, rand_source="lfsr", record_paths=True)
    packets: Dict[int, Packet] = {}
    flits: List[FlitRecord] = []
    rows: List[Dict[str, Any]] = []
    for epoch in range(len(stimulus) + FLUSH_EPOCHS):
        sending = stimulus[epoch] if epoch < len(stimulus) else {}
        for ep, pkt in sorted(sending.items()):
            pkt.validate(topo.epoch_cfg)
            flit = net.offer(ep, pkt.destination)
            packets[flit.id] = pkt
            flits.append(flit)
        rows.extend(net.step())
        if epoch >= len(stimulus) - 1 and not net.in_flight and not net.queued:
            break
    injections, expected = _replay(rows, packets, net.epoch)
    _cross_check(topo, pulse, injections, expected, name)
    return ScenarioResult(name, topology, rows, packets=_packet_rows(flits), trace=list(pulse.sim.trace),
                          wires=sorted(pulse.netlist.probes))


# -----------------------------
# FIGURES
# -----------------------------
def fig11(policy="round_robin", seed: int = 0, mode: str = "flit",
          data_period: int = PULSE_DATA_PERIOD) -> ScenarioResult:
    """Same three packets in epochs 0 and 1; misdelivered packets are retired."""
    script = {0: FIG11_TRAFFIC, 1: FIG11_TRAFFIC}
    if mode == "pulse":
        return run_pulse_script("butterfly4", script, reinject=False, policy=policy, seed=seed,
                                data_period=data_period, name="fig11")
    return run_flit_script("butterfly4", script, reinject=False, policy=policy, seed=seed, name="fig11")


def fig14(policy="round_robin", seed: int = 0, mode: str = "flit",
          data_period: int = PULSE_DATA_PERIOD) -> ScenarioResult:
    if mode == "pulse":
        return run_pulse_script("mesh8", {0: FIG14_TRAFFIC}, reinject=True, policy=policy, seed=seed,
                                data_period=data_period, name="fig14")
    return run_flit_script("mesh8", {0: FIG14_TRAFFIC}, reinject=True, policy=policy, seed=seed, name="fig14")


SCENARIOS: Dict[str, Callable[..., ScenarioResult]] = {"fig9": fig9, "fig11": fig11, "fig14": fig14}
PULSE_SCENARIOS = ("fig9", "fig11", "fig14")
