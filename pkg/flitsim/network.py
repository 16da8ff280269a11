# flitsim/network.py
"""
Epoch-synchronous deflection network.

Every router arbitrates once per epoch through ``route_epoch``. Links inside
a butterfly have no epoch delay, so a packet crosses a whole butterfly in the
epoch it was injected; retimed mesh links and loop-backs deliver one epoch
later. Routers never hold a packet: whatever enters a router this epoch
leaves it this epoch.
"""
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional

import numpy as np

from router.behavioral import BehavioralRouter, Policy
from router.lfsr import Lfsr
from topology.endpoints import EndpointQueue
from topology.model import PortRef, Topology

logger = logging.getLogger(__name__)

DEFAULT_RAND_Q = 0.25


@dataclass
class FlitRecord:
    id: int
    src: int
    dst: int
    inject_epoch: int
    deliver_epoch: Optional[int] = None
    first_sent_epoch: Optional[int] = None
    hops: int = 0
    leg_hops: int = 0
    deflections: int = 0
    reinjections: int = 0
    path: List[str] = field(default_factory=list)

    @property
    def destination(self) -> int:
        return self.dst

    @property
    def latency(self) -> Optional[int]:
        return None if self.deliver_epoch is None else self.deliver_epoch - self.inject_epoch


class FlitNetwork:
    """
    Args:
        topology: built topology.
        policy: overrides the topology's router policy when given.
        seed: seeds the random-bit source of randomized round robin.
        reinject: re-inject misdelivered packets (False retires them).
        rand_q: per-router per-epoch rand-bit probability ("rng" source).
        rand_source: "rng" (Bernoulli(rand_q)) or "lfsr" (one LFSR register,
            one bit position per router).
        record_paths: keep the routers (mesh: nodes) each packet visits.
    """

    def __init__(self, topology: Topology, policy=None, seed: int = 0, reinject: bool = True,
                 rand_q: float = DEFAULT_RAND_Q, rand_source: str = "rng", record_paths: bool = False):
        if rand_source not in ("rng", "lfsr"):
            raise ValueError(f"Invalid value for 'rand_source': '{rand_source}'. Must be one of ['lfsr', 'rng']")
        self.topology = topology
        self.policy = Policy.parse(policy) if policy is not None else topology.policy
        self.reinject = reinject
        self.rand_q = rand_q
        self.rand_source = rand_source
        self.record_paths = record_paths
        self.rng = np.random.default_rng(seed)
        self.lfsr = Lfsr(seed=seed % 255 + 1) if rand_source == "lfsr" else None
        self.elements = topology.order
        self.routers: Dict[str, BehavioralRouter] = {}
        for elem in self.elements:
            cfg = elem.cfg if elem.cfg.policy is self.policy else replace(elem.cfg, policy=self.policy)
            self.routers[elem.name] = BehavioralRouter(cfg)
        self.endpoints = {ep: EndpointQueue(ep) for ep in range(1, topology.n_endpoints + 1)}
        self.arrivals: Dict[int, Dict[PortRef, FlitRecord]] = defaultdict(dict)
        self.epoch = 0
        self._next_id = 1
        self.totals: Counter = Counter()
        self.reset_stats()

    # -----------------------------
    # STATISTICS WINDOW
    # -----------------------------
    def reset_stats(self) -> None:
        self.stats: Counter = Counter()
        self.hop_traversals: Counter = Counter()
        self.hop_deflections: Counter = Counter()
        self.per_source_delivered: Counter = Counter()
        self.latencies: List[int] = []
        self.window_epochs = 0

    # -----------------------------
    # TRAFFIC
    # -----------------------------
    def offer(self, src: int, dst: int) -> FlitRecord:
        """Queue a fresh packet at endpoint ``src``."""
        flit = FlitRecord(id=self._next_id, src=src, dst=dst, inject_epoch=self.epoch)
        self._next_id += 1
        self.endpoints[src].offer(flit)
        self.totals["created"] += 1
        self.stats["created"] += 1
        return flit

    def _rand_bits(self) -> Dict[str, bool]:
        if self.policy is not Policy.RANDOMIZED_RR:
            return {}
        if self.lfsr is not None:
            self.lfsr.step()
            reg = self.lfsr.register
            return {e.name: bool((reg >> e.rand_bit_position) & 1) for e in self.elements}
        draws = self.rng.random(len(self.elements)) < self.rand_q
        return {e.name: bool(bit) for e, bit in zip(self.elements, draws)}

    # -----------------------------
    # EPOCH STEP
    # -----------------------------
    def step(self, pattern=None) -> List[Dict[str, Any]]:
        """Advance one epoch; returns the event log of this epoch."""
        t = self.epoch
        events: List[Dict[str, Any]] = []
        if pattern is not None:
            for src, dst in pattern.generate():
                self.offer(src, dst)

        slots = self.arrivals.pop(t, {})
        for ep, queue in self.endpoints.items():
            flit = queue.next_packet()
            if flit is None:
                continue
            if flit.first_sent_epoch is None:
                flit.first_sent_epoch = t
            flit.leg_hops = 0
            slots[self.topology.injection[ep]] = flit
            events.append(_event(t, "inject", flit, ep))

        rand_bits = self._rand_bits()
        for elem in self.elements:
            a = slots.pop((elem.name, 0), None)
            b = slots.pop((elem.name, 1), None)
            decision, out_a, out_b = self.routers[elem.name].route(a, b, rand_bits.get(elem.name, False))
            loser = {"A": a, "B": b}.get(decision.deflected)
            for flit in (a, b):
                if flit is None:
                    continue
                if elem.entry:
                    flit.hops += 1
                    flit.leg_hops += 1
                    if self.record_paths:
                        flit.path.append(elem.name if elem.node is None else f"{elem.node[0]},{elem.node[1]}")
                self.hop_traversals[flit.leg_hops] += 1
                self.stats["traversals"] += 1
                if flit is loser:
                    flit.deflections += 1
                    self.hop_deflections[flit.leg_hops] += 1
                    self.stats["deflections"] += 1
                    events.append(_event(t, "deflect", flit, elem.name))
            for port, flit in ((0, out_a), (1, out_b)):
                if flit is None:
                    continue
                link = self.topology.links[(elem.name, port)]
                if link.kind == "endpoint":
                    self._arrive(flit, link.target, t, events)
                    continue
                target = (link.target, link.port)
                bucket = slots if link.delay == 0 else self.arrivals[t + link.delay]
                if target in bucket:
                    raise RuntimeError(f"two packets on router input {target} in epoch {t + link.delay}")
                bucket[target] = flit
        if slots:
            raise RuntimeError(f"packets left on unprocessed router inputs: {sorted(slots)}")

        self.stats["queue_depth"] += sum(len(q) for q in self.endpoints.values())
        self.window_epochs += 1
        self.epoch += 1
        return events

    def _arrive(self, flit: FlitRecord, endpoint: int, t: int, events: List[Dict[str, Any]]) -> None:
        if flit.dst == endpoint:
            flit.deliver_epoch = t
            self.totals["delivered"] += 1
            self.stats["delivered"] += 1
            self.per_source_delivered[flit.src] += 1
            self.latencies.append(flit.latency)
            events.append(_event(t, "deliver", flit, endpoint))
            return
        self.stats["misdelivered"] += 1
        if self.reinject:
            flit.reinjections += 1
            self.endpoints[endpoint].reinject(flit)
            events.append(_event(t, "misdeliver", flit, endpoint))
        else:
            self.totals["retired"] += 1
            self.stats["retired"] += 1
            events.append(_event(t, "retire", flit, endpoint))

    def run(self, epochs: int, pattern=None) -> None:
        for _ in range(epochs):
            self.step(pattern)

    # -----------------------------
    # BOOKKEEPING
    # -----------------------------
    @property
    def in_flight(self) -> int:
        return sum(len(bucket) for bucket in self.arrivals.values())

    @property
    def queued(self) -> int:
        return sum(len(q) for q in self.endpoints.values())

    def conservation(self) -> Dict[str, int]:
        """created == delivered + retired + in_flight + queued holds after every step."""
        return {
            "created": self.totals["created"],
            "delivered": self.totals["delivered"],
            "retired": self.totals["retired"],
            "in_flight": self.in_flight,
            "queued": self.queued,
        }

    def is_conserved(self) -> bool:
        c = self.conservation()
        return c["created"] == c["delivered"] + c["retired"] + c["in_flight"] + c["queued"]


def _event(epoch: int, kind: str, flit: FlitRecord, where: Any) -> Dict[str, Any]:
    return {"epoch": epoch, "event": kind, "flit": flit.id, "src": flit.src, "dst": flit.dst, "at": where}
