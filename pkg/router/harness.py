# router/harness.py
"""
Epoch driver around the pulse-level router netlist.

Injects packets and the per-epoch timing pulses, runs the event kernel and
decodes what leaves ``out_a`` / ``out_b`` back into packets.
"""
import logging
from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Tuple

from engine.kernel import Simulator
from packet.epoch import Packet, decode_packet, encode_packet
from router.behavioral import RouterConfig
from router.netlist import build_router_netlist

logger = logging.getLogger(__name__)

EpochStimulus = Tuple[Optional[Packet], Optional[Packet], bool]


class RouterHarness:
    """
    Args:
        cfg: router configuration.
        seed: kernel seed; only matters when ``jitter_ps > 0``.
        jitter_ps: per-traversal shift-register jitter bound.
    """

    def __init__(self, cfg: RouterConfig, seed: int = 0, jitter_ps: int = 0):
        self.cfg = cfg
        self.jitter_ps = jitter_ps
        self.netlist, self.jj = build_router_netlist(cfg, jitter_ps=jitter_ps)
        self.schedule = self.netlist.meta["schedule"]
        self.pd_a = self.netlist.meta["pd_a"]
        self.sim = Simulator(self.netlist, seed=seed)
        self.epochs_run = 0

    @property
    def epoch_ps(self) -> int:
        return self.cfg.epoch_cfg.epoch

    def preset_phase(self, phase: int) -> None:
        """Force the round-robin TFF into ``phase`` before the first epoch."""
        tff = self.netlist.cells.get("cd_tff")
        if tff is not None:
            tff.phase = int(phase) & 1

    @property
    def phase(self) -> Optional[int]:
        tff = self.netlist.cells.get("cd_tff")
        return None if tff is None else tff.phase

    def probe_ports(self) -> List[str]:
        """Record every wire attached to a primary input or output; returns the wire names."""
        wires = sorted(w for w, (src, dst) in self.netlist.wires.items()
                       if isinstance(src, str) or isinstance(dst, str))
        self.netlist.probe(*wires)
        return wires

    def inject_epoch(self, k: int, a: Optional[Packet], b: Optional[Packet], rand_bit: bool = False) -> None:
        ecfg = self.cfg.epoch_cfg
        start = k * self.epoch_ps
        for pin, pkt in (("a_in", a), ("b_in", b)):
            if pkt is not None:
                for t in encode_packet(ecfg, pkt, epoch_start=start):
                    self.sim.inject(pin, t)
        for pin, times in self.schedule.items():
            if pin == "rnd" and not rand_bit:
                continue
            for t in times:
                self.sim.inject(pin, start + t)

    def run(self, stimulus: Sequence[EpochStimulus]) -> List[Tuple[Optional[Packet], Optional[Packet]]]:
        """
        Simulate consecutive epochs from a fresh start.

        Returns:
            One ``(out_a, out_b)`` pair of decoded packets per epoch.

        Raises:
            PastNocError subclasses when an output epoch does not decode.
        """
        for k, (a, b, rand_bit) in enumerate(stimulus):
            self.inject_epoch(k, a, b, rand_bit)
        n = len(stimulus)
        self.sim.run_until((n + 1) * self.epoch_ps + self.pd_a)
        self.epochs_run = n
        return self.decode_outputs(n)

    def binned(self, output: str) -> Dict[int, List[int]]:
        bins: Dict[int, List[int]] = defaultdict(list)
        for t in self.sim.received[output]:
            bins[(t - self.pd_a) // self.epoch_ps].append(t)
        return bins

    def decode_outputs(self, n: int) -> List[Tuple[Optional[Packet], Optional[Packet]]]:
        ecfg = self.cfg.epoch_cfg
        tol = 1 + self.jitter_ps
        per_port = {port: self.binned(port) for port in ("out_a", "out_b")}
        decoded = []
        for k in range(n):
            pair = []
            for port in ("out_a", "out_b"):
                pulses = per_port[port].get(k)
                if not pulses:
                    pair.append(None)
                    continue
                pair.append(decode_packet(ecfg, pulses, epoch_start=k * self.epoch_ps + self.pd_a, tolerance_ps=tol))
            decoded.append((pair[0], pair[1]))
        stray = [k for port in per_port.values() for k in port if not 0 <= k < n]
        if stray:
            logger.warning(f"router output pulses outside the simulated epochs: {sorted(set(stray))}")
        return decoded
