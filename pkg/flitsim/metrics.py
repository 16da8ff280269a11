# flitsim/metrics.py
"""
Measurement windows over a ``FlitNetwork``.

Throughput counts only packets delivered to their own destination. Hop
indices restart on every (re-)injection, so hop 1 is always the first router
(mesh: node) a packet crosses after leaving an endpoint.
"""
import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
from scipy import stats

from calculators.capacity import bits_per_packet
from flitsim.network import FlitNetwork
from validators.errors import InvalidEpoch

logger = logging.getLogger(__name__)

DEFAULT_WARMUP = 1000
DEFAULT_SAMPLE = 10_000
CONFIDENCE = 0.95


def wilson_interval(successes: int, trials: int, confidence: float = CONFIDENCE):
    """Wilson score interval of a binomial proportion; (0, 1) without trials."""
    if trials <= 0:
        return 0.0, 1.0
    ci = stats.binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass
class Metrics:
    topology: str
    pattern: str
    rate: float
    seed: int
    policy: str
    epochs: int
    offered_load: float
    accepted_load: float
    throughput_bps_per_port: float
    deflection_prob: float
    deflection_ci_low: float
    deflection_ci_high: float
    latency_mean: Optional[float]
    latency_p50: Optional[float]
    latency_p99: Optional[float]
    worst_endpoint_fraction: float
    delivered: int
    misdelivered: int
    retired: int
    mean_source_queue: float
    per_hop: List[Dict[str, Any]] = field(default_factory=list)
    endpoint_fractions: Dict[int, float] = field(default_factory=dict)

    def as_row(self) -> Dict[str, Any]:
        """Flat CSV row (per-hop and per-endpoint detail dropped)."""
        row = asdict(self)
        row.pop("per_hop")
        row.pop("endpoint_fractions")
        return row


def collect(network: FlitNetwork, pattern_name: str = "scripted", rate: float = 0.0, seed: int = 0) -> Metrics:
    """Summarise the current statistics window of ``network``."""
    topo = network.topology
    n = topo.n_endpoints
    epochs = max(network.window_epochs, 1)
    s = network.stats
    accepted = s["delivered"] / (n * epochs)
    try:
        bits = bits_per_packet(topo.epoch_cfg)
    except InvalidEpoch:
        bits = 0.0
    throughput = accepted * bits / (topo.epoch_cfg.epoch * 1e-12)

    traversals, deflections = s["traversals"], s["deflections"]
    low, high = wilson_interval(deflections, traversals)
    per_hop = []
    for hop in sorted(network.hop_traversals):
        k, m = network.hop_deflections[hop], network.hop_traversals[hop]
        h_low, h_high = wilson_interval(k, m)
        per_hop.append({"hop": hop, "traversals": m, "deflections": k, "prob": k / m,
                        "ci_low": h_low, "ci_high": h_high})

    lat = np.asarray(network.latencies, dtype=float)
    fractions = {ep: network.per_source_delivered[ep] / epochs for ep in range(1, n + 1)}
    return Metrics(
        topology=topo.name,
        pattern=pattern_name,
        rate=rate,
        seed=seed,
        policy=network.policy.value,
        epochs=network.window_epochs,
        offered_load=s["created"] / (n * epochs),
        accepted_load=accepted,
        throughput_bps_per_port=throughput,
        deflection_prob=deflections / traversals if traversals else 0.0,
        deflection_ci_low=low,
        deflection_ci_high=high,
        latency_mean=float(lat.mean()) if lat.size else None,
        latency_p50=float(np.percentile(lat, 50)) if lat.size else None,
        latency_p99=float(np.percentile(lat, 99)) if lat.size else None,
        worst_endpoint_fraction=min(fractions.values()),
        delivered=s["delivered"],
        misdelivered=s["misdelivered"],
        retired=s["retired"],
        mean_source_queue=s["queue_depth"] / (n * epochs),
        per_hop=per_hop,
        endpoint_fractions=fractions,
    )


def measure(network: FlitNetwork, pattern, warmup: int = DEFAULT_WARMUP, sample_epochs: int = DEFAULT_SAMPLE,
            check_conservation: bool = True) -> Metrics:
    """
    Run ``warmup`` epochs, reset the statistics, run ``sample_epochs`` more.

    Raises:
        ValueError: warmup is not shorter than the sample window.
        RuntimeError: packet conservation broke (only with ``check_conservation``).
    """
    if warmup < 0 or sample_epochs < 1 or warmup >= sample_epochs:
        raise ValueError(f"need 0 <= warmup < sample_epochs, got warmup={warmup}, sample_epochs={sample_epochs}")
    for phase, epochs in (("warmup", warmup), ("sample", sample_epochs)):
        if phase == "sample":
            network.reset_stats()
        for _ in range(epochs):
            network.step(pattern)
            if check_conservation and not network.is_conserved():
                raise RuntimeError(f"packet conservation violated in epoch {network.epoch - 1}: "
                                   f"{network.conservation()}")
    metrics = collect(network, pattern.kind, pattern.rate, pattern.seed)
    logger.info(f"measured {metrics.topology} {metrics.pattern} rate={metrics.rate}: "
                f"accepted={metrics.accepted_load:.4f} deflection={metrics.deflection_prob:.4f}")
    return metrics
