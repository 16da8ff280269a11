# flitsim/__init__.py
"""
PaST-NoC flit-level simulator.

Epoch-synchronous deflection network built on the behavioral router, with
synthetic traffic, measurement windows and livelock scenarios.

Modules:
    traffic: TrafficPattern, make_pattern, address permutations
    network: FlitRecord, FlitNetwork
    metrics: Metrics, measure, Wilson intervals
    livelock: repeating-deflection scenarios on one router or a whole network
"""

__version__ = "0.1.0"
__author__ = "Cerevia Inc."
__license__ = "Proprietary"
__email__ = "research@cerevia.ai"

from .livelock import LivelockResult, escape_trials, network_livelock, router_livelock
from .metrics import DEFAULT_SAMPLE, DEFAULT_WARMUP, Metrics, collect, measure, wilson_interval
from .network import FlitNetwork, FlitRecord
from .traffic import NAMED_STUDY_PATTERNS, PATTERNS, TrafficPattern, make_pattern, map_address

__all__ = [
    # Traffic
    "NAMED_STUDY_PATTERNS",
    "PATTERNS",
    "TrafficPattern",
    "make_pattern",
    "map_address",

    # Network
    "FlitNetwork",
    "FlitRecord",

    # Metrics
    "DEFAULT_SAMPLE",
    "DEFAULT_WARMUP",
    "Metrics",
    "collect",
    "measure",
    "wilson_interval",

    # Livelock
    "LivelockResult",
    "escape_trials",
    "network_livelock",
    "router_livelock",
]
