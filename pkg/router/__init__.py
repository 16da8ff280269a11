# router/__init__.py
"""
PaST-NoC 2x2 router.

Two views of the same arbiter: an epoch-level behavioral model used by the
network simulator and a pulse-level netlist of RSFQ cells, plus the checks
that keep them in agreement.

Modules:
    behavioral: Policy, RouterConfig, RouterState, route_epoch
    lfsr: Galois LFSR feeding randomized round robin
    netlist: structural router, control schedule, JJ and delay tables
    harness: epoch driver and output decoder for the netlist
    crossvalidate: exhaustive and randomized netlist-vs-behavioral checks
"""

__version__ = "0.1.0"
__author__ = "Cerevia Inc."
__license__ = "Proprietary"
__email__ = "research@cerevia.ai"

from .behavioral import BehavioralRouter, Policy, RouterConfig, RouterState, RoutingDecision, route_epoch
from .crossvalidate import crossvalidate
from .harness import RouterHarness
from .lfsr import DEFAULT_TAPS, Lfsr, lfsr_next
from .netlist import (
    CALIBRATION,
    CHARACTERISED_JJ,
    CHARACTERISED_MODULES,
    REFERENCE_EPOCH,
    ControlSchedule,
    build_router_netlist,
    control_schedule,
    input_b_delay,
    module_delays,
    router_layout,
)

__all__ = [
    # Behavioral model
    "BehavioralRouter",
    "Policy",
    "RouterConfig",
    "RouterState",
    "RoutingDecision",
    "route_epoch",

    # Random bits
    "DEFAULT_TAPS",
    "Lfsr",
    "lfsr_next",

    # Netlist
    "CALIBRATION",
    "CHARACTERISED_JJ",
    "REFERENCE_EPOCH",
    "CHARACTERISED_MODULES",
    "ControlSchedule",
    "build_router_netlist",
    "control_schedule",
    "input_b_delay",
    "module_delays",
    "router_layout",
    "RouterHarness",
    "crossvalidate",
]
