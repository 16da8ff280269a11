# topology/__init__.py
"""
PaST-NoC topologies.

Routers composed into butterflies and concentrated meshes, with threshold
schedules, retimed links, endpoint queues and JJ accounting.

Modules:
    model: Element, Link, Topology and the recursive butterfly block
    butterfly: k x k butterfly builder
    mesh: concentrated mesh of butterfly nodes under dimension-order routing
    endpoints: re-injection and source queues
    area: JJ manifest and closest-configuration search
    export: DOT export
    pulsenet: pulse-level network of router netlists joined by retimers
"""

__version__ = "0.1.0"
__author__ = "Cerevia Inc."
__license__ = "Proprietary"
__email__ = "research@cerevia.ai"

from typing import Optional

from packet.epoch import EpochConfig

from .area import PUBLISHED_BUTTERFLY4_JJ, PUBLISHED_MESH8_JJ, closest_configuration, jj_count, router_jj
from .butterfly import build_butterfly
from .endpoints import EndpointQueue
from .export import to_dot, write_dot
from .mesh import build_mesh, min_node_hops
from .model import ROUTER_PD_PS, Element, Link, Topology
from .pulsenet import PULSE_MAX_ENDPOINTS, PulseNetwork

# name -> (builder, args)
NAMED_TOPOLOGIES = {
    "router2": ("butterfly", (2,)),
    "butterfly4": ("butterfly", (4,)),
    "bfly32": ("butterfly", (32,)),
    "mesh8": ("mesh", (2, 2, 2)),
    "cmesh32": ("mesh", (2, 4, 4)),
}


def topology_size(name: str) -> int:
    kind, args = NAMED_TOPOLOGIES[name]
    return args[0] if kind == "butterfly" else args[0] * args[1] * args[2]


def build_topology(name: str, policy="round_robin", data_period: Optional[int] = None,
                   control_slot: Optional[int] = None, data_spacing: Optional[int] = None) -> Topology:
    """Build one of ``NAMED_TOPOLOGIES`` on an epoch sized for its endpoint count."""
    if name not in NAMED_TOPOLOGIES:
        raise ValueError(f"Invalid value for 'topology': '{name}'. Must be one of {sorted(NAMED_TOPOLOGIES)}")
    kind, args = NAMED_TOPOLOGIES[name]
    base = EpochConfig(num_destinations=topology_size(name))
    ecfg = EpochConfig(
        base.num_destinations,
        control_slot if control_slot is not None else base.control_slot,
        data_spacing if data_spacing is not None else base.data_spacing,
        data_period if data_period is not None else base.data_period,
    )
    if kind == "butterfly":
        return build_butterfly(args[0], ecfg, policy, name=name)
    return build_mesh(*args, epoch_cfg=ecfg, policy=policy, name=name)


__all__ = [
    # Builders
    "NAMED_TOPOLOGIES",
    "build_butterfly",
    "build_mesh",
    "build_topology",
    "topology_size",

    # Model
    "ROUTER_PD_PS",
    "Element",
    "EndpointQueue",
    "Link",
    "Topology",
    "min_node_hops",

    # Pulse level
    "PULSE_MAX_ENDPOINTS",
    "PulseNetwork",

    # Area
    "PUBLISHED_BUTTERFLY4_JJ",
    "PUBLISHED_MESH8_JJ",
    "closest_configuration",
    "jj_count",
    "router_jj",

    # Export
    "to_dot",
    "write_dot",
]
