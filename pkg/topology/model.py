# topology/model.py
"""
Element graph shared by every topology.

An element is one 2x2 router. Each element output port is linked either to
an element input port (``delay`` epochs later: 0 inside a butterfly, 1 over
a retimed mesh link or a loop-back) or to an endpoint.
"""
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from packet.epoch import EpochConfig
from router.behavioral import Policy, RouterConfig
from router.netlist import CHARACTERISED_MODULES

# Characterised input-to-output delay of one 2x2 router, used for schedules and retiming.
ROUTER_PD_PS = int(round(CHARACTERISED_MODULES["in_to_out"][1]))

PortRef = Tuple[str, int]


@dataclass(frozen=True)
class Link:
    kind: str  # "element" or "endpoint"
    target: object  # element name or endpoint id
    port: int = 0
    delay: int = 0


@dataclass
class Element:
    name: str
    stage: int
    column: int
    cfg: Optional[RouterConfig] = None
    node: Optional[Tuple[int, int]] = None
    entry: bool = True
    rand_bit_position: int = 0

    @property
    def top_destinations(self) -> FrozenSet[int]:
        n = self.cfg.epoch_cfg.num_destinations
        return frozenset(d for d in range(1, n + 1) if self.cfg.requests_top(d))


@dataclass
class Topology:
    """
    Immutable once built. ``injection`` maps endpoint ids (1-based) to the
    element input they feed; ``links`` maps every element output port.
    """

    kind: str
    name: str
    n_endpoints: int
    epoch_cfg: EpochConfig
    policy: Policy
    elements: Dict[str, Element] = field(default_factory=dict)
    links: Dict[PortRef, Link] = field(default_factory=dict)
    injection: Dict[int, PortRef] = field(default_factory=dict)
    aliases: Dict[str, str] = field(default_factory=dict)
    stages_per_node: int = 1
    grid: Optional[Tuple[int, int, int]] = None
    retimers: int = 0
    meta: Dict[str, object] = field(default_factory=dict)

    @property
    def order(self) -> List[Element]:
        return sorted(self.elements.values(), key=lambda e: (e.stage, e.name))

    def element(self, name: str) -> Element:
        return self.elements[self.aliases.get(name, name)]

    @property
    def propagation_delay(self) -> int:
        """P: delay through one node (a whole butterfly for a butterfly topology)."""
        return self.stages_per_node * ROUTER_PD_PS

    def control_offsets(self, pd: Optional[int] = None) -> Dict[str, int]:
        """Per-element delay of the periodic control pulses: column * PD (characterised PD by default)."""
        pd = ROUTER_PD_PS if pd is None else pd
        return {e.name: e.column * pd for e in self.order}

    @property
    def endpoint_epoch_delay(self) -> int:
        return self.propagation_delay

    def packet_latency_ps(self, hops: int) -> int:
        return hops * ROUTER_PD_PS + self.epoch_cfg.epoch

    @property
    def retimer_delay_ps(self) -> int:
        return self.epoch_cfg.epoch - self.propagation_delay if self.retimers else 0

    @property
    def retimer_stages(self) -> int:
        if not self.retimers:
            return 0
        sp = self.epoch_cfg.data_spacing
        return -(-self.retimer_delay_ps // sp)

    def first_stage_groups(self) -> List[List[int]]:
        """Endpoints sharing a first-stage element, in element order."""
        groups: Dict[str, List[int]] = {}
        for ep, (elem, _port) in sorted(self.injection.items()):
            groups.setdefault(elem, []).append(ep)
        order = {e.name: i for i, e in enumerate(self.order)}
        return [groups[name] for name in sorted(groups, key=order.get)]

    def describe(self) -> Dict[str, object]:
        return {
            "kind": self.kind,
            "name": self.name,
            "endpoints": self.n_endpoints,
            "elements": len(self.elements),
            "stages_per_node": self.stages_per_node,
            "policy": self.policy.value,
            "epoch_ps": self.epoch_cfg.epoch,
            "retimers": self.retimers,
            "retimer_stages": self.retimer_stages,
        }


# -----------------------------
# BUTTERFLY BLOCK
# -----------------------------
@dataclass
class _Block:
    inputs: List[PortRef]
    outputs: List[PortRef]


def build_butterfly_block(k: int, prefix: str, first_stage: int, elements: Dict[str, Element],
                          links: Dict[PortRef, Link], counters: Dict[int, int]) -> _Block:
    """
    Recursive k-port butterfly: the top outputs of the first stage feed the
    upper half-size block, the bottom outputs the lower one, so each input
    has exactly one path to each output. Router configs are assigned by the caller.
    """
    column = first_stage
    first: List[str] = []
    for _ in range(k // 2):
        idx = counters.get(column, 0)
        counters[column] = idx + 1
        name = f"{prefix}s{column}e{idx}"
        elements[name] = Element(name=name, stage=column, column=column)
        first.append(name)
    inputs = [(first[j // 2], j % 2) for j in range(k)]
    if k == 2:
        return _Block(inputs=inputs, outputs=[(first[0], 0), (first[0], 1)])
    upper = build_butterfly_block(k // 2, prefix, first_stage + 1, elements, links, counters)
    lower = build_butterfly_block(k // 2, prefix, first_stage + 1, elements, links, counters)
    for i, name in enumerate(first):
        dst_u = upper.inputs[i]
        dst_l = lower.inputs[i]
        links[(name, 0)] = Link("element", dst_u[0], dst_u[1], 0)
        links[(name, 1)] = Link("element", dst_l[0], dst_l[1], 0)
    return _Block(inputs=inputs, outputs=upper.outputs + lower.outputs)


def block_reachability(block: _Block, links: Dict[PortRef, Link]) -> Dict[PortRef, FrozenSet[int]]:
    """Block output indices reachable from every element output port inside the block."""
    out_index = {ref: q for q, ref in enumerate(block.outputs)}
    memo: Dict[PortRef, FrozenSet[int]] = {}

    def reach(ref: PortRef) -> FrozenSet[int]:
        if ref in memo:
            return memo[ref]
        if ref in out_index:
            result = frozenset({out_index[ref]})
        else:
            link = links[ref]
            result = reach((link.target, 0)) | reach((link.target, 1))
        memo[ref] = result
        return result

    names = {ref[0] for ref in block.inputs}
    frontier = list(names)
    seen = set()
    while frontier:
        name = frontier.pop()
        if name in seen:
            continue
        seen.add(name)
        for port in (0, 1):
            reach((name, port))
            link = links.get((name, port))
            if link is not None and (name, port) not in out_index:
                frontier.append(link.target)
    return memo
