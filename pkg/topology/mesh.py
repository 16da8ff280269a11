# topology/mesh.py
"""
Concentrated 2D mesh whose nodes are butterflies of 2x2 routers.

Node ports: local endpoints first, then the existing neighbours in N, S, W,
E order, then unused ports. Unused outputs loop back into the unused inputs
of the same node one epoch later. Inter-node links carry retimers so every
hop lands on the next epoch boundary.

Routing is dimension order (X first, then Y) between nodes and
destination-tag inside a node: a router requests its top output for every
destination whose preferred node port is reachable from that output.
"""
import logging
from typing import Dict, List, Optional, Tuple

from packet.epoch import EpochConfig
from router.behavioral import Policy, RouterConfig
from topology.butterfly import LFSR_WIDTH
from topology.model import Link, Topology, block_reachability, build_butterfly_block
from validators.errors import InvalidGeometry

logger = logging.getLogger(__name__)

DIRECTIONS: Dict[str, Tuple[int, int]] = {"N": (-1, 0), "S": (1, 0), "W": (0, -1), "E": (0, 1)}
OPPOSITE = {"N": "S", "S": "N", "W": "E", "E": "W"}

Node = Tuple[int, int]


def next_pow2(n: int) -> int:
    p = 2
    while p < n:
        p *= 2
    return p


def node_ports(rows: int, cols: int, concentration: int, node: Node) -> Dict[str, int]:
    """Port index of every local endpoint ("L0", "L1", ...) and existing neighbour direction."""
    ports = {f"L{i}": i for i in range(concentration)}
    nxt = concentration
    for d, (dr, dc) in DIRECTIONS.items():
        r, c = node[0] + dr, node[1] + dc
        if 0 <= r < rows and 0 <= c < cols:
            ports[d] = nxt
            nxt += 1
    return ports


def dor_port(rows: int, cols: int, concentration: int, node: Node, destination: int) -> int:
    """Preferred output port of ``node`` for ``destination`` under X-then-Y routing."""
    ports = node_ports(rows, cols, concentration, node)
    dnode_idx = (destination - 1) // concentration
    drow, dcol = divmod(dnode_idx, cols)
    if (drow, dcol) == node:
        return ports[f"L{(destination - 1) % concentration}"]
    if dcol != node[1]:
        return ports["E" if dcol > node[1] else "W"]
    return ports["S" if drow > node[0] else "N"]


def manhattan(a: Node, b: Node) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def build_mesh(rows: int, cols: int, concentration: int, epoch_cfg: Optional[EpochConfig] = None,
               policy="round_robin", name: Optional[str] = None) -> Topology:
    """
    Raises:
        InvalidGeometry: empty grid, zero concentration, a destination count
            that does not match the endpoints, or an epoch no longer than the
            propagation delay of one node.
    """
    if rows < 1 or cols < 1 or concentration < 1 or rows * cols < 2:
        raise InvalidGeometry(f"mesh needs at least two nodes and one endpoint per node, got "
                              f"{rows}x{cols} with concentration {concentration}")
    n_endpoints = rows * cols * concentration
    ecfg = epoch_cfg or EpochConfig(num_destinations=n_endpoints)
    if ecfg.num_destinations != n_endpoints:
        raise InvalidGeometry(f"mesh has {n_endpoints} endpoints but the epoch encodes {ecfg.num_destinations}")
    policy = Policy.parse(policy)

    nodes: List[Node] = [(r, c) for r in range(rows) for c in range(cols)]
    max_degree = max(len(node_ports(rows, cols, concentration, n)) - concentration for n in nodes)
    radix = next_pow2(concentration + max_degree)
    stages = radix.bit_length() - 1

    topo = Topology(kind="mesh", name=name or f"mesh{rows}x{cols}c{concentration}", n_endpoints=n_endpoints,
                    epoch_cfg=ecfg, policy=policy, stages_per_node=stages, grid=(rows, cols, concentration))
    if ecfg.epoch <= topo.propagation_delay:
        raise InvalidGeometry(f"epoch {ecfg.epoch} ps must exceed the node propagation delay "
                              f"{topo.propagation_delay} ps to fit the inter-router retimers")

    blocks = {}
    for node in nodes:
        prefix = f"n{node[0]}_{node[1]}."
        block = build_butterfly_block(radix, prefix, 0, topo.elements, topo.links, counters={})
        blocks[node] = block
        reach = block_reachability(block, topo.links)
        for elem_name in {ref[0] for ref in reach}:
            elem = topo.elements[elem_name]
            elem.node = node
            elem.entry = elem.stage == 0
            top = frozenset(d for d in range(1, n_endpoints + 1)
                            if dor_port(rows, cols, concentration, node, d) in reach[(elem_name, 0)])
            if top == frozenset(range(1, len(top) + 1)):
                elem.cfg = RouterConfig(policy, len(top), ecfg)
            else:
                elem.cfg = RouterConfig(policy, 0, ecfg, top_slots=top)

    retimers = 0
    for node in nodes:
        block = blocks[node]
        ports = node_ports(rows, cols, concentration, node)
        node_idx = node[0] * cols + node[1]
        for i in range(concentration):
            ep = node_idx * concentration + i + 1
            topo.injection[ep] = block.inputs[i]
            topo.links[block.outputs[i]] = Link("endpoint", ep)
        for d in ("N", "S", "W", "E"):
            if d not in ports:
                continue
            dr, dc = DIRECTIONS[d]
            peer = (node[0] + dr, node[1] + dc)
            peer_port = node_ports(rows, cols, concentration, peer)[OPPOSITE[d]]
            target = blocks[peer].inputs[peer_port]
            topo.links[block.outputs[ports[d]]] = Link("element", target[0], target[1], 1)
            retimers += 1
        for q in range(len(ports), radix):
            target = block.inputs[q]
            topo.links[block.outputs[q]] = Link("element", target[0], target[1], 1)

    for idx, elem in enumerate(topo.order):
        elem.rand_bit_position = idx % LFSR_WIDTH
    topo.retimers = retimers
    topo.meta["node_radix"] = radix
    topo.meta["node_ports"] = {f"{n[0]},{n[1]}": node_ports(rows, cols, concentration, n) for n in nodes}
    logger.debug(f"built {topo.name}: {len(nodes)} nodes of radix {radix}, {retimers} retimed links")
    return topo


def node_of_endpoint(topo: Topology, endpoint: int) -> Node:
    rows, cols, conc = topo.grid
    return divmod((endpoint - 1) // conc, cols)


def min_node_hops(topo: Topology, src: int, dst: int) -> int:
    """Nodes entered on the shortest path, source node included."""
    return manhattan(node_of_endpoint(topo, src), node_of_endpoint(topo, dst)) + 1
