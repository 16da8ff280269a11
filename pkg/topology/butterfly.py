# topology/butterfly.py
"""
k x k butterfly of 2x2 routers with destination-tag threshold schedules.
"""
import logging
import math
from typing import Optional

from packet.epoch import EpochConfig
from router.behavioral import Policy, RouterConfig
from topology.model import Link, Topology, block_reachability, build_butterfly_block
from validators.errors import InvalidSize

logger = logging.getLogger(__name__)

LFSR_WIDTH = 8
FOUR_BY_FOUR_ALIASES = {"A": "s0e0", "B": "s0e1", "C": "s1e0", "D": "s1e1"}


def is_power_of_two(k: int) -> bool:
    return isinstance(k, int) and not isinstance(k, bool) and k >= 2 and (k & (k - 1)) == 0


def build_butterfly(k: int, epoch_cfg: Optional[EpochConfig] = None, policy="round_robin",
                    name: Optional[str] = None) -> Topology:
    """
    Build a k-input butterfly (log2(k) stages of k/2 routers).

    Every router's threshold sits after the last destination reachable from
    its top output, so destinations reachable from the top request the top.
    Destinations a router cannot reach (deflected packets) fall on whichever
    side the threshold puts them and are re-injected downstream.

    Raises:
        InvalidSize: k is not a power of two, or the epoch geometry has a
            different number of destinations.
    """
    if not is_power_of_two(k):
        raise InvalidSize(f"butterfly size must be a power of 2 (>= 2), got {k}")
    ecfg = epoch_cfg or EpochConfig(num_destinations=k)
    if ecfg.num_destinations != k:
        raise InvalidSize(f"a {k}x{k} butterfly needs an epoch with {k} destinations, got {ecfg.num_destinations}")
    policy = Policy.parse(policy)

    topo = Topology(kind="butterfly", name=name or f"butterfly{k}", n_endpoints=k, epoch_cfg=ecfg,
                    policy=policy, stages_per_node=int(math.log2(k)))
    block = build_butterfly_block(k, "", 0, topo.elements, topo.links, counters={})
    reach = block_reachability(block, topo.links)

    for idx, elem in enumerate(topo.order):
        top = reach[(elem.name, 0)]
        elem.cfg = RouterConfig(policy, max(top) + 1, ecfg)
        elem.rand_bit_position = idx % LFSR_WIDTH
    for q, (elem_name, port) in enumerate(block.outputs):
        topo.links[(elem_name, port)] = Link("endpoint", q + 1)
    for j, ref in enumerate(block.inputs):
        topo.injection[j + 1] = ref
    if k == 4:
        topo.aliases = dict(FOUR_BY_FOUR_ALIASES)
    thresholds = {e.name: e.cfg.thr_slot for e in topo.order}
    logger.debug(f"built {topo.name}: {len(topo.elements)} routers, thresholds {thresholds}")
    return topo
