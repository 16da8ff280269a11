# topology/area.py
"""
JJ accounting of a topology.

Routers are charged at their characterised count (the round-robin total,
plus the randomization block for randomized round robin); every retimed
inter-router link adds one flux shift register of ``retimer_stages`` stages.
"""
import logging
from functools import lru_cache
from typing import Any, Dict, Iterable, Optional

from cells.primitives import CellKind, jj_count_of
from packet.epoch import EpochConfig
from router.behavioral import Policy, RouterConfig
from router.netlist import CHARACTERISED_JJ, REFERENCE_EPOCH, build_router_netlist
from topology.model import Topology
from validators.errors import InvalidGeometry

logger = logging.getLogger(__name__)

PUBLISHED_BUTTERFLY4_JJ = 1924
PUBLISHED_MESH8_JJ = 7912


@lru_cache(maxsize=None)
def router_jj(policy: Policy) -> int:
    """JJs of one 2x2 router under ``policy``."""
    policy = Policy.parse(policy)
    if policy in CHARACTERISED_JJ:
        return CHARACTERISED_JJ[policy]
    _, report = build_router_netlist(RouterConfig(policy, 1, REFERENCE_EPOCH))
    return report["total"]


def jj_count(topo: Topology) -> Dict[str, Any]:
    """Area manifest: router and retimer totals, with and without retimers."""
    per_router = router_jj(topo.policy)
    routers = len(topo.elements)
    stages = topo.retimer_stages
    per_retimer = jj_count_of(CellKind.SHIFT_REGISTER, stages=stages) if topo.retimers else 0
    router_total = routers * per_router
    retimer_total = topo.retimers * per_retimer
    with_retimers = router_total + retimer_total
    return {
        "topology": topo.name,
        "policy": topo.policy.value,
        "data_period_ps": topo.epoch_cfg.data_period,
        "epoch_ps": topo.epoch_cfg.epoch,
        "routers": routers,
        "jj_per_router": per_router,
        "router_jj": router_total,
        "retimers": topo.retimers,
        "retimer_delay_ps": topo.retimer_delay_ps,
        "retimer_stages": stages,
        "jj_per_retimer": per_retimer,
        "retimer_jj": retimer_total,
        "total_without_retimers": router_total,
        "total_with_retimers": with_retimers,
        "retimer_share_percent": round(100.0 * retimer_total / with_retimers, 3) if with_retimers else 0.0,
    }


def closest_configuration(builder, target: int = PUBLISHED_MESH8_JJ,
                          data_periods: Optional[Iterable[int]] = None) -> Dict[str, Any]:
    """
    Data period whose with-retimer total lands closest to ``target``.

    Args:
        builder: callable ``data_period -> Topology``; periods it rejects are skipped.
        target: published JJ total to compare against.
        data_periods: candidates (default 15 ps grid up to 2 ns).
    """
    best: Optional[Dict[str, Any]] = None
    for dp in data_periods if data_periods is not None else range(15, 2001, 15):
        try:
            manifest = jj_count(builder(dp))
        except InvalidGeometry:
            continue
        delta = manifest["total_with_retimers"] - target
        if best is None or abs(delta) < abs(best["delta"]):
            best = {"data_period_ps": dp, "total_with_retimers": manifest["total_with_retimers"],
                    "total_without_retimers": manifest["total_without_retimers"], "target": target, "delta": delta}
    if best is None:
        raise InvalidGeometry("no data period in the searched range yields a valid topology")
    logger.info(f"closest configuration to {target} JJ: {best}")
    return best


def epoch_for(num_destinations: int, data_period: int, base: Optional[EpochConfig] = None) -> EpochConfig:
    base = base or EpochConfig(num_destinations=num_destinations)
    return EpochConfig(num_destinations, base.control_slot, base.data_spacing, data_period)
