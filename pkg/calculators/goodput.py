# calculators/goodput.py
"""
Throughput per port per JJ of PaST-NoC topologies against the baselines.

A packet carries ``bits_per_packet`` payload bits per epoch; only packets
that reach their own destination count, so the raw rate is scaled by the
delivery efficiency of the traffic case and divided by the JJ total of the
topology (retimers included).
"""
import logging
import math
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import pandas as pd
from scipy import optimize

from calculators.baselines import CASES, PUBLISHED_CROSSOVERS, BaselineSpec, competitor, parse_case
from calculators.capacity import bits_per_packet
from packet.epoch import EpochConfig
from topology import build_topology, jj_count
from topology.model import Topology
from validators.errors import InvalidEpoch, InvalidGeometry, NoCrossover

logger = logging.getLogger(__name__)

HOP_DEFLECTION_UNIFORM = 0.25
FIRST_HOP_DEFLECTION_WORST = 0.5
CONTROL_SLOT_PS = 60
GRID_START_PS = 30
GRID_STEP_PS = 15
GRID_STOP_PS = 3000


# -----------------------------
# DELIVERY EFFICIENCY
# -----------------------------
def _worst_case_success(reinjected: float) -> float:
    """
    First two hops of the worst-case pattern when a fraction ``reinjected``
    of the injection slots carries re-injected (uniformly addressed) packets.
    """
    fresh = 1.0 - reinjected
    both_fresh = fresh * fresh
    conflict = both_fresh + (1.0 - both_fresh) * 0.5
    first = 1.0 - conflict / 2.0
    return first * (1.0 - HOP_DEFLECTION_UNIFORM)


def worst_case_efficiency(stages: int) -> float:
    """
    Delivered fraction of a ``stages``-stage butterfly under the worst-case
    pattern, with misdelivered packets re-injected.

    The re-injected fraction r solves ``r = 1 - success(r)``; stages past the
    second deflect like uniform traffic.
    """
    if stages < 1:
        raise ValueError(f"stages must be at least 1, got {stages}")
    if stages == 1:
        return 1.0 - FIRST_HOP_DEFLECTION_WORST
    r = optimize.brentq(lambda x: x - (1.0 - _worst_case_success(x)), 0.0, 1.0)
    return _worst_case_success(r) * (1.0 - HOP_DEFLECTION_UNIFORM) ** (stages - 2)


def butterfly_efficiency(stages: int, case: str) -> float:
    case = parse_case(case)
    if case == "best":
        return 1.0
    if case == "uniform":
        return (1.0 - HOP_DEFLECTION_UNIFORM) ** stages
    return worst_case_efficiency(stages)


def measured_efficiency(topo: Topology, case: str, warmup: int = 200, sample_epochs: int = 2000,
                        seed: int = 0) -> float:
    """Worst-endpoint delivered fraction from a saturated flit-level run."""
    # deferred: flitsim depends on calculators.capacity
    from flitsim.metrics import measure
    from flitsim.network import FlitNetwork
    from flitsim.traffic import make_pattern

    case = parse_case(case)
    if case == "best":
        return 1.0
    pattern = make_pattern(case, topo.n_endpoints, 1.0, seed=seed, topology=topo)
    metrics = measure(FlitNetwork(topo, seed=seed), pattern, warmup, sample_epochs)
    return metrics.worst_endpoint_fraction


def delivery_efficiency(topo: Topology, case: str, measured: Optional[float] = None) -> float:
    """
    Fraction of injection slots that deliver a packet to its own destination.

    Butterflies use the closed form; meshes need ``measured`` (or a
    flit-level run, see ``measured_efficiency``).
    """
    if measured is not None:
        return float(measured)
    if topo.kind == "butterfly":
        return butterfly_efficiency(topo.stages_per_node, case)
    return measured_efficiency(topo, case)


# -----------------------------
# GOODPUT
# -----------------------------
def scale_control_period(num_destinations: int, control_slot: int = CONTROL_SLOT_PS) -> int:
    """Control period for ``num_destinations`` destinations plus the empty slot."""
    if num_destinations < 2:
        raise ValueError(f"num_destinations must be at least 2, got {num_destinations}")
    return (num_destinations + 1) * control_slot


def raw_gbps_per_port(cfg: EpochConfig) -> float:
    """Payload rate of one port at full injection; 0 below two data slots."""
    try:
        bits = bits_per_packet(cfg)
    except InvalidEpoch:
        return 0.0
    return bits * 1000.0 / cfg.epoch


def pastnoc_goodput(cfg: EpochConfig, topo: Topology, case: str = "uniform", efficiency: Optional[float] = None,
                    jj: Optional[int] = None) -> float:
    """Gbps per port per JJ of ``topo`` on epoch ``cfg``."""
    eff = delivery_efficiency(topo, case, efficiency)
    total = jj if jj is not None else jj_count(topo)["total_with_retimers"]
    return raw_gbps_per_port(cfg) * eff / total


def _topology_at(topology: str, data_period: int, policy: str) -> Optional[Topology]:
    try:
        return build_topology(topology, policy=policy, data_period=data_period)
    except (InvalidEpoch, InvalidGeometry) as exc:
        logger.debug(f"{topology} at {data_period} ps skipped: {exc}")
        return None


def _curve_point(topo: Topology, case: str, efficiency: float) -> Dict:
    manifest = jj_count(topo)
    raw = raw_gbps_per_port(topo.epoch_cfg)
    return {
        "data_period_ps": topo.epoch_cfg.data_period,
        "case": case,
        "efficiency": efficiency,
        "gbps_per_port": raw * efficiency,
        "jj": manifest["total_with_retimers"],
        "gbps_per_port_per_jj": raw * efficiency / manifest["total_with_retimers"],
    }


def default_grid(start: int = GRID_START_PS, stop: int = GRID_STOP_PS, step: int = GRID_STEP_PS) -> List[int]:
    return list(range(start, stop + 1, step))


def case_efficiencies(topology: str, cases: Iterable[str] = CASES, policy: str = "round_robin",
                      measured: Optional[Dict[str, float]] = None) -> Dict[str, float]:
    """Efficiency per case; flit-sim runs only for meshes without a measured value."""
    measured = {parse_case(k): v for k, v in (measured or {}).items()}
    topo = build_topology(topology, policy=policy)
    return {c: delivery_efficiency(topo, c, measured.get(c)) for c in map(parse_case, cases)}


def goodput_curve(topology: str, cases: Iterable[str] = CASES, data_periods: Optional[Sequence[int]] = None,
                  policy: str = "round_robin", baseline: Optional[str] = None,
                  efficiencies: Optional[Dict[str, float]] = None) -> pd.DataFrame:
    """
    Goodput of ``topology`` over a data-period grid, one row per (period, case).

    With ``baseline`` the rows also carry the competitor's goodput and the
    PaST-NoC / competitor ratio. Periods the topology cannot be built at are
    left out.
    """
    cases = [parse_case(c) for c in cases]
    effs = case_efficiencies(topology, cases, policy, efficiencies)
    rows = []
    for dp in data_periods if data_periods is not None else default_grid():
        topo = _topology_at(topology, dp, policy)
        if topo is None:
            continue
        for case in cases:
            row = _curve_point(topo, case, effs[case])
            row["topology"] = topology
            if baseline is not None:
                spec = competitor(topology, baseline, case)
                row["baseline"] = spec.name
                row["baseline_gbps_per_port_per_jj"] = spec.goodput(case)
                row["ratio"] = improvement_ratio(row["gbps_per_port_per_jj"], spec.goodput(case))
            rows.append(row)
    return pd.DataFrame(rows)


# -----------------------------
# COMPARISONS
# -----------------------------
def improvement_ratio(pastnoc: float, baseline: float) -> float:
    if baseline <= 0:
        return math.inf if pastnoc > 0 else 1.0
    return pastnoc / baseline


def improvement_factor(topology: str, baseline, data_period: int, case: str = "uniform",
                       policy: str = "round_robin", efficiency: Optional[float] = None) -> float:
    """PaST-NoC goodput over the competitor's at one data period."""
    case = parse_case(case)
    spec = baseline if isinstance(baseline, BaselineSpec) else competitor(topology, baseline, case)
    topo = build_topology(topology, policy=policy, data_period=data_period)
    return improvement_ratio(pastnoc_goodput(topo.epoch_cfg, topo, case, efficiency), spec.goodput(case))


def crossover(topology: str, baseline, case: str = "uniform", policy: str = "round_robin",
              efficiency: Optional[float] = None, data_periods: Optional[Sequence[int]] = None) -> int:
    """
    Smallest grid data period where PaST-NoC reaches the competitor.

    Raises:
        NoCrossover: the ratio stays below 1 over the whole grid.
    """
    case = parse_case(case)
    spec = baseline if isinstance(baseline, BaselineSpec) else competitor(topology, baseline, case)
    target = spec.goodput(case)
    eff = case_efficiencies(topology, [case], policy, {case: efficiency} if efficiency is not None else None)[case]
    grid = list(data_periods) if data_periods is not None else default_grid()
    for dp in grid:
        topo = _topology_at(topology, dp, policy)
        if topo is not None and _curve_point(topo, case, eff)["gbps_per_port_per_jj"] >= target:
            return dp
    raise NoCrossover(f"{topology} never reaches {spec.name} ({case}) between {grid[0]} and {grid[-1]} ps")


def crossover_table(policy: str = "round_robin", efficiencies: Optional[Dict[str, Dict[str, float]]] = None,
                    data_periods: Optional[Sequence[int]] = None,
                    measure_fn: Optional[Callable[[str, str], float]] = None) -> pd.DataFrame:
    """
    Computed crossovers next to the reported ones, one row per reported pair.

    ``efficiencies`` maps topology -> case -> efficiency and wins over
    ``measure_fn``; both are only consulted for topologies without a closed form.
    """
    efficiencies = efficiencies or {}
    rows = []
    for (topology, name, case), published in sorted(PUBLISHED_CROSSOVERS.items()):
        eff = efficiencies.get(topology, {}).get(case)
        if eff is None and measure_fn is not None and build_topology(topology).kind != "butterfly":
            eff = measure_fn(topology, case)
        try:
            computed: Optional[int] = crossover(topology, name, case, policy, eff, data_periods)
        except NoCrossover:
            computed = None
        rows.append({
            "topology": topology,
            "competitor": competitor(topology, name, case).name if name == "binary" else name,
            "case": case,
            "computed_ps": computed,
            "published_ps": published,
        })
    return pd.DataFrame(rows, columns=["topology", "competitor", "case", "computed_ps", "published_ps"])
