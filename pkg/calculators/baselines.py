# calculators/baselines.py
"""
Binary and rotary superconducting NoCs used as comparison baselines.

Baseline throughput per port is a constant: it is not rescaled with the
PaST-NoC data period. Binary switches are charged 1 bit per cycle per port at
40 GHz; the rotary NoC moves 6 bits per 64-slot connection window of 15 ps
slots and only reaches a quarter of that when one source sends to a single
destination.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from validators.config_input import validate_in_set

DEFAULT_BINARY_GBPS = 40.0
SRNOC_SLOTS = 64
SRNOC_SLOT_PS = 15
SRNOC_BITS_PER_WINDOW = 6
SRNOC_GBPS = SRNOC_BITS_PER_WINDOW * 1000.0 / (SRNOC_SLOTS * SRNOC_SLOT_PS)

CASES = ("best", "uniform", "worst")
CASE_ALIASES = {"ur": "uniform", "uniform_random": "uniform"}


def parse_case(case: str) -> str:
    key = str(case).strip().lower()
    key = CASE_ALIASES.get(key, key)
    validate_in_set(key, "case", CASES, "traffic case")
    return key


@dataclass(frozen=True)
class BaselineSpec:
    name: str
    jj_count: int
    throughput_gbps: float
    description: str = ""
    case_factors: Dict[str, float] = field(default_factory=lambda: {c: 1.0 for c in CASES})

    def gbps_per_port(self, case: str = "uniform") -> float:
        return self.throughput_gbps * self.case_factors.get(parse_case(case), 1.0)

    def goodput(self, case: str = "uniform") -> float:
        """Gbps per port per JJ; independent of any data period."""
        return self.gbps_per_port(case) / self.jj_count if self.jj_count else 0.0


# -----------------------------
# CATALOG
# -----------------------------
BANYAN2_JJ = 1184
BANYAN4_JJ = 4300
CROSSBAR4_JJ = 4316
SRNOC_JJ = 528

BASELINES: Dict[str, BaselineSpec] = {
    "banyan2": BaselineSpec("banyan2", BANYAN2_JJ, DEFAULT_BINARY_GBPS, "60-gate 40 GHz 2x2 binary Banyan switch"),
    "banyan4": BaselineSpec("banyan4", BANYAN4_JJ, DEFAULT_BINARY_GBPS, "4x4 binary Banyan network"),
    "crossbar4": BaselineSpec("crossbar4", CROSSBAR4_JJ, DEFAULT_BINARY_GBPS, "4x4 binary crossbar"),
    "srnoc": BaselineSpec(
        "srnoc", SRNOC_JJ, SRNOC_GBPS, "4x4 rotary temporal NoC, 64 slots per connection window",
        case_factors={"best": 1.0, "uniform": 1.0, "worst": 0.25},
    ),
    "banyan8": BaselineSpec("banyan8", 12 * BANYAN2_JJ, DEFAULT_BINARY_GBPS, "8x8 Banyan of twelve 2x2 switches"),
    "crossbar8": BaselineSpec("crossbar8", 4 * CROSSBAR4_JJ, DEFAULT_BINARY_GBPS, "8x8 network of four 4x4 crossbars"),
}

# topology -> binary competitors; "binary" comparisons take the best of the group
BINARY_COMPETITORS: Dict[str, Tuple[str, ...]] = {
    "router2": ("banyan2",),
    "butterfly4": ("banyan4", "crossbar4"),
    "mesh8": ("banyan8", "crossbar8"),
}

# (topology, competitor, case) -> reported crossover data period in ps
PUBLISHED_CROSSOVERS: Dict[Tuple[str, str, str], int] = {
    ("router2", "binary", "uniform"): 300,
    ("butterfly4", "binary", "best"): 450,
    ("butterfly4", "binary", "uniform"): 930,
    ("butterfly4", "binary", "worst"): 1890,
    ("butterfly4", "srnoc", "best"): 960,
    ("butterfly4", "srnoc", "worst"): 465,
    ("mesh8", "binary", "worst"): 360,
    ("mesh8", "binary", "uniform"): 255,
    ("mesh8", "binary", "best"): 255,
}

# Reported only, never used in a curve.
POWER_CONSTANTS = {
    "router_static_uw": 665.56,
    "router_dynamic_worst_nw": 195.0,
    "binary2x2_static_mw": 1.4,
}


def competitor(topology: str, name: str, case: str = "uniform") -> BaselineSpec:
    """
    Resolve a competitor name for ``topology``.

    ``"binary"`` picks the binary baseline with the highest goodput among the
    topology's competitors; any catalog key is returned as is.
    """
    if name == "binary":
        if topology not in BINARY_COMPETITORS:
            raise ValueError(
                f"Invalid value for 'topology': '{topology}'. Must be one of {sorted(BINARY_COMPETITORS)}"
            )
        return max((BASELINES[b] for b in BINARY_COMPETITORS[topology]), key=lambda spec: spec.goodput(case))
    validate_in_set(name, "baseline", list(BASELINES) + ["binary"], "competitor")
    return BASELINES[name]


def baseline_catalog() -> List[Dict[str, object]]:
    return [
        {"name": b.name, "jj_count": b.jj_count, "gbps_per_port": round(b.throughput_gbps, 4),
         "description": b.description, **{f"factor_{c}": b.case_factors.get(c, 1.0) for c in CASES}}
        for b in BASELINES.values()
    ]
