# router/netlist.py
"""
Structural 2x2 router built from RSFQ cells.

Blocks (module tags used in the JJ report):

    misc                front-end splitters, input gates, timing fan-out,
                        shift-register clock distribution (charged, not simulated)
    shift_register      one flux shift register per input (one control period)
    conflict_detection  clocked AND + TFF; the TFF's second output is C
    routing_stage1      NDRO pairs steering E3/ThrM/E4 into normal or swapped windows
    routing_stage2      first-arrival token (DFF2) + window NDROs producing S1/S2
    crossbar            four NDROs behind a delayed data path
    resettable_la       two DFF2 + merger; fires the crossbar reset once per epoch
    randomization       rand-bit gate on C (randomized round robin only)
    priority_logic      fixed priority: two facing DFF2 and inhibit cells

Three layouts share the front end, crossbar and resettable LA:

    threshold       arbitrated, top destinations are slots 1..thr. Thr clocks
                    the AND for the top class, E2 for the bottom class.
    class_windows   arbitrated, any other top set. The control-domain class of
                    each request is steered by NDRO windows (ClsUp / ClsDn) into
                    one AND per class; ThrM / ThrU pulse at every class boundary
                    of the routing windows.
    fixed_priority  threshold routing without arbitration state. The left DFF2
                    serves the first arrival before ThrM; ThrM passes inhibit
                    cell 2 only when nothing arrived, drains the left DFF2 and
                    arms the right DFF2, which serves the first later arrival
                    with the outputs crossed.

Timing pulses per epoch (router-local ps) are computed by ``control_schedule``
from the path latencies below so that the first-arrival pulse lands inside the
right routing window and the crossbar is set before the first packet reaches it.
"""
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from cells.primitives import (
    DEFAULT_DELAYS_PS,
    DFF2,
    JTL,
    NDRO,
    TFF,
    AndClocked,
    CellKind,
    Inhibit,
    Merger,
    ShiftRegister,
    Splitter,
    jj_count_of,
)
from engine.kernel import Endpoint, Netlist
from packet.epoch import EpochConfig
from router.behavioral import Policy, RouterConfig
from validators.errors import InvalidGeometry

SPL = DEFAULT_DELAYS_PS[CellKind.SPLITTER]
MRG = DEFAULT_DELAYS_PS[CellKind.MERGER]
NDRO_D = DEFAULT_DELAYS_PS[CellKind.NDRO]
DFF2_D = DEFAULT_DELAYS_PS[CellKind.DFF2]
JTL_D = DEFAULT_DELAYS_PS[CellKind.JTL]
INH_D = DEFAULT_DELAYS_PS[CellKind.INHIBIT]

THRESHOLD = "threshold"
CLASS_WINDOWS = "class_windows"
FIXED_PRIORITY = "fixed_priority"

# -----------------------------
# CALIBRATION FIXTURE
# -----------------------------
# Per-instance delay overrides (ps) that bring the composed modules onto the
# characterised module delays. Input B's front end is 1 ps slower than A's
# so that simultaneous control pulses resolve in favour of A.
CALIBRATION: Dict[str, int] = {
    "front_a": 8,
    "front_b": 9,
    "tap": 9,
    "sr_overhead": 12,
    "and": 21,
    "tff": 20,
    "rla_dff2": 20,
    "xbar_jtl_segments": 7,
    "priority_xbar_jtl_segments": 9,
    "reset_jtl_segments": 1,
    "rand_jtl_segments": 3,
}

# Characterised JJ count and path delay (ps) per module of the round-robin router.
CHARACTERISED_MODULES: Dict[str, Tuple[Optional[int], Optional[float]]] = {
    "conflict_detection": (27, 40.95),
    "routing_stage1": (87, 50.0),
    "routing_stage2": (91, 41.06),
    "crossbar": (89, 33.9),
    "resettable_la": (34, 28.95),
    "shift_register": (44, 162.17),
    "misc": (109, None),
    "total": (481, None),
    "in_to_out": (None, 213.41),
}
RANDOMIZATION_JJ = 24
CHARACTERISED_JJ: Dict[Policy, int] = {
    Policy.ROUND_ROBIN: 481,
    Policy.RANDOMIZED_RR: 481 + RANDOMIZATION_JJ,
}

# Two destinations, 50 ps control slots: a 150 ps control period and ten 15 ps register stages.
REFERENCE_EPOCH = EpochConfig(num_destinations=2, control_slot=50, data_spacing=15, data_period=300)

# E3 to crossbar reset: resettable LA, reset JTL, reset fan-out
RESET_LAT = 2 * SPL + CALIBRATION["rla_dff2"] + MRG + CALIBRATION["reset_jtl_segments"] * JTL_D + 2 * SPL


@dataclass(frozen=True)
class ControlSchedule:
    """Per-epoch pulse times (router-local ps) of every timing input."""

    pulses: Dict[str, Tuple[int, ...]]

    def first(self, pin: str) -> Optional[int]:
        times = self.pulses.get(pin)
        return times[0] if times else None

    @property
    def e1(self) -> Optional[int]:
        return self.first("e1")

    @property
    def thr(self) -> Optional[int]:
        return self.first("thr")

    @property
    def e2(self) -> Optional[int]:
        return self.first("e2")

    @property
    def e3(self) -> Optional[int]:
        return self.first("e3")

    @property
    def thr_m(self) -> Optional[int]:
        return self.first("thr_m")

    @property
    def e4(self) -> Optional[int]:
        return self.first("e4")

    @property
    def rnd(self) -> Optional[int]:
        return self.first("rnd")

    def as_dict(self) -> Dict[str, List[int]]:
        return {pin: list(times) for pin, times in self.pulses.items()}


# -----------------------------
# LAYOUT
# -----------------------------
def request_classes(cfg: RouterConfig) -> List[bool]:
    """Top/bottom request class of each control slot 1..D."""
    return [cfg.requests_top(s) for s in range(1, cfg.epoch_cfg.num_destinations + 1)]


def class_boundaries(cfg: RouterConfig) -> List[Tuple[int, str]]:
    """(b, kind) for every slot b whose class differs from slot b+1; kind is 'dn' (top->bottom) or 'up'."""
    cls = request_classes(cfg)
    return [(b, "dn" if cls[b - 1] else "up") for b in range(1, len(cls)) if cls[b - 1] != cls[b]]


def effective_threshold(cfg: RouterConfig) -> Optional[int]:
    """Threshold slot when the top set is slots 1..thr with 1 <= thr <= D-1, else None."""
    bounds = class_boundaries(cfg)
    if len(bounds) == 1 and bounds[0][1] == "dn":
        return bounds[0][0]
    return None


def router_layout(cfg: RouterConfig) -> str:
    if cfg.policy is Policy.FIXED_PRIORITY:
        return FIXED_PRIORITY
    return THRESHOLD if effective_threshold(cfg) is not None else CLASS_WINDOWS


# -----------------------------
# TIMING MODEL
# -----------------------------
def _sr_quantization(arrival: int, phase: int, period: int) -> int:
    edge = phase + math.ceil((arrival - phase) / period) * period
    return edge - arrival


def tap_arrivals(cfg: RouterConfig) -> Dict[int, int]:
    """Time at which input A's control pulse leaves the register tap, per control slot."""
    ecfg = cfg.epoch_cfg
    sr_latency = ecfg.control_period + CALIBRATION["sr_overhead"]
    phase = CALIBRATION["front_a"] % ecfg.data_spacing
    arrivals = {}
    for s in range(1, ecfg.num_destinations + 1):
        c = ecfg.control_offset(s) + CALIBRATION["front_a"]
        q = _sr_quantization(c, phase, ecfg.data_spacing)
        arrivals[s] = c + q + sr_latency + CALIBRATION["tap"]
    return arrivals


def window_arrivals(cfg: RouterConfig) -> Dict[int, int]:
    """Time at which input A's first-arrival pulse reaches the window NDROs, per control slot."""
    return {s: t + DFF2_D + SPL for s, t in tap_arrivals(cfg).items()}


def _class_arrival(cfg: RouterConfig, slot: int, front: int) -> int:
    # control pulse at the class-window NDRO clock: front, input gate, class splitter
    return cfg.epoch_cfg.control_offset(slot) + front + NDRO_D + SPL


def _prev_data_at_tap(cfg: RouterConfig) -> int:
    """Last data pulse of the previous epoch at input B's register tap (the later input)."""
    ecfg = cfg.epoch_cfg
    return ecfg.control_period - ecfg.data_spacing + CALIBRATION["front_b"] + CALIBRATION["sr_overhead"] + CALIBRATION["tap"]


def _check_shape(cfg: RouterConfig) -> str:
    ecfg = cfg.epoch_cfg
    d = ecfg.num_destinations
    if d < 2:
        raise InvalidGeometry(f"the pulse-level router needs at least 2 destinations, got {d}")
    if ecfg.control_period % ecfg.data_spacing:
        raise InvalidGeometry(
            f"control period ({ecfg.control_period} ps) must be a whole number of {ecfg.data_spacing} ps register stages"
        )
    if ecfg.control_slot - ecfg.control_slot // 2 <= ecfg.data_spacing:
        raise InvalidGeometry(
            f"control_slot {ecfg.control_slot} ps too short: register quantization would move pulses across slots"
        )
    bounds = class_boundaries(cfg)
    if not bounds:
        if cfg.top_slots is None:
            raise InvalidGeometry(f"thr_slot in router netlist out of range: {cfg.thr_slot} (expected between 1 and {d - 1})")
        raise InvalidGeometry("the pulse-level router needs destinations on both outputs (top_slots covers all or none)")
    layout = router_layout(cfg)
    if cfg.policy is Policy.FIXED_PRIORITY and effective_threshold(cfg) is None:
        raise InvalidGeometry("the fixed-priority router supports threshold routing only (top slots 1..thr)")
    return layout


def control_schedule(cfg: RouterConfig) -> ControlSchedule:
    """
    Router-local timing pulses for one epoch.

    Raises:
        InvalidGeometry: the epoch geometry leaves no room for a consistent schedule.
    """
    layout = _check_shape(cfg)
    if layout == FIXED_PRIORITY:
        pulses, problems = _priority_schedule(cfg)
    else:
        pulses, problems = _arbitrated_schedule(cfg, layout)
    schedule = ControlSchedule(pulses)
    problems += _common_margins(cfg, schedule)
    if problems:
        raise InvalidGeometry("router schedule infeasible for " f"{cfg.epoch_cfg}: " + "; ".join(problems))
    return schedule


def _boundary_latency(kinds: int) -> int:
    # ThrM/ThrU: input splitter, NDRO, normal/swapped splitter, merger chain, window splitter
    return 3 * SPL + NDRO_D + kinds * MRG


def _arbitrated_schedule(cfg: RouterConfig, layout: str) -> Tuple[Dict[str, Tuple[int, ...]], List[str]]:
    ecfg = cfg.epoch_cfg
    slot, d = ecfg.control_slot, ecfg.num_destinations
    fa, fb = CALIBRATION["front_a"], CALIBRATION["front_b"]
    t_w = window_arrivals(cfg)
    bounds = class_boundaries(cfg)
    kinds = len({kind for _, kind in bounds})
    lat_e3 = 4 * SPL + NDRO_D + MRG
    lat_e4 = 3 * SPL + NDRO_D + MRG
    lat_b = _boundary_latency(kinds)
    problems: List[str] = []

    win_open = t_w[1] - slot // 2
    win_close = t_w[d] + 1 + slot // 2
    pulses: Dict[str, Tuple[int, ...]] = {
        "e1": (0,),
        "e2": (d * slot,),
        "e3": (win_open - lat_e3,),
        "e4": (win_close - lat_e4,),
    }
    window_edges = {kind: tuple((t_w[b] + 1 + t_w[b + 1]) // 2 - lat_b for b, k in bounds if k == kind)
                    for kind in ("dn", "up")}
    pulses["thr_m"] = window_edges["dn"]
    if window_edges["up"]:
        pulses["thr_u"] = window_edges["up"]

    if layout == THRESHOLD:
        thr = effective_threshold(cfg)
        pulses["thr"] = (thr * slot,)
        if cfg.policy is Policy.RANDOMIZED_RR:
            pulses["rnd"] = (thr * slot,)
        # threshold clock must separate top requests from bottom requests at the AND
        thr_clock = thr * slot + MRG
        last_top = ecfg.control_offset(thr) + fb + NDRO_D
        first_bottom = ecfg.control_offset(thr + 1) + fa + NDRO_D
        if not last_top < thr_clock < first_bottom:
            problems.append("threshold clock does not separate the request classes")
        c_latest = d * slot + 2 * SPL + MRG + CALIBRATION["and"] + CALIBRATION["tff"] + 3 * SPL
    else:
        cls = request_classes(cfg)
        # class windows open at epoch start and flip at every boundary (2-level fan to four NDROs)
        starts = {"up": [0] if cls[0] else [], "dn": [] if cls[0] else [0]}
        targets = [(_class_arrival(cfg, b, fb) + 1 + _class_arrival(cfg, b + 1, fa)) // 2 for b, _ in bounds]
        for (b, kind), target in zip(bounds, targets):
            starts[kind].append(target - 2 * SPL)
        pulses["cls_up"] = tuple(starts["up"])
        pulses["cls_dn"] = tuple(starts["dn"])
        if cfg.policy is Policy.RANDOMIZED_RR:
            pulses["rnd"] = (slot,)
        if 2 * SPL >= _class_arrival(cfg, 1, fa):
            problems.append("class windows open after the first control pulse")
        for b, _kind in bounds:
            edge = pulses["cls_up" if _kind == "up" else "cls_dn"]
            t = min(x for x in edge if x > 0 and x + 2 * SPL > _class_arrival(cfg, b, fb)) + 2 * SPL
            if not _class_arrival(cfg, b, fb) < t < _class_arrival(cfg, b + 1, fa):
                problems.append(f"class boundary after slot {b} at {t} ps overlaps a control pulse")
        and_clock = d * slot + 3 * SPL
        if and_clock <= _class_arrival(cfg, d, fb) + NDRO_D:
            problems.append(f"class AND clocked at {and_clock} ps before the last request is stored")
        c_latest = d * slot + 3 * SPL + CALIBRATION["and"] + MRG + CALIBRATION["tff"] + 3 * SPL

    if cfg.policy is Policy.RANDOMIZED_RR:
        c_latest += MRG + NDRO_D
    e3 = pulses["e3"][0]
    if e3 + 3 * SPL <= c_latest:
        problems.append(f"conflict pulse arrives at {c_latest} ps, after E3 clocks stage 1 at {e3 + 3 * SPL} ps")

    # token must be loaded after last epoch's data and before this epoch's first pulse
    token_load = e3 + 2 * SPL
    prev = _prev_data_at_tap(cfg)
    first_at_token = t_w[1] - DFF2_D - SPL
    if not prev < token_load < first_at_token:
        problems.append(f"token load at {token_load} ps outside ({prev}, {first_at_token})")

    # crossbar reset between last epoch's data and this epoch's crossbar setting
    xbar_reset = e3 + RESET_LAT
    prev_data_at_xbar = prev + CALIBRATION["xbar_jtl_segments"] * JTL_D + SPL
    xbar_set = t_w[1] + NDRO_D + MRG + SPL
    if not prev_data_at_xbar < xbar_reset < xbar_set:
        problems.append(f"crossbar reset at {xbar_reset} ps outside ({prev_data_at_xbar}, {xbar_set})")
    return pulses, problems


def _priority_schedule(cfg: RouterConfig) -> Tuple[Dict[str, Tuple[int, ...]], List[str]]:
    ecfg = cfg.epoch_cfg
    slot, d = ecfg.control_slot, ecfg.num_destinations
    thr = effective_threshold(cfg)
    skew = CALIBRATION["front_b"] - CALIBRATION["front_a"]
    xbar_path = SPL + CALIBRATION["priority_xbar_jtl_segments"] * JTL_D + SPL
    t_a = tap_arrivals(cfg)
    t_left = {s: t + MRG for s, t in t_a.items()}
    problems: List[str] = []

    # S from the left DFF2: output 1 passes inhibit 3, output 2 goes straight to its splitter
    s_left_a = MRG + DFF2_D + INH_D + SPL + MRG + SPL
    s_left_b = skew + MRG + DFF2_D + SPL + MRG + SPL
    s_right = SPL + NDRO_D + DFF2_D + MRG + SPL

    prev = _prev_data_at_tap(cfg)
    prev_at_left = prev + MRG
    prev_at_xbar = prev + xbar_path
    earliest_set = t_a[1] + min(s_left_a, s_left_b)
    lo = max(prev_at_left - SPL, prev_at_xbar - RESET_LAT)
    hi = min(t_left[1] - SPL, earliest_set - RESET_LAT)
    e3 = (lo + hi) // 2
    if not lo < e3 < hi:
        problems.append(f"no room to load the left DFF2 and reset the crossbar between {lo} and {hi} ps")

    # ThrM after the left DFF2 fired for the last early slot, before the drain meets the first late slot
    fired = max(DFF2_D + INH_D + SPL + MRG, skew + DFF2_D + SPL + MRG)
    t_lo = t_left[thr] + fired
    t_hi = min(t_left[thr + 1] - (INH_D + 2 * SPL + MRG), t_a[thr + 1] + SPL - (INH_D + 3 * SPL))
    thr_m = (t_lo + t_hi) // 2
    if not t_lo < thr_m < t_hi:
        problems.append(f"ThrM has no room between slot {thr} and slot {thr + 1} ({t_lo}, {t_hi})")

    if max(s_left_a, s_left_b - skew, s_right) >= xbar_path:
        problems.append("crossbar setting arrives after the packet's control pulse")

    # E4 closes the late gates after the last control slot
    e4 = window_arrivals(cfg)[d] + 1 + slot // 2 - 2 * SPL
    if e4 + 2 * SPL <= t_a[d] + skew + SPL:
        problems.append("late gates close before the last control slot")
    return {"e1": (0,), "e3": (e3,), "thr_m": (thr_m,), "e4": (e4,)}, problems


def _common_margins(cfg: RouterConfig, sch: ControlSchedule) -> List[str]:
    # E4 must clear stage 1 and the resettable LA before the next epoch's E1
    if sch.e4 + 2 * SPL + NDRO_D >= cfg.epoch_cfg.epoch:
        return [f"E4 at {sch.e4} ps does not fit a {cfg.epoch_cfg.epoch} ps epoch; lengthen the data period"]
    return []


def module_delays(cfg: RouterConfig) -> Dict[str, Dict[str, Optional[float]]]:
    """Static path delay of each module next to its characterised value."""
    ecfg = cfg.epoch_cfg
    if cfg.policy is Policy.FIXED_PRIORITY:
        crossbar = SPL + CALIBRATION["priority_xbar_jtl_segments"] * JTL_D + SPL + NDRO_D + MRG
    else:
        crossbar = CALIBRATION["xbar_jtl_segments"] * JTL_D + SPL + NDRO_D + MRG
    sr = ecfg.control_period + CALIBRATION["sr_overhead"]
    measured = {
        "conflict_detection": CALIBRATION["and"] + CALIBRATION["tff"],
        "routing_stage1": SPL + NDRO_D + SPL + MRG,
        "routing_stage2": DFF2_D + SPL + NDRO_D + MRG + SPL,
        "crossbar": crossbar,
        "resettable_la": SPL + CALIBRATION["rla_dff2"] + MRG,
        "shift_register": sr,
        "in_to_out": CALIBRATION["front_a"] + sr + CALIBRATION["tap"] + crossbar,
    }
    return {name: {"measured_ps": value, "characterised_ps": CHARACTERISED_MODULES[name][1]} for name, value in measured.items()}


def propagation_delay(cfg: RouterConfig) -> int:
    """Input-A to output delay of every pulse whose arrival sits on the register clock grid."""
    return int(module_delays(cfg)["in_to_out"]["measured_ps"])


def input_b_delay(cfg: RouterConfig) -> int:
    """Input-B to output delay; B's front end is slower than A's."""
    return propagation_delay(cfg) + CALIBRATION["front_b"] - CALIBRATION["front_a"]


# -----------------------------
# BUILDER
# -----------------------------
class _Builder:
    def __init__(self, name: str):
        self.net = Netlist(name=name)

    def add(self, cell):
        return self.net.add_cell(cell)

    def wire(self, src: Endpoint, dst: Endpoint) -> str:
        return self.net.connect(src, dst)

    def fan(self, src: Endpoint, sinks: Sequence[Endpoint], prefix: str, module: str) -> None:
        """Balanced splitter tree from ``src`` to every sink (len(sinks) - 1 splitters)."""
        if len(sinks) == 1:
            self.wire(src, sinks[0])
            return
        split = self.add(Splitter(f"{prefix}", module=module))
        self.wire(src, (split.name, "in"))
        half = (len(sinks) + 1) // 2
        self.fan((split.name, "out1"), sinks[:half], f"{prefix}0", module)
        self.fan((split.name, "out2"), sinks[half:], f"{prefix}1", module)

    def merge_chain(self, sources: Sequence[Endpoint], sink: Endpoint, prefix: str, module: str) -> None:
        """Merger chain; the last source passes one merger, earlier ones pass more."""
        acc = sources[0]
        for i, src in enumerate(sources[1:]):
            merger = self.add(Merger(prefix if i == len(sources) - 2 else f"{prefix}{i + 1}", module=module))
            self.wire(acc, (merger.name, "in1"))
            self.wire(src, (merger.name, "in2"))
            acc = (merger.name, "out")
        self.wire(acc, sink)


def build_router_netlist(cfg: RouterConfig, jitter_ps: int = 0, name: str = "router",
                         time_offset: int = 0) -> Tuple[Netlist, Dict[str, int]]:
    """
    Compose the router netlist for ``cfg``.

    Args:
        cfg: router configuration.
        jitter_ps: shift-register jitter bound.
        name: netlist name.
        time_offset: absolute time of the router's epoch start modulo the data
            spacing; aligns the register clock grid for routers placed
            downstream of other routers.

    Returns:
        (netlist, jj_report): the report holds JJs per module plus ``total``.
        ``netlist.meta`` carries the control schedule, layout, key wire names
        and the propagation delays of both inputs.

    Raises:
        UnsupportedPolicy: via ``RouterConfig``.
        InvalidGeometry: no feasible schedule for the epoch geometry.
    """
    schedule = control_schedule(cfg)
    layout = router_layout(cfg)
    ecfg = cfg.epoch_cfg
    policy = cfg.policy
    stages = ecfg.control_period // ecfg.data_spacing
    arbitrated = layout != FIXED_PRIORITY
    b = _Builder(name)
    net = b.net

    for pin in ("a_in", "b_in", "e1", "e3", "e4"):
        net.add_input(pin)
    for pin in schedule.pulses:
        if pin != "e1" and schedule.pulses[pin]:
            net.add_input(pin)
    net.add_output("out_a")
    net.add_output("out_b")

    # -----------------------------
    # front end and shift registers
    # -----------------------------
    for side, front in (("a", CALIBRATION["front_a"]), ("b", CALIBRATION["front_b"])):
        split = b.add(Splitter(f"{side}_front", delay=front))
        b.wire(f"{side}_in", (split.name, "in"))
        sr = b.add(ShiftRegister(f"sr_{side}", stages=stages, period=ecfg.data_spacing,
                                 phase=(front + time_offset) % ecfg.data_spacing,
                                 overhead=CALIBRATION["sr_overhead"], jitter_ps=jitter_ps))
        b.wire((split.name, "out1"), (sr.name, "in"))
        if arbitrated:
            gate = b.add(NDRO(f"gate_{side}"))
            b.wire((split.name, "out2"), (gate.name, "clk"))
        b.add(Splitter(f"{side}m", delay=CALIBRATION["tap"]))
        b.wire((sr.name, "out"), (f"{side}m", "in"))

    net.charge("sr_stage_clock", "misc", (2 * stages + 1) * jj_count_of(CellKind.SPLITTER))

    # -----------------------------
    # timing fan-out
    # -----------------------------
    b.add(Splitter("e3_split"))
    b.wire("e3", ("e3_split", "in"))
    b.add(Splitter("e4_split"))
    b.wire("e4", ("e4_split", "in"))

    # -----------------------------
    # resettable LA: fires once per epoch on the later of E1/E3, E4 clears it
    # -----------------------------
    rla = "resettable_la"
    b.add(DFF2("rla_x", delay=CALIBRATION["rla_dff2"], module=rla, unused_outputs=1))
    b.add(DFF2("rla_y", delay=CALIBRATION["rla_dff2"], module=rla, unused_outputs=1))
    b.add(Merger("rla_out", module=rla))
    b.add(Splitter("rla_xs", module=rla))
    b.add(Splitter("rla_ys", module=rla))
    b.add(Splitter("rla_rs", module=rla))
    b.wire(("rla_xs", "out1"), ("rla_x", "d"))
    b.wire(("rla_xs", "out2"), ("rla_y", "clk1"))
    b.wire(("rla_ys", "out1"), ("rla_y", "d"))
    b.wire(("rla_ys", "out2"), ("rla_x", "clk1"))
    b.wire(("rla_rs", "out1"), ("rla_x", "clk2"))
    b.wire(("rla_rs", "out2"), ("rla_y", "clk2"))
    b.wire(("rla_x", "out1"), ("rla_out", "in1"))
    b.wire(("rla_y", "out1"), ("rla_out", "in2"))
    b.wire(("e3_split", "out1"), ("rla_ys", "in"))
    b.wire(("e4_split", "out2"), ("rla_rs", "in"))

    if arbitrated:
        windows = _build_token_windows(b)
        data_src = {"a": ("am", "out2"), "b": ("bm", "out2")}
        segments = CALIBRATION["xbar_jtl_segments"]
    else:
        _build_priority(b)
        data_src = {"a": ("a_xtap", "out1"), "b": ("b_xtap", "out1")}
        segments = CALIBRATION["priority_xbar_jtl_segments"]
    _build_crossbar(b, data_src, segments)

    if arbitrated:
        c_source = _build_arbitration(b, cfg, layout, windows)
        st1_entry: Endpoint = ("st1_e1", "in")
        if policy is Policy.RANDOMIZED_RR:
            b.add(Splitter("rr_e1", module="randomization"))
            b.wire(("rr_e1", "out1"), st1_entry)
            b.wire(("rr_e1", "out2"), ("rr_gate", "set"))
            st1_entry = ("rr_e1", "in")
        b.fan("e1", [("gate_a", "set"), ("gate_b", "set"), ("rla_xs", "in"), st1_entry], "e1_fan", "misc")
    else:
        c_source = None
        b.wire("e1", ("rla_xs", "in"))

    pd_a = propagation_delay(cfg)
    net.meta.update({
        "policy": policy.value,
        "layout": layout,
        "schedule": schedule.as_dict(),
        "stages": stages,
        "time_offset": time_offset,
        "pd_a": pd_a,
        "pd_b": input_b_delay(cfg),
        "key_wires": {
            "S1": net.wire_from(("s1", "out")),
            "S2": net.wire_from(("s2", "out")),
            "C": net.wire_from(c_source) if c_source else None,
            "xbar_reset": net.wire_from(("reset_delay", "out")),
        },
    })
    return net, net.jj_report()


def _build_token_windows(b: _Builder) -> Dict[str, str]:
    """Routing stage 2: first-arrival token and routing windows; returns the window splitters."""
    st2 = "routing_stage2"
    b.add(DFF2("token", module=st2))
    b.add(Splitter("e3_token", module=st2))
    b.wire(("e3_split", "out2"), ("e3_token", "in"))
    b.wire(("e3_token", "out1"), ("token", "d"))
    b.wire(("am", "out1"), ("token", "clk1"))
    b.wire(("bm", "out1"), ("token", "clk2"))
    for side, port in (("a", "out1"), ("b", "out2")):
        b.add(Splitter(f"first_{side}", module=st2))
        b.wire(("token", port), (f"first_{side}", "in"))
        for w, out in (("w1", "out1"), ("w2", "out2")):
            b.add(NDRO(f"{side}_{w}", module=st2))
            b.wire((f"first_{side}", out), (f"{side}_{w}", "clk"))
    windows = {}
    for sig, port in (("w1set", "set"), ("w1reset", "reset"), ("w2set", "set"), ("w2reset", "reset")):
        win = sig[:2]
        split = b.add(Splitter(f"{sig}_split", module=st2))
        b.wire((split.name, "out1"), (f"a_{win}", port))
        b.wire((split.name, "out2"), (f"b_{win}", port))
        windows[sig] = split.name
    b.add(Merger("s1", module=st2))
    b.add(Merger("s2", module=st2))
    b.wire(("a_w1", "out"), ("s1", "in1"))
    b.wire(("b_w2", "out"), ("s1", "in2"))
    b.wire(("a_w2", "out"), ("s2", "in1"))
    b.wire(("b_w1", "out"), ("s2", "in2"))
    return windows


def _build_crossbar(b: _Builder, data_src: Dict[str, Endpoint], segments: int) -> None:
    xb = "crossbar"
    for side in ("a", "b"):
        b.add(JTL(f"{side}_delay", segments=segments, module=xb))
        b.wire(data_src[side], (f"{side}_delay", "in"))
        b.add(Splitter(f"{side}_data", module=xb))
        b.wire((f"{side}_delay", "out"), (f"{side}_data", "in"))
    for cross in ("aa", "ab", "ba", "bb"):
        b.add(NDRO(f"x_{cross}", module=xb))
    b.wire(("a_data", "out1"), ("x_aa", "clk"))
    b.wire(("a_data", "out2"), ("x_ab", "clk"))
    b.wire(("b_data", "out1"), ("x_ba", "clk"))
    b.wire(("b_data", "out2"), ("x_bb", "clk"))
    b.add(Splitter("s1_split", module=xb))
    b.add(Splitter("s2_split", module=xb))
    b.wire(("s1", "out"), ("s1_split", "in"))
    b.wire(("s2", "out"), ("s2_split", "in"))
    b.wire(("s1_split", "out1"), ("x_aa", "set"))
    b.wire(("s1_split", "out2"), ("x_bb", "set"))
    b.wire(("s2_split", "out1"), ("x_ab", "set"))
    b.wire(("s2_split", "out2"), ("x_ba", "set"))
    b.add(Merger("out_a_merge", module=xb))
    b.add(Merger("out_b_merge", module=xb))
    b.wire(("x_aa", "out"), ("out_a_merge", "in1"))
    b.wire(("x_ba", "out"), ("out_a_merge", "in2"))
    b.wire(("x_ab", "out"), ("out_b_merge", "in1"))
    b.wire(("x_bb", "out"), ("out_b_merge", "in2"))
    b.wire(("out_a_merge", "out"), "out_a")
    b.wire(("out_b_merge", "out"), "out_b")
    b.add(JTL("reset_delay", segments=CALIBRATION["reset_jtl_segments"], module=xb))
    b.wire(("rla_out", "out"), ("reset_delay", "in"))
    b.fan(("reset_delay", "out"), [("x_aa", "reset"), ("x_ab", "reset"), ("x_ba", "reset"), ("x_bb", "reset")],
          "xreset", xb)


def _build_conflict_detection(b: _Builder, layout: str) -> Endpoint:
    """Gated requests into the clocked AND(s); returns the conflict output."""
    cd = "conflict_detection"
    b.add(Splitter("e2_split0", module=cd))
    b.add(Splitter("e2_split1", module=cd))
    b.wire("e2", ("e2_split0", "in"))
    b.wire(("e2_split0", "out1"), ("gate_a", "reset"))
    b.wire(("e2_split0", "out2"), ("e2_split1", "in"))
    b.wire(("e2_split1", "out1"), ("gate_b", "reset"))

    if layout == THRESHOLD:
        b.add(AndClocked("cd_and", delay=CALIBRATION["and"], module=cd))
        b.add(Merger("cd_clock"))
        b.wire(("gate_a", "out"), ("cd_and", "a"))
        b.wire(("gate_b", "out"), ("cd_and", "b"))
        b.wire(("cd_clock", "out"), ("cd_and", "clk"))
        b.wire("thr", ("cd_clock", "in1"))
        b.wire(("e2_split1", "out2"), ("cd_clock", "in2"))
        return ("cd_and", "out")

    # one AND per request class; class windows steer each gated request
    for cls in ("top", "bot"):
        b.add(AndClocked(f"cd_and_{cls}", delay=CALIBRATION["and"], module=cd))
    for side, port in (("a", "a"), ("b", "b")):
        b.add(Splitter(f"cls_{side}", module=cd))
        b.wire((f"gate_{side}", "out"), (f"cls_{side}", "in"))
        for cls, out in (("top", "out1"), ("bot", "out2")):
            b.add(NDRO(f"cls_{side}_{cls}", module=cd))
            b.wire((f"cls_{side}", out), (f"cls_{side}_{cls}", "clk"))
            b.wire((f"cls_{side}_{cls}", "out"), (f"cd_and_{cls}", port))
    b.fan("cls_up", [("cls_a_top", "set"), ("cls_b_top", "set"), ("cls_a_bot", "reset"), ("cls_b_bot", "reset")],
          "cls_up_fan", cd)
    b.fan("cls_dn", [("cls_a_top", "reset"), ("cls_b_top", "reset"), ("cls_a_bot", "set"), ("cls_b_bot", "set")],
          "cls_dn_fan", cd)
    b.add(Splitter("cd_clock", module=cd))
    b.wire(("e2_split1", "out2"), ("cd_clock", "in"))
    b.wire(("cd_clock", "out1"), ("cd_and_top", "clk"))
    b.wire(("cd_clock", "out2"), ("cd_and_bot", "clk"))
    b.add(Merger("cd_or", module=cd))
    b.wire(("cd_and_top", "out"), ("cd_or", "in1"))
    b.wire(("cd_and_bot", "out"), ("cd_or", "in2"))
    return ("cd_or", "out")


# window signal fed by each normal/swapped output of a boundary signal
_BOUNDARY_ROUTES = {
    "dn": {("n", "out1"): "w1reset", ("n", "out2"): "w2set", ("f", "out1"): "w1set", ("f", "out2"): "w2reset"},
    "up": {("n", "out1"): "w2reset", ("n", "out2"): "w1set", ("f", "out1"): "w2set", ("f", "out2"): "w1reset"},
}
_BOUNDARY_SIGNALS = {"dn": ("thr", "thr_m"), "up": ("thru", "thr_u")}


def _build_arbitration(b: _Builder, cfg: RouterConfig, layout: str, windows: Dict[str, str]) -> Endpoint:
    """Conflict detection, optional rand gate and routing stage 1; returns the C source."""
    cd = "conflict_detection"
    cd_out = _build_conflict_detection(b, layout)
    b.add(TFF("cd_tff", delay=CALIBRATION["tff"], module=cd))

    if cfg.policy is Policy.RANDOMIZED_RR:
        rz = "randomization"
        b.add(Merger("rr_toggle", module=rz))
        b.add(NDRO("rr_gate", module=rz))
        b.add(Splitter("rnd_split", module=rz))
        b.add(JTL("rnd_delay", segments=CALIBRATION["rand_jtl_segments"], module=rz))
        b.wire(cd_out, ("rr_toggle", "in1"))
        b.wire("rnd", ("rnd_split", "in"))
        b.wire(("rnd_split", "out1"), ("rnd_delay", "in"))
        b.wire(("rnd_split", "out2"), ("rr_toggle", "in2"))
        b.wire(("rnd_delay", "out"), ("rr_gate", "reset"))
        b.wire(("rr_toggle", "out"), ("cd_tff", "in"))
        b.wire(("cd_tff", "out2"), ("rr_gate", "clk"))
        c_source: Endpoint = ("rr_gate", "out")
    else:
        b.wire(cd_out, ("cd_tff", "in"))
        c_source = ("cd_tff", "out2")

    st1 = "routing_stage1"
    kinds = [kind for kind in ("dn", "up") if any(k == kind for _, k in class_boundaries(cfg))]
    signals = ["e3"] + [_BOUNDARY_SIGNALS[kind][0] for kind in kinds] + ["e4"]
    for sig in signals:
        b.add(Splitter(f"{sig}_x", module=st1))
        b.add(NDRO(f"{sig}_n", module=st1))
        b.add(NDRO(f"{sig}_f", module=st1))
        b.wire((f"{sig}_x", "out1"), (f"{sig}_n", "clk"))
        b.wire((f"{sig}_x", "out2"), (f"{sig}_f", "clk"))
    b.wire(("e3_token", "out2"), ("e3_x", "in"))
    b.wire(("e4_split", "out1"), ("e4_x", "in"))
    b.add(Splitter("st1_e1", module=st1))
    b.fan(("st1_e1", "out1"), [(f"{sig}_n", "set") for sig in signals], "st1_e1n", st1)
    b.fan(("st1_e1", "out2"), [(f"{sig}_f", "reset") for sig in signals], "st1_e1f", st1)
    c_sinks = [(f"{sig}_n", "reset") for sig in signals] + [(f"{sig}_f", "set") for sig in signals]
    b.fan(c_source, c_sinks, "c_fan", st1)

    sources: Dict[str, List[Endpoint]] = {sig: [] for sig in windows}
    for kind in kinds:
        sig, pin = _BOUNDARY_SIGNALS[kind]
        b.wire(pin, (f"{sig}_x", "in"))
        for mode in ("n", "f"):
            split = b.add(Splitter(f"{sig}_{mode}_split", module=st1))
            b.wire((f"{sig}_{mode}", "out"), (split.name, "in"))
        for (mode, port), target in _BOUNDARY_ROUTES[kind].items():
            sources[target].append((f"{sig}_{mode}_split", port))

    # normal windows: W1 collects top-class slots, W2 bottom-class slots; swapped when C fired
    cls = request_classes(cfg)
    first_top, last_top = cls[0], cls[-1]
    sources["w1set" if first_top else "w2set"].append(("e3_n", "out"))
    sources["w2set" if first_top else "w1set"].append(("e3_f", "out"))
    sources["w1reset" if last_top else "w2reset"].append(("e4_n", "out"))
    sources["w2reset" if last_top else "w1reset"].append(("e4_f", "out"))
    for sig, srcs in sources.items():
        b.merge_chain(srcs, (windows[sig], "in"), f"{sig}_merge", "routing_stage2")
    return c_source


def _build_priority(b: _Builder) -> None:
    """Fixed priority: left DFF2 serves arrivals before ThrM, right DFF2 the first one after."""
    pl = "priority_logic"
    b.add(DFF2("prio_left", module=pl))
    b.add(DFF2("prio_right", module=pl))
    b.add(Merger("prio_left_a", module=pl))
    b.add(JTL("prio_left_b", segments=1, delay=MRG, module=pl))
    b.wire(("e3_split", "out2"), ("prio_left", "d"))
    b.wire(("am", "out1"), ("prio_left_a", "in1"))
    b.wire(("prio_left_a", "out"), ("prio_left", "clk1"))
    b.wire(("bm", "out1"), ("prio_left_b", "in"))
    b.wire(("prio_left_b", "out"), ("prio_left", "clk2"))

    b.add(Inhibit("prio_thr", module=pl))
    b.add(Inhibit("prio_drain", module=pl))
    b.add(Merger("prio_fired", module=pl))
    b.add(Splitter("prio_y1", module=pl))
    b.add(Splitter("prio_y2", module=pl))
    b.add(Merger("s1", module=pl))
    b.add(Merger("s2", module=pl))
    b.wire(("prio_left", "out1"), ("prio_drain", "in"))
    b.wire(("prio_drain", "out"), ("prio_y1", "in"))
    b.wire(("prio_left", "out2"), ("prio_y2", "in"))
    b.wire(("prio_y1", "out1"), ("s1", "in1"))
    b.wire(("prio_y2", "out1"), ("s2", "in1"))
    b.wire(("prio_y1", "out2"), ("prio_fired", "in1"))
    b.wire(("prio_y2", "out2"), ("prio_fired", "in2"))
    b.wire("thr_m", ("prio_thr", "in"))
    b.wire(("prio_fired", "out"), ("prio_thr", "inh"))

    # ThrM passed: arm inhibit 3, drain the left DFF2, load the right one, open the late gates
    for name in ("prio_t0", "prio_t1", "prio_t2", "prio_t3"):
        b.add(Splitter(name, module=pl))
    b.wire(("prio_thr", "out"), ("prio_t0", "in"))
    b.wire(("prio_t0", "out1"), ("prio_t1", "in"))
    b.wire(("prio_t0", "out2"), ("prio_t2", "in"))
    b.wire(("prio_t1", "out1"), ("prio_drain", "inh"))
    b.wire(("prio_t1", "out2"), ("prio_left_a", "in2"))
    b.wire(("prio_t2", "out1"), ("prio_right", "d"))
    b.wire(("prio_t2", "out2"), ("prio_t3", "in"))

    b.add(Splitter("late_reset", module=pl))
    b.wire(("e4_split", "out1"), ("late_reset", "in"))
    for side, setter, clk in (("a", "out1", "clk1"), ("b", "out2", "clk2")):
        b.add(Splitter(f"{side}_xtap", module=pl))
        b.add(NDRO(f"late_{side}", module=pl))
        b.wire((f"{side}m", "out2"), (f"{side}_xtap", "in"))
        b.wire((f"{side}_xtap", "out2"), (f"late_{side}", "clk"))
        b.wire(("prio_t3", setter), (f"late_{side}", "set"))
        b.wire(("late_reset", setter), (f"late_{side}", "reset"))
        b.wire((f"late_{side}", "out"), ("prio_right", clk))
    b.wire(("prio_right", "out1"), ("s2", "in2"))
    b.wire(("prio_right", "out2"), ("s1", "in2"))
