# router/behavioral.py
"""
Epoch-level behavioral model of the 2x2 router.

One call to ``route_epoch`` arbitrates one epoch: each packet requests the
top output (output A) when its control slot is at or before the threshold
slot, the first arriving control pulse is served first, and the loser of a
conflict is deflected to the other output. Round robin swaps the serving
order on every second conflict.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, FrozenSet, Optional, Tuple

from packet.epoch import EpochConfig, Packet
from validators.config_input import validate_router_input
from validators.errors import UnsupportedPolicy


class Policy(str, Enum):
    FIXED_PRIORITY = "fixed_priority"
    ROUND_ROBIN = "round_robin"
    RANDOMIZED_RR = "randomized_rr"

    @classmethod
    def parse(cls, value) -> "Policy":
        if isinstance(value, Policy):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise UnsupportedPolicy(
                f"Invalid value for 'policy': '{value}'. Must be one of {sorted(p.value for p in cls)}"
            ) from None


@dataclass(frozen=True)
class RouterConfig:
    """
    Static router configuration.

    ``top_slots`` overrides the threshold rule for routers whose top-output
    destinations are not a prefix of the control slots.
    """

    policy: Policy
    thr_slot: int
    epoch_cfg: EpochConfig
    top_slots: Optional[FrozenSet[int]] = None

    def __post_init__(self):
        object.__setattr__(self, "policy", Policy.parse(self.policy))
        validate_router_input(self.policy.value, self.thr_slot, self.epoch_cfg.num_destinations)
        if self.top_slots is not None:
            object.__setattr__(self, "top_slots", frozenset(self.top_slots))

    @property
    def input_delay(self) -> int:
        """Shift-register stages that delay data by one control period."""
        return self.epoch_cfg.control_period // self.epoch_cfg.data_spacing

    @property
    def control_schedule(self):
        from router.netlist import control_schedule

        return control_schedule(self)

    def requests_top(self, destination: int) -> bool:
        if self.top_slots is not None:
            return destination in self.top_slots
        return destination <= self.thr_slot


@dataclass
class RouterState:
    rr_phase: int = 0
    ndro_config: Optional[str] = None
    prng_hookup: Optional[Callable[[], bool]] = field(default=None, repr=False)


@dataclass(frozen=True)
class RoutingDecision:
    straight: Optional[bool]
    conflict: bool = False
    flipped: bool = False
    winner: Optional[str] = None
    deflected: Optional[str] = None

    @property
    def setting(self) -> Optional[str]:
        if self.straight is None:
            return None
        return "S1" if self.straight else "S2"


def route_epoch(cfg: RouterConfig, state: RouterState, a: Optional[Packet], b: Optional[Packet],
                rand_bit: Optional[bool] = None) -> Tuple[RoutingDecision, Optional[Packet], Optional[Packet]]:
    """
    Arbitrate one epoch.

    Args:
        cfg: router configuration.
        state: mutable round-robin state (updated in place).
        a: packet on input A, if any.
        b: packet on input B, if any.
        rand_bit: randomized round robin only; drawn from ``state.prng_hookup``
            when not given.

    Returns:
        (decision, out_a, out_b): out_a is the top output.
    """
    randomized = cfg.policy is Policy.RANDOMIZED_RR
    if randomized and rand_bit is None:
        rand_bit = bool(state.prng_hookup()) if state.prng_hookup is not None else False
    rand_bit = bool(rand_bit) and randomized

    if a is None and b is None:
        _advance_phase(state, conflict=False, rand_bit=rand_bit)
        state.ndro_config = None
        return RoutingDecision(straight=None), None, None

    if a is None or b is None:
        only, name = (a, "A") if b is None else (b, "B")
        top = cfg.requests_top(only.destination)
        straight = top if name == "A" else not top
        _advance_phase(state, conflict=False, rand_bit=rand_bit)
        return _emit(state, RoutingDecision(straight=straight), a, b)

    req_a = cfg.requests_top(a.destination)
    req_b = cfg.requests_top(b.destination)
    conflict = req_a == req_b
    first = "A" if a.destination <= b.destination else "B"

    flipped = False
    if conflict and cfg.policy is not Policy.FIXED_PRIORITY and not rand_bit:
        flipped = state.rr_phase == 1
    _advance_phase(state, conflict=conflict and cfg.policy is not Policy.FIXED_PRIORITY, rand_bit=rand_bit)

    top_for_first = (req_a if first == "A" else req_b) != flipped
    straight = top_for_first if first == "A" else not top_for_first

    winner = deflected = None
    if conflict:
        a_gets_top = straight
        a_won = a_gets_top == req_a
        winner, deflected = ("A", "B") if a_won else ("B", "A")
    decision = RoutingDecision(straight=straight, conflict=conflict, flipped=flipped,
                               winner=winner, deflected=deflected)
    return _emit(state, decision, a, b)


def _advance_phase(state: RouterState, conflict: bool, rand_bit: bool) -> None:
    # the conflict pulse and the random pulse each toggle the round-robin TFF once
    state.rr_phase ^= int(conflict) ^ int(rand_bit)


def _emit(state: RouterState, decision: RoutingDecision, a: Optional[Packet],
          b: Optional[Packet]) -> Tuple[RoutingDecision, Optional[Packet], Optional[Packet]]:
    state.ndro_config = decision.setting
    if decision.straight:
        return decision, a, b
    return decision, b, a


class BehavioralRouter:
    """A ``RouterConfig`` bound to its own ``RouterState``."""

    def __init__(self, cfg: RouterConfig, state: Optional[RouterState] = None):
        self.cfg = cfg
        self.state = state if state is not None else RouterState()

    def route(self, a: Optional[Packet], b: Optional[Packet], rand_bit: Optional[bool] = None):
        return route_epoch(self.cfg, self.state, a, b, rand_bit)
