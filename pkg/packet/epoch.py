# packet/epoch.py
"""
Epoch geometry and race-logic packet encode/decode.

An epoch is a control period of ``D + 1`` slots (one per destination plus
the empty slot t*) followed by a data period of ``n_data_slots`` slots of
``data_spacing`` ps. A packet is one control pulse in the slot of its
destination plus at most one data pulse per data slot.
"""
import logging
import re
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List

from validators.config_input import validate_epoch_input
from validators.errors import (
    DestinationOutOfRange,
    MultipleControlPulses,
    NoControlPulse,
    PulseInForbiddenSlot,
    SlotOutOfRange,
    SpacingViolation,
)

logger = logging.getLogger(__name__)

DEFAULT_CONTROL_SLOT_PS = 60
DEFAULT_DATA_SPACING_PS = 15


# -----------------------------
# EPOCH CONFIG
# -----------------------------
@dataclass(frozen=True)
class EpochConfig:
    num_destinations: int
    control_slot: int = DEFAULT_CONTROL_SLOT_PS
    data_spacing: int = DEFAULT_DATA_SPACING_PS
    data_period: int = 300

    def __post_init__(self):
        validate_epoch_input(self.num_destinations, self.control_slot, self.data_spacing, self.data_period)

    @property
    def control_period(self) -> int:
        return (self.num_destinations + 1) * self.control_slot

    @property
    def epoch(self) -> int:
        return self.control_period + self.data_period

    @property
    def n_data_slots(self) -> int:
        return self.data_period // self.data_spacing

    def control_offset(self, slot: int) -> int:
        """Slot-centre offset of control slot ``slot`` (1-based) from the epoch start."""
        return ((2 * (slot - 1) + 1) * self.control_slot) // 2

    def data_offset(self, slot: int) -> int:
        return self.control_period + (slot - 1) * self.data_spacing

    def with_data_period(self, data_period: int) -> "EpochConfig":
        return EpochConfig(self.num_destinations, self.control_slot, self.data_spacing, data_period)


# -----------------------------
# PACKET
# -----------------------------
_LITERAL = re.compile(r"^\s*dest\s*=\s*(\d+)\s+data\s*=\s*\[\s*([\d,\s]*)\]\s*$")


@dataclass(frozen=True)
class Packet:
    destination: int
    data_slots: FrozenSet[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if isinstance(self.destination, bool) or not isinstance(self.destination, int):
            raise DestinationOutOfRange(f"destination must be an integer, got {self.destination!r}")
        object.__setattr__(self, "data_slots", frozenset(self.data_slots))

    def validate(self, cfg: EpochConfig) -> None:
        if not 1 <= self.destination <= cfg.num_destinations:
            raise DestinationOutOfRange(
                f"destination {self.destination} out of range: expected between 1 and {cfg.num_destinations}"
            )
        bad = sorted(s for s in self.data_slots if not 1 <= s <= cfg.n_data_slots)
        if bad:
            raise SlotOutOfRange(f"data slots {bad} out of range: expected between 1 and {cfg.n_data_slots}")

    @classmethod
    def parse(cls, text: str) -> "Packet":
        """Parse a literal such as ``dest=3 data=[1,5,9]``."""
        match = _LITERAL.match(text)
        if not match:
            raise ValueError(f"Invalid packet literal: '{text}' (expected 'dest=<n> data=[i,j,...]')")
        slots = [int(tok) for tok in match.group(2).replace(",", " ").split()]
        if len(slots) != len(set(slots)):
            raise SlotOutOfRange(f"packet literal '{text}' repeats a data slot")
        return cls(int(match.group(1)), frozenset(slots))

    def literal(self) -> str:
        return f"dest={self.destination} data=[{','.join(str(s) for s in sorted(self.data_slots))}]"


# -----------------------------
# ENCODE / DECODE
# -----------------------------
def encode_packet(cfg: EpochConfig, pkt: Packet, epoch_start: int = 0) -> List[int]:
    """
    Pulse times of ``pkt`` in the epoch starting at ``epoch_start``.

    The control pulse sits at the centre of its slot; data slot ``k`` sits at
    ``control_period + (k - 1) * data_spacing``.
    """
    pkt.validate(cfg)
    times = [epoch_start + cfg.control_offset(pkt.destination)]
    times.extend(epoch_start + cfg.data_offset(k) for k in sorted(pkt.data_slots))
    return times


def decode_packet(cfg: EpochConfig, pulses: Iterable[int], epoch_start: int = 0, tolerance_ps: int = 0) -> Packet:
    """
    Inverse of ``encode_packet``.

    Args:
        cfg: epoch geometry.
        pulses: pulse times belonging to one epoch.
        epoch_start: start of that epoch.
        tolerance_ps: accepted distance of a data pulse from its slot grid
            point (skew absorbed when decoding router outputs).

    Raises:
        NoControlPulse, MultipleControlPulses, PulseInForbiddenSlot,
        SpacingViolation, SlotOutOfRange
    """
    rel = sorted(t - epoch_start for t in pulses)
    if any(r < 0 or r >= cfg.epoch for r in rel):
        raise SlotOutOfRange(f"pulses {rel} (relative ps) fall outside the {cfg.epoch} ps epoch")

    control = [r for r in rel if r < cfg.control_period]
    data = [r for r in rel if r >= cfg.control_period]
    if not control:
        raise NoControlPulse("no pulse in the control period")
    if len(control) > 1:
        raise MultipleControlPulses(f"{len(control)} pulses in the control period at {control} ps")
    destination = control[0] // cfg.control_slot + 1
    if destination == cfg.num_destinations + 1:
        raise PulseInForbiddenSlot(f"control pulse at {control[0]} ps lies in the empty slot t*")

    for prev, cur in zip(data, data[1:]):
        if cur - prev < cfg.data_spacing - 2 * tolerance_ps:
            raise SpacingViolation(f"data pulses {cur - prev} ps apart (minimum {cfg.data_spacing} ps)")

    slots = set()
    for r in data:
        offset = r - cfg.control_period
        k = round(offset / cfg.data_spacing) + 1
        if abs(offset - (k - 1) * cfg.data_spacing) > tolerance_ps:
            raise SlotOutOfRange(f"data pulse at {r} ps is off the {cfg.data_spacing} ps slot grid")
        if not 1 <= k <= cfg.n_data_slots:
            raise SlotOutOfRange(f"data slot {k} out of range: expected between 1 and {cfg.n_data_slots}")
        slots.add(k)
    return Packet(destination, frozenset(slots))
