# validators/errors.py
"""
Domain errors for the PaST-NoC simulator.

Every error derives from ``PastNocError`` which is itself a ``ValueError``,
so code that guards a call with ``except ValueError`` (the convention of the
validator helpers) keeps catching them.
"""
from typing import Any, Dict, List, Optional


class PastNocError(ValueError):
    """Base class for every simulator error."""


# -----------------------------
# PULSE ENGINE
# -----------------------------
class SchedulingInPast(PastNocError):
    def __init__(self, time: int, now: int, wire: str = ""):
        self.time = time
        self.now = now
        self.wire = wire
        super().__init__(f"Cannot schedule pulse on '{wire}' at t={time} ps: simulation time is already {now} ps")


class FanoutError(PastNocError):
    """A wire would get a second driver or a second sink."""


class UnknownPort(PastNocError):
    def __init__(self, owner: str, port: str):
        self.owner = owner
        self.port = port
        super().__init__(f"Unknown port '{port}' on {owner}")


# -----------------------------
# PACKET FORMAT
# -----------------------------
class DestinationOutOfRange(PastNocError):
    pass


class SlotOutOfRange(PastNocError):
    pass


class NoControlPulse(PastNocError):
    pass


class MultipleControlPulses(PastNocError):
    pass


class PulseInForbiddenSlot(PastNocError):
    pass


class SpacingViolation(PastNocError):
    pass


class InvalidEpoch(PastNocError):
    """Epoch geometry that cannot host a packet (bad spacing, period or destinations)."""


# -----------------------------
# ROUTER / TOPOLOGY
# -----------------------------
class UnsupportedPolicy(PastNocError):
    pass


class ZeroState(PastNocError):
    pass


class InvalidSize(PastNocError):
    pass


class InvalidGeometry(PastNocError):
    pass


class MismatchReport(PastNocError):
    """Pulse-level netlist and behavioral model disagree on at least one epoch."""

    def __init__(self, mismatches: List[Dict[str, Any]], checked: int):
        self.mismatches = mismatches
        self.checked = checked
        first = mismatches[0] if mismatches else {}
        super().__init__(
            f"{len(mismatches)} of {checked} epochs differ between netlist and behavioral model (first: {first})"
        )


# -----------------------------
# TRAFFIC / MODELS / CONFIG
# -----------------------------
class InadmissiblePattern(PastNocError):
    pass


class NoCrossover(PastNocError):
    pass


class ConfigError(PastNocError):
    """Config problem, located by section/field and (when known) line number."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.message = message
        self.field = field
        self.line = line
        where = ""
        if field:
            where += f" [{field}]"
        if line is not None:
            where += f" (line {line})"
        super().__init__(f"{message}{where}")
