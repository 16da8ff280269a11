# engine/__init__.py
"""
PaST-NoC pulse engine.

Deterministic discrete-event kernel that moves picosecond pulses between
RSFQ cell models over point-to-point wires.

Modules:
    kernel: PulseEvent, Netlist, Simulator
    trace: VCD and CSV trace export, collision-free VCD names
"""

__version__ = "0.1.0"
__author__ = "Cerevia Inc."
__license__ = "Proprietary"
__email__ = "research@cerevia.ai"

from .kernel import Netlist, PulseEvent, SimTime, Simulator
from .trace import trace_to_frame, vcd_names, write_csv, write_vcd

__all__ = [
    # Kernel
    "Netlist",
    "PulseEvent",
    "SimTime",
    "Simulator",

    # Trace export
    "trace_to_frame",
    "vcd_names",
    "write_csv",
    "write_vcd",
]
