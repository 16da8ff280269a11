# packet/__init__.py
"""
Race-logic packet format.

Modules:
    epoch: EpochConfig, Packet, encode_packet, decode_packet
"""

__version__ = "0.1.0"
__author__ = "Cerevia Inc."
__license__ = "Proprietary"
__email__ = "research@cerevia.ai"

from .epoch import (
    DEFAULT_CONTROL_SLOT_PS,
    DEFAULT_DATA_SPACING_PS,
    EpochConfig,
    Packet,
    decode_packet,
    encode_packet,
)

__all__ = [
    # Geometry
    "EpochConfig",
    "DEFAULT_CONTROL_SLOT_PS",
    "DEFAULT_DATA_SPACING_PS",

    # Packets
    "Packet",
    "encode_packet",
    "decode_packet",
]
