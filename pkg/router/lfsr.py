# router/lfsr.py
"""
Galois LFSR used as the random-bit source of randomized round robin.

Each bit position of one multi-bit register can feed a different router, so
a single register drives many routers with distinct streams.
"""
from typing import Dict, List, Sequence, Tuple

from validators.errors import ZeroState

# x^8 + x^6 + x^5 + x^4 + 1
DEFAULT_TAPS: Tuple[int, ...] = (8, 6, 5, 4)


def taps_to_mask(taps: Sequence[int]) -> int:
    """Toggle mask of a right-shifting Galois register for the given polynomial exponents."""
    mask = 0
    for p in taps:
        if p < 1:
            raise ValueError(f"tap exponents must be >= 1, got {p}")
        mask |= 1 << (p - 1)
    return mask


def lfsr_next(state: int, taps: Sequence[int] = DEFAULT_TAPS) -> Tuple[int, int]:
    """
    One Galois step.

    Returns:
        (bit, state): the output bit (old LSB) and the next register state.

    Raises:
        ZeroState: the all-zero state never leaves itself.
    """
    if state == 0:
        raise ZeroState("LFSR state must be nonzero")
    bit = state & 1
    state >>= 1
    if bit:
        state ^= taps_to_mask(taps)
    return bit, state


class Lfsr:
    """Stateful wrapper around ``lfsr_next``."""

    def __init__(self, seed: int = 0x01, taps: Sequence[int] = DEFAULT_TAPS):
        self.width = max(taps)
        if not 0 < seed < (1 << self.width):
            raise ZeroState(f"seed must be nonzero and fit in {self.width} bits, got {seed:#x}")
        self.taps = tuple(taps)
        self.register = seed

    def step(self) -> int:
        bit, self.register = lfsr_next(self.register, self.taps)
        return bit

    def bits(self, n: int) -> list:
        return [self.step() for _ in range(n)]

    def bit_streams(self, positions: Sequence[int], n: int) -> Dict[int, List[bool]]:
        """
        Sample register bits ``positions`` after each of ``n`` steps.

        Every position sees the same register sequence, so routers wired to
        different positions get different but simultaneous random bits.
        """
        for p in positions:
            if not 0 <= p < self.width:
                raise ValueError(f"bit position must be in [0, {self.width}), got {p}")
        streams: Dict[int, List[bool]] = {p: [] for p in positions}
        for _ in range(n):
            self.step()
            for p in positions:
                streams[p].append(bool((self.register >> p) & 1))
        return streams

    def period(self) -> int:
        start = self.register
        state = start
        count = 0
        while True:
            _, state = lfsr_next(state, self.taps)
            count += 1
            if state == start:
                return count
