# calculators/capacity.py
"""
Payload capacity of a race-logic packet.

Values are thrown into ``n`` data slots like balls into bins: several values
that want the same slot cannot share one packet, so only the occupied slots
carry a pulse. Each pulse encodes ``log2(n)`` bits.
"""
import math
from typing import FrozenSet, Iterable, List

import numpy as np

from packet.epoch import EpochConfig
from validators.errors import InvalidEpoch, SlotOutOfRange

# Published figure for n = 64; the closed forms below give 40.455 (asymptotic)
# and 40.64 (exact). Both are exposed; this value is only reported.
PUBLISHED_M_AT_64 = 40.1
CAPACITY_NOTE = (
    "m at n=64 is reported as 40.1 in the source text; "
    "n - n/e gives 40.455 and the exact bins-and-balls expectation gives 40.64"
)


def expected_pulses_asymptotic(n: int) -> float:
    """m = n - n/e, the large-n occupancy of n bins after n balls."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    return n - n / math.e


def expected_pulses_exact(n: int) -> float:
    """
    Exact expected number of occupied bins after throwing n balls into n bins.

    Returns:
        float: n * (1 - (1 - 1/n)^n)
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    return n * (1.0 - (1.0 - 1.0 / n) ** n)


def monte_carlo_occupancy(n: int, trials: int, seed: int = 0, chunk: int = 100_000) -> float:
    """Mean number of distinct slots hit by n uniform values, estimated over ``trials`` draws."""
    if n < 1 or trials < 1:
        raise ValueError(f"n and trials must be positive, got n={n}, trials={trials}")
    rng = np.random.default_rng(seed)
    total = 0
    done = 0
    while done < trials:
        rows = min(chunk, trials - done)
        draws = np.sort(rng.integers(0, n, size=(rows, n), dtype=np.int32), axis=1)
        total += int((np.diff(draws, axis=1) != 0).sum()) + rows
        done += rows
    return total / trials


def bits_per_packet(cfg: EpochConfig) -> float:
    """Expected payload bits: m(n) data pulses of log2(n) bits each."""
    n = cfg.n_data_slots
    if n < 2:
        raise InvalidEpoch(f"bits_per_packet needs at least 2 data slots, got {n}")
    return expected_pulses_asymptotic(n) * math.log2(n)


def pack_values(cfg: EpochConfig, values: Iterable[int]) -> List[FrozenSet[int]]:
    """
    Distribute slot values over packets, first fit.

    Each value goes into the first packet that does not already hold its
    slot; the packet count equals the largest multiplicity.
    """
    values = list(values)
    bad = sorted({v for v in values if not 1 <= v <= cfg.n_data_slots})
    if bad:
        raise SlotOutOfRange(f"values {bad} out of range: expected between 1 and {cfg.n_data_slots}")
    packets: List[set] = []
    for v in values:
        for slots in packets:
            if v not in slots:
                slots.add(v)
                break
        else:
            packets.append({v})
    return [frozenset(p) for p in packets]
