# flitsim/traffic.py
"""
Synthetic traffic patterns.

Permutation patterns work on 0-based endpoint addresses of ``log2(N)``
bits; endpoint ids elsewhere are 1-based.

    uniform    destination drawn uniformly from all endpoints
    tornado    (src + ceil(N/2) - 1) mod N
    bitcomp    bitwise complement
    shuffle    rotate address bits left by one
    transpose  swap the upper and lower halves of the address bits
    worst      each first-stage router's sources send uniformly into one
               half of the destinations, alternating halves by router
    best       bit-reversal: conflict-free on butterflies
    fixed      explicit source -> destination map
"""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from validators.config_input import validate_traffic_input
from validators.errors import InadmissiblePattern

PATTERNS = ("uniform", "tornado", "bitcomp", "shuffle", "transpose", "worst", "best", "fixed")
PERMUTATIONS = ("tornado", "bitcomp", "shuffle", "transpose", "best")
NAMED_STUDY_PATTERNS = ("uniform", "tornado", "bitcomp", "shuffle", "transpose")


def address_bits(n: int) -> int:
    if n < 2 or n & (n - 1):
        raise InadmissiblePattern(f"bit-permutation patterns need a power-of-two endpoint count, got {n}")
    return n.bit_length() - 1


def map_address(kind: str, addr: int, n: int) -> int:
    """Destination address of ``addr`` under a permutation pattern."""
    if kind == "tornado":
        return (addr + math.ceil(n / 2) - 1) % n
    bits = address_bits(n)
    mask = n - 1
    if kind == "bitcomp":
        return ~addr & mask
    if kind == "shuffle":
        return ((addr << 1) | (addr >> (bits - 1))) & mask
    if kind == "transpose":
        half = bits // 2
        return ((addr << half) | (addr >> (bits - half))) & mask
    if kind == "best":
        return int(format(addr, f"0{bits}b")[::-1], 2)
    raise ValueError(f"'{kind}' is not a permutation pattern")


@dataclass
class TrafficPattern:
    """
    Bernoulli injection at ``rate`` packets/epoch/endpoint with a
    deterministic per-seed destination stream.
    """

    kind: str
    n_endpoints: int
    rate: float
    seed: int = 0
    groups: Optional[List[List[int]]] = None
    mapping: Optional[Dict[int, int]] = None
    _rng: np.random.Generator = field(init=False, repr=False)
    _half_of: Dict[int, int] = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        validate_traffic_input(self.kind, self.n_endpoints, self.rate, PATTERNS)
        self._rng = np.random.default_rng(self.seed)
        if self.kind in PERMUTATIONS and self.kind != "tornado":
            address_bits(self.n_endpoints)
        if self.kind == "worst":
            groups = self.groups or [[2 * i + 1, 2 * i + 2] for i in range(self.n_endpoints // 2)]
            self._half_of = {src: r % 2 for r, grp in enumerate(groups) for src in grp}
        if self.kind == "fixed" and not self.mapping:
            raise InadmissiblePattern("fixed pattern needs a non-empty source -> destination mapping")
        self.check_admissible()

    # -----------------------------
    # LOAD MATRIX
    # -----------------------------
    def destination_distribution(self, src: int) -> Dict[int, float]:
        n = self.n_endpoints
        if self.kind == "uniform":
            return {d: 1.0 / n for d in range(1, n + 1)}
        if self.kind in PERMUTATIONS:
            return {map_address(self.kind, src - 1, n) + 1: 1.0}
        if self.kind == "worst":
            half = n // 2
            lo = 1 + half * self._half_of.get(src, 0)
            return {d: 1.0 / half for d in range(lo, lo + half)}
        dst = self.mapping.get(src)
        return {} if dst is None else {dst: 1.0}

    def sources(self) -> Sequence[int]:
        if self.kind == "fixed":
            return sorted(self.mapping)
        return range(1, self.n_endpoints + 1)

    def check_admissible(self) -> None:
        """
        Raises:
            InadmissiblePattern: some destination would receive more than one packet per epoch.
        """
        load: Dict[int, float] = {}
        for src in self.sources():
            for dst, p in self.destination_distribution(src).items():
                if not 1 <= dst <= self.n_endpoints:
                    raise InadmissiblePattern(f"destination {dst} of source {src} is not an endpoint")
                load[dst] = load.get(dst, 0.0) + self.rate * p
        over = {d: round(v, 6) for d, v in load.items() if v > 1.0 + 1e-9}
        if over:
            raise InadmissiblePattern(f"destinations receive more than 100% of their bandwidth: {over}")

    # -----------------------------
    # GENERATION
    # -----------------------------
    def generate(self) -> List[tuple]:
        """(source, destination) pairs injected this epoch, in source order."""
        out = []
        for src in self.sources():
            if self.rate >= 1.0 or self._rng.random() < self.rate:
                out.append((src, self.draw_destination(src)))
        return out

    def draw_destination(self, src: int) -> int:
        dist = self.destination_distribution(src)
        if len(dist) == 1:
            return next(iter(dist))
        keys = sorted(dist)
        return int(keys[int(self._rng.integers(0, len(keys)))])


def make_pattern(kind: str, n_endpoints: int, rate: float, seed: int = 0, topology=None,
                 mapping: Optional[Dict[int, int]] = None) -> TrafficPattern:
    """
    Raises:
        InadmissiblePattern: a destination would be oversubscribed.
        ConfigError: unknown kind or rate outside [0, 1].
    """
    groups = topology.first_stage_groups() if topology is not None and kind == "worst" else None
    return TrafficPattern(kind, n_endpoints, float(rate), seed, groups=groups, mapping=mapping)
