# topology/endpoints.py
"""
Endpoint injection queues.

An endpoint injects at most one packet per epoch. Packets it received but
that were addressed elsewhere go to the re-injection queue, which is served
before fresh traffic from the source queue.
"""
import logging
from collections import deque
from typing import Any, Deque, Optional

logger = logging.getLogger(__name__)

HIGH_WATER_WARNING = 64


class EndpointQueue:
    def __init__(self, endpoint_id: int, reinject_first: bool = True, warn_at: int = HIGH_WATER_WARNING):
        self.endpoint_id = endpoint_id
        self.reinject_first = reinject_first
        self.warn_at = warn_at
        self.reinjection: Deque[Any] = deque()
        self.source: Deque[Any] = deque()
        self.high_water = 0
        self._warned = False

    def __len__(self) -> int:
        return len(self.reinjection) + len(self.source)

    def offer(self, flit: Any) -> None:
        """Queue fresh traffic."""
        self.source.append(flit)
        self._track()

    def reinject(self, flit: Any) -> None:
        """Queue a packet that arrived here although it is addressed to another endpoint."""
        if getattr(flit, "destination", None) == self.endpoint_id:
            logger.warning(f"endpoint {self.endpoint_id} asked to re-inject a packet addressed to itself")
        self.reinjection.append(flit)
        self._track()

    def next_packet(self) -> Optional[Any]:
        first, second = (self.reinjection, self.source) if self.reinject_first else (self.source, self.reinjection)
        if first:
            return first.popleft()
        if second:
            return second.popleft()
        return None

    def _track(self) -> None:
        depth = len(self)
        self.high_water = max(self.high_water, depth)
        if depth >= self.warn_at and not self._warned:
            self._warned = True
            logger.warning(f"endpoint {self.endpoint_id} queue reached {depth} packets")
