# flitsim/livelock.py
"""
Repeating-deflection scenarios.

``router_livelock`` is the single-router construction: the victim wants the
top output from the earlier control slot and comes back on input A every
second epoch after losing. An adversary requesting the same output arrives
on input B every epoch, and filler traffic keeps input A busy in the epochs
in between, so every epoch holds a conflict. Plain round robin then meets
the victim in the same phase every time it returns; random toggles break
that parity.

``network_livelock`` replays a victim against persistent background flows on
any topology and reports the same statistics plus the age of the oldest
packet in the network.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from flitsim.network import DEFAULT_RAND_Q, FlitNetwork, FlitRecord
from packet.epoch import EpochConfig, Packet
from router.behavioral import Policy, RouterConfig, RouterState, route_epoch
from topology.model import Topology

logger = logging.getLogger(__name__)

ROUTER_EPOCH = EpochConfig(num_destinations=4)
ROUTER_THRESHOLD = 2
VICTIM = Packet(1)
ADVERSARY = Packet(2)
FILLER = Packet(1)
RETURN_EPOCHS = 2

Flow = Tuple[int, int]


@dataclass
class LivelockResult:
    policy: str
    delivered: bool
    delivered_epoch: Optional[int]
    victim_age: int
    attempts: int
    deflections: int
    hops: int
    oldest_age_max: int = 0
    oldest_age_mean: float = 0.0


def router_livelock(policy="round_robin", max_epochs: int = 10_000, seed: int = 0, rand_q: float = DEFAULT_RAND_Q,
                    adversary: bool = True, initial_phase: int = 1) -> LivelockResult:
    """
    Run the single-router construction until the victim leaves on the top
    output or ``max_epochs`` pass.

    Returns:
        LivelockResult: ``victim_age`` is the victim's age in epochs when the
        run stopped. The victim is the oldest packet throughout.
    """
    policy = Policy.parse(policy)
    cfg = RouterConfig(policy, ROUTER_THRESHOLD, ROUTER_EPOCH)
    state = RouterState(rr_phase=initial_phase)
    rng = np.random.default_rng(seed)
    victim_ready = 0
    attempts = deflections = 0
    for epoch in range(max_epochs):
        rand_bit = policy is Policy.RANDOMIZED_RR and bool(rng.random() < rand_q)
        victim_here = epoch == victim_ready
        a: Optional[Packet] = VICTIM if victim_here else (FILLER if adversary else None)
        b: Optional[Packet] = ADVERSARY if adversary else None
        _, out_a, _ = route_epoch(cfg, state, a, b, rand_bit=rand_bit)
        if not victim_here:
            continue
        attempts += 1
        if out_a is VICTIM:
            logger.info(f"{policy.value}: victim delivered in epoch {epoch} after {deflections} deflections")
            return LivelockResult(policy.value, True, epoch, epoch + 1, attempts, deflections, attempts,
                                  epoch + 1, (epoch + 2) / 2)
        deflections += 1
        victim_ready = epoch + RETURN_EPOCHS
    logger.info(f"{policy.value}: victim still undelivered after {max_epochs} epochs")
    return LivelockResult(policy.value, False, None, max_epochs, attempts, deflections, attempts,
                          max_epochs, (max_epochs + 1) / 2)


def network_livelock(network: Union[FlitNetwork, Topology], victim: Flow, background: Sequence[Flow] = (),
                     max_epochs: int = 10_000, policy=None, seed: int = 0,
                     rand_q: float = DEFAULT_RAND_Q) -> LivelockResult:
    """
    Offer ``victim`` once in the first epoch and keep every background flow
    busy: a flow offers its next packet whenever its source queue is empty.

    Args:
        network: a fresh ``FlitNetwork``, or a topology to build one on with
            ``policy``, ``seed`` and ``rand_q`` (re-injection on).
        victim: (source, destination) of the watched packet.
        background: (source, destination) flows.

    Returns:
        LivelockResult: ``hops`` and ``deflections`` are the victim's,
        ``attempts`` counts its injections; the oldest-age statistics cover
        every packet alive at the start of each epoch.
    """
    if max_epochs < 1:
        raise ValueError(f"max_epochs must be at least 1, got {max_epochs}")
    net = network if isinstance(network, FlitNetwork) else FlitNetwork(
        network, policy=policy, seed=seed, rand_q=rand_q)
    policy_name = net.policy.value
    watched = net.offer(*victim)
    flits: List[FlitRecord] = [watched]
    retired = set()
    oldest: List[int] = []
    for _ in range(max_epochs):
        t = net.epoch
        for src, dst in background:
            if not len(net.endpoints[src]):
                flits.append(net.offer(src, dst))
        alive = [f for f in flits if f.deliver_epoch is None and f.id not in retired]
        oldest.append(max(t + 1 - f.inject_epoch for f in alive))
        events = net.step()
        retired.update(ev["flit"] for ev in events if ev["event"] == "retire")
        if watched.deliver_epoch is not None or watched.id in retired:
            break
    delivered = watched.deliver_epoch is not None
    age = watched.deliver_epoch + 1 - watched.inject_epoch if delivered else net.epoch - watched.inject_epoch
    result = LivelockResult(policy_name, delivered, watched.deliver_epoch, age, watched.reinjections + 1,
                            watched.deflections, watched.hops, max(oldest), float(np.mean(oldest)))
    logger.info(f"{policy_name}: victim {victim} {'delivered' if delivered else 'not delivered'} after "
                f"{age} epochs, oldest packet reached {result.oldest_age_max} epochs")
    return result


def escape_trials(policy="randomized_rr", trials: int = 100, max_epochs: int = 10_000, rand_q: float = DEFAULT_RAND_Q,
                  first_seed: int = 0) -> List[LivelockResult]:
    """One single-router run per seed ``first_seed .. first_seed + trials - 1``."""
    return [router_livelock(policy, max_epochs, seed, rand_q) for seed in range(first_seed, first_seed + trials)]
