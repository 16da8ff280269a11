# router/crossvalidate.py
"""
Pulse-level vs behavioral router agreement checks.

    exhaustive  every input combination (no packet or one of D destinations
                per input) from both round-robin phases, one fresh netlist
                per case; randomized round robin also covers both rand bits
    random      seeded random epochs streamed through a single netlist
"""
import itertools
import logging
from typing import Any, Dict, List, Optional

import numpy as np

from packet.epoch import Packet
from router.behavioral import BehavioralRouter, Policy, RouterConfig, RouterState, route_epoch
from router.harness import RouterHarness
from router.netlist import module_delays
from validators.errors import MismatchReport, PastNocError

logger = logging.getLogger(__name__)

P_PACKET = 0.8
P_DATA_SLOT = 0.3
P_RAND_BIT = 0.25


def _payloads(n_slots: int):
    # distinct payloads per input so a swapped crossbar is always visible
    a_slots = frozenset({1, n_slots}) if n_slots > 1 else frozenset({1})
    b_slots = frozenset({2}) if n_slots > 1 else frozenset()
    return a_slots, b_slots


def _lit(pkt: Optional[Packet]) -> Optional[str]:
    return None if pkt is None else pkt.literal()


def _record(case: Any, a, b, rand_bit, expected, got, error: Optional[str] = None) -> Dict[str, Any]:
    return {
        "case": case,
        "in_a": _lit(a),
        "in_b": _lit(b),
        "rand_bit": bool(rand_bit),
        "expected": [_lit(p) for p in expected],
        "got": None if got is None else [_lit(p) for p in got],
        "error": error,
    }


def exhaustive(cfg: RouterConfig) -> Dict[str, Any]:
    ecfg = cfg.epoch_cfg
    a_slots, b_slots = _payloads(ecfg.n_data_slots)
    dests = [None] + list(range(1, ecfg.num_destinations + 1))
    rand_bits = (False, True) if cfg.policy is Policy.RANDOMIZED_RR else (False,)
    mismatches: List[Dict[str, Any]] = []
    checked = 0
    for phase, da, db, rand_bit in itertools.product((0, 1), dests, dests, rand_bits):
        a = None if da is None else Packet(da, a_slots)
        b = None if db is None else Packet(db, b_slots)
        state = RouterState(rr_phase=phase)
        _, exp_a, exp_b = route_epoch(cfg, state, a, b, rand_bit=rand_bit)
        harness = RouterHarness(cfg)
        harness.preset_phase(phase)
        case = {"rr_phase": phase, "dest_a": da, "dest_b": db}
        checked += 1
        try:
            got = harness.run([(a, b, rand_bit)])[0]
        except PastNocError as exc:
            mismatches.append(_record(case, a, b, rand_bit, (exp_a, exp_b), None, str(exc)))
            continue
        phase_ok = cfg.policy is Policy.FIXED_PRIORITY or harness.phase == state.rr_phase
        if got != (exp_a, exp_b) or not phase_ok:
            mismatches.append(_record(case, a, b, rand_bit, (exp_a, exp_b), got,
                                      None if phase_ok else f"rr_phase {harness.phase} != {state.rr_phase}"))
    return _finish(cfg, "exhaustive", checked, mismatches)


def random_epochs(cfg: RouterConfig, epochs: int = 1000, seed: int = 0, jitter_ps: int = 0) -> Dict[str, Any]:
    ecfg = cfg.epoch_cfg
    rng = np.random.default_rng(seed)
    stimulus = []
    for _ in range(epochs):
        pkts = []
        for _side in ("a", "b"):
            if rng.random() < P_PACKET:
                dest = int(rng.integers(1, ecfg.num_destinations + 1))
                mask = rng.random(ecfg.n_data_slots) < P_DATA_SLOT
                pkts.append(Packet(dest, frozenset(int(i) + 1 for i in np.flatnonzero(mask))))
            else:
                pkts.append(None)
        rand_bit = cfg.policy is Policy.RANDOMIZED_RR and bool(rng.random() < P_RAND_BIT)
        stimulus.append((pkts[0], pkts[1], rand_bit))

    reference = BehavioralRouter(cfg)
    expected = [reference.route(a, b, rand_bit)[1:] for a, b, rand_bit in stimulus]
    harness = RouterHarness(cfg, seed=seed, jitter_ps=jitter_ps)
    mismatches: List[Dict[str, Any]] = []
    try:
        got_all = harness.run(stimulus)
    except PastNocError as exc:
        mismatches.append(_record("run", None, None, False, (None, None), None, str(exc)))
        return _finish(cfg, "random", epochs, mismatches)
    for k, ((a, b, rand_bit), exp, got) in enumerate(zip(stimulus, expected, got_all)):
        if tuple(exp) != got:
            mismatches.append(_record({"epoch": k}, a, b, rand_bit, exp, got))
    return _finish(cfg, "random", epochs, mismatches)


def _finish(cfg: RouterConfig, mode: str, checked: int, mismatches: List[Dict[str, Any]]) -> Dict[str, Any]:
    if mismatches:
        logger.error(f"crossvalidate {mode}: {len(mismatches)} of {checked} cases disagree")
        raise MismatchReport(mismatches, checked)
    logger.info(f"crossvalidate {mode}: {checked} cases agree ({cfg.policy.value})")
    return {
        "mode": mode,
        "policy": cfg.policy.value,
        "checked": checked,
        "mismatches": 0,
        "module_delays": module_delays(cfg),
    }


def crossvalidate(cfg: RouterConfig, mode: str = "exhaustive", epochs: int = 1000, seed: int = 0,
                  jitter_ps: int = 0) -> Dict[str, Any]:
    """
    Raises:
        MismatchReport: at least one case disagrees (carries every mismatch).
        InvalidGeometry: the netlist cannot be scheduled for ``cfg``.
    """
    if mode == "exhaustive":
        return exhaustive(cfg)
    if mode == "random":
        return random_epochs(cfg, epochs=epochs, seed=seed, jitter_ps=jitter_ps)
    raise ValueError(f"Invalid value for 'mode': '{mode}'. Must be one of ['exhaustive', 'random']")
