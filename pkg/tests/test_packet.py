# tests/test_packet.py
import math

import pytest

from calculators.capacity import (
    PUBLISHED_M_AT_64,
    bits_per_packet,
    expected_pulses_asymptotic,
    expected_pulses_exact,
    monte_carlo_occupancy,
    pack_values,
)
from packet.epoch import EpochConfig, Packet, decode_packet, encode_packet
from validators.errors import (
    DestinationOutOfRange,
    InvalidEpoch,
    MultipleControlPulses,
    NoControlPulse,
    PulseInForbiddenSlot,
    SlotOutOfRange,
    SpacingViolation,
)


@pytest.fixture
def cfg():
    return EpochConfig(num_destinations=2)


# ========================
# EPOCH GEOMETRY
# ========================

def test_default_geometry(cfg):
    """D=2 with 60 ps control slots and a 300 ps data period."""
    assert cfg.control_period == 180
    assert cfg.epoch == 480
    assert cfg.n_data_slots == 20
    assert cfg.control_offset(1) == 30
    assert cfg.control_offset(2) == 90
    assert cfg.data_offset(1) == 180
    assert cfg.data_offset(5) == 240


def test_with_data_period(cfg):
    longer = cfg.with_data_period(960)
    assert longer.n_data_slots == 64
    assert longer.control_period == cfg.control_period


@pytest.mark.parametrize("kwargs", [
    {"num_destinations": 2, "data_spacing": 10},
    {"num_destinations": 2, "data_period": 301},
    {"num_destinations": 2, "data_period": -15},
    {"num_destinations": 0},
    {"num_destinations": 2, "control_slot": 0},
    {"num_destinations": 2.5},
])
def test_invalid_epoch(kwargs):
    with pytest.raises(InvalidEpoch):
        EpochConfig(**kwargs)


# ========================
# PACKET LITERALS
# ========================

def test_parse_and_literal():
    pkt = Packet.parse("dest=3 data=[9, 1,5]")
    assert pkt == Packet(3, frozenset({1, 5, 9}))
    assert pkt.literal() == "dest=3 data=[1,5,9]"
    assert Packet.parse("dest=1 data=[]") == Packet(1)


@pytest.mark.parametrize("text,error", [
    ("dest=3", ValueError),
    ("to=1 data=[1]", ValueError),
    ("dest=1 data=[2,2]", SlotOutOfRange),
])
def test_parse_rejects(text, error):
    with pytest.raises(error):
        Packet.parse(text)


def test_packet_validate(cfg):
    with pytest.raises(DestinationOutOfRange):
        Packet(3, {1}).validate(cfg)
    with pytest.raises(DestinationOutOfRange):
        Packet(0).validate(cfg)
    with pytest.raises(SlotOutOfRange):
        Packet(1, {21}).validate(cfg)


# ========================
# ENCODE / DECODE
# ========================

def test_encode_places_pulses(cfg):
    assert encode_packet(cfg, Packet(1, {1, 5})) == [30, 180, 240]
    assert encode_packet(cfg, Packet(2, {20}), epoch_start=480) == [480 + 90, 480 + 465]


def test_decode_inverts_encode(cfg):
    pkt = Packet(2, {1, 2, 7, 20})
    assert decode_packet(cfg, encode_packet(cfg, pkt, 960), 960) == pkt


def test_decode_control_only(cfg):
    assert decode_packet(cfg, [95]) == Packet(2)


def test_decode_with_tolerance(cfg):
    assert decode_packet(cfg, [30, 182, 213], tolerance_ps=3) == Packet(1, {1, 3})
    with pytest.raises(SlotOutOfRange):
        decode_packet(cfg, [30, 182])


@pytest.mark.parametrize("pulses,error", [
    ([180, 195], NoControlPulse),
    ([30, 90, 180], MultipleControlPulses),
    ([150, 180], PulseInForbiddenSlot),
    ([30, 180, 190], SpacingViolation),
    ([30, 187], SlotOutOfRange),
    ([30, 480], SlotOutOfRange),
    ([-1], SlotOutOfRange),
])
def test_decode_errors(cfg, pulses, error):
    with pytest.raises(error):
        decode_packet(cfg, pulses)


# ========================
# CAPACITY
# ========================

def test_expected_pulses_at_64():
    assert expected_pulses_asymptotic(64) == pytest.approx(40.455, abs=1e-3)
    assert expected_pulses_exact(64) == pytest.approx(40.64, abs=0.01)
    assert PUBLISHED_M_AT_64 == 40.1


def test_monte_carlo_matches_exact():
    estimate = monte_carlo_occupancy(64, trials=20_000, seed=1)
    assert estimate == pytest.approx(expected_pulses_exact(64), abs=0.1)
    assert monte_carlo_occupancy(64, trials=2_000, seed=3) == monte_carlo_occupancy(64, trials=2_000, seed=3)


def test_monte_carlo_at_a_million_trials():
    estimate = monte_carlo_occupancy(64, trials=1_000_000, seed=7)
    assert estimate == pytest.approx(expected_pulses_exact(64), abs=0.02)
    assert estimate != pytest.approx(PUBLISHED_M_AT_64, abs=0.3)


def test_bits_per_packet(cfg):
    n = cfg.n_data_slots
    assert bits_per_packet(cfg) == pytest.approx((n - n / math.e) * math.log2(n))
    with pytest.raises(InvalidEpoch):
        bits_per_packet(cfg.with_data_period(0))


def test_pack_values_first_fit(cfg):
    packets = pack_values(cfg, [1, 1, 2, 3, 3, 3])
    assert packets == [frozenset({1, 2, 3}), frozenset({1, 3}), frozenset({3})]
    with pytest.raises(SlotOutOfRange):
        pack_values(cfg, [0, 4])


@pytest.mark.parametrize("n", [0, -1])
def test_exact_rejects_empty(n):
    with pytest.raises(ValueError):
        expected_pulses_exact(n)
