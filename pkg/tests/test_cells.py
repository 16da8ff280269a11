# tests/test_cells.py
import numpy as np
import pytest

from cells.library import cell_library_manifest, make_cell, write_library_manifest
from cells.primitives import (
    DFF,
    DFF2,
    JTL,
    NDRO,
    TFF,
    AndClocked,
    CellKind,
    Inhibit,
    LastArrival,
    Merger,
    ShiftRegister,
    Splitter,
    jj_count_of,
)
from validators.errors import SchedulingInPast, UnknownPort

# ------------------------
# JJ counts
# ------------------------

@pytest.mark.parametrize("kind,expected", [
    (CellKind.SPLITTER, 3),
    (CellKind.MERGER, 5),
    (CellKind.LAST_ARRIVAL, 6),
    (CellKind.INHIBIT, 8),
    (CellKind.NDRO, 7),
    (CellKind.AND_CLOCKED, 11),
    (CellKind.TFF, 10),
    (CellKind.DFF, 4),
    (CellKind.DFF2, 12),
])
def test_fixed_jj_counts(kind, expected):
    assert jj_count_of(kind) == expected


def test_parameterised_jj_counts():
    assert jj_count_of(CellKind.DFF2, unused_outputs=1) == 10
    assert jj_count_of(CellKind.SHIFT_REGISTER, stages=10) == 22
    assert jj_count_of(CellKind.JTL, segments=3) == 6
    assert DFF2("d", unused_outputs=2).jj_count == 8
    assert ShiftRegister("sr", stages=4, period=20).jj_count == 10


# ------------------------
# Behaviour
# ------------------------

def test_splitter_and_merger():
    assert Splitter("s").evaluate("in", 10) == [("out1", 14), ("out2", 14)]
    m = Merger("m")
    assert m.evaluate("in1", 10) == [("out", 15)]
    assert m.evaluate("in2", 10) == []
    assert m.collisions == 1
    assert m.evaluate("in2", 11) == [("out", 16)]


def test_last_arrival_fires_on_second_input_and_rearms():
    la = LastArrival("la")
    assert la.evaluate("in1", 0) == []
    assert la.evaluate("in1", 5) == []
    assert la.evaluate("in2", 20) == [("out", 26)]
    assert la.evaluate("in2", 30) == []
    assert la.evaluate("in1", 31) == [("out", 37)]


def test_inhibit_blocks_once_after_inh_pulse():
    cell = Inhibit("i")
    assert cell.evaluate("in", 0) == [("out", 5)]
    assert cell.evaluate("inh", 10) == []
    assert cell.evaluate("in", 20) == []
    assert cell.evaluate("in", 30) == [("out", 35)]


@pytest.mark.parametrize("inh_at,in_at", [(4, 5), (5, 10)])
def test_inhibit_armed_reading(inh_at, in_at):
    cell = Inhibit("i")
    assert cell.evaluate("inh", inh_at) == []
    assert cell.evaluate("in", in_at) == []


def test_ndro_reads_non_destructively():
    cell = NDRO("n")
    assert cell.evaluate("clk", 0) == []
    cell.evaluate("set", 5)
    assert cell.evaluate("clk", 10) == [("out", 14)]
    assert cell.evaluate("clk", 20) == [("out", 24)]
    cell.evaluate("reset", 25)
    assert cell.evaluate("clk", 30) == []


def test_and_clocked_needs_both_inputs_before_clock():
    cell = AndClocked("and")
    cell.evaluate("a", 0)
    assert cell.evaluate("clk", 10) == []
    cell.evaluate("a", 20)
    cell.evaluate("b", 21)
    assert cell.evaluate("clk", 30) == [("out", 39)]
    assert cell.evaluate("clk", 40) == []


def test_tff_alternates_outputs():
    cell = TFF("t")
    outs = [cell.evaluate("in", t)[0][0] for t in (0, 10, 20, 30)]
    assert outs == ["out1", "out2", "out1", "out2"]


def test_dff_destructive_readout_and_overwrite_count():
    cell = DFF("d")
    assert cell.evaluate("clk", 0) == []
    cell.evaluate("d", 5)
    cell.evaluate("d", 6)
    assert cell.overwrites == 1
    assert cell.evaluate("clk", 10) == [("out", 15)]
    assert cell.evaluate("clk", 20) == []


def test_dff2_reads_on_either_clock():
    cell = DFF2("d2")
    cell.evaluate("d", 0)
    assert cell.evaluate("clk2", 10) == [("out2", 16)]
    cell.evaluate("d", 20)
    assert cell.evaluate("clk1", 30) == [("out1", 36)]
    assert cell.evaluate("clk1", 40) == []


def test_jtl_delay_scales_with_segments():
    assert JTL("j", segments=3).evaluate("in", 0) == [("out", 9)]


def test_shift_register_captures_on_next_edge():
    sr = ShiftRegister("sr", stages=2, period=10)
    assert sr.latency == 20
    assert sr.evaluate("in", 3) == [("out", 30)]
    assert sr.evaluate("in", 7) == []
    assert sr.collisions == 1
    assert sr.evaluate("in", 10) == []
    assert sr.evaluate("in", 11) == [("out", 40)]


def test_shift_register_phase_and_overhead():
    sr = ShiftRegister("sr", stages=1, period=20, phase=5, overhead=3)
    assert sr.next_edge(6) == 25
    assert sr.evaluate("in", 6) == [("out", 48)]


def test_shift_register_jitter_is_seeded_and_bounded():
    outs = []
    for _ in range(2):
        sr = ShiftRegister("sr", stages=1, period=10, jitter_ps=3)
        sr.bind_rng(np.random.default_rng(42))
        outs.append([sr.evaluate("in", t)[0][1] for t in range(0, 200, 10)])
    assert outs[0] == outs[1]
    nominal = [t + 10 for t in range(0, 200, 10)]
    assert all(abs(o - n) <= 3 for o, n in zip(outs[0], nominal))


# ------------------------
# Errors
# ------------------------

def test_unknown_port_raises():
    with pytest.raises(UnknownPort):
        Splitter("s").evaluate("clk", 0)


def test_time_going_backwards_raises():
    cell = TFF("t")
    cell.evaluate("in", 50)
    with pytest.raises(SchedulingInPast):
        cell.evaluate("in", 40)


@pytest.mark.parametrize("factory", [
    lambda: ShiftRegister("sr", stages=0, period=10),
    lambda: ShiftRegister("sr", stages=1, period=10, jitter_ps=-1),
    lambda: JTL("j", segments=0),
    lambda: DFF2("d", unused_outputs=3),
    lambda: Splitter("s", delay=-1),
])
def test_invalid_construction(factory):
    with pytest.raises(ValueError):
        factory()


# ------------------------
# Library
# ------------------------

def test_make_cell_by_name():
    cell = make_cell("NDRO", "x", module="arbiter")
    assert isinstance(cell, NDRO)
    assert cell.module == "arbiter"
    assert make_cell(CellKind.SHIFT_REGISTER, "sr", stages=3, period=10).jj_count == 8


def test_make_cell_unknown_kind():
    with pytest.raises(ValueError, match="Invalid value for 'kind'"):
        make_cell("Flux", "x")


def test_library_manifest(tmp_path):
    rows = {row["name"]: row for row in cell_library_manifest()}
    assert set(rows) == {k.value for k in CellKind}
    assert rows["ShiftRegister"]["jj_count"] == 22
    assert rows["ShiftRegister"]["reference"] == {"stages": 10}
    path = write_library_manifest(tmp_path / "cells.json")
    assert '"Inhibit"' in path.read_text()
