# tests/test_runner.py
import json
import sys
from pathlib import Path

import pytest

from packet.epoch import Packet
from reports.artifacts import read_rows
from runner.config import ExperimentConfig, load_config, parse_axis, parse_config
from runner.run import analyze, network_stimulus, pulse_stimulus, run, run_point
from runner.scenarios import fig9, fig11, fig14, payload_tag, run_network_epochs
from runner.sweep import sweep, sweep_points
from topology import build_topology
from topology.pulsenet import PulseNetwork
from validators.errors import ConfigError, MismatchReport

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

FLIT_SMALL = """
[experiment]
mode = flit
topology = butterfly4
seed = 3

[traffic]
pattern = uniform
rate = 0.5
warmup = 20
sample = 200
"""

ANALYTIC_SWEEP = """
[experiment]
mode = analytic
topology = router2

[sweep]
data_period = 300, 450, 600
"""


def config(text: str, out: Path) -> ExperimentConfig:
    return parse_config(text).with_overrides(out=str(out))


# ========================
# CONFIG PARSING
# ========================

def test_minimal_config_uses_defaults():
    cfg = parse_config("[experiment]\ntopology = mesh8\n")
    assert cfg.topology == "mesh8"
    assert cfg.mode == "flit"
    assert cfg.data_period == 300
    assert cfg.sweep == ()


@pytest.mark.parametrize("name,text,expected", [
    ("data_period", "150:180:15", (150, 165, 180)),
    ("data_period", "300", (300,)),
    ("rate", "0.1, 0.2", (0.1, 0.2)),
    ("rate", "0.1:0.3:0.1", (0.1, 0.2, 0.3)),
    ("pattern", "uniform, tornado", ("uniform", "tornado")),
])
def test_parse_axis(name, text, expected):
    assert parse_axis(name, text) == expected


@pytest.mark.parametrize("name,text", [("data_period", "0:10:0"), ("rate", "fast"), ("pattern", " , ")])
def test_parse_axis_rejects(name, text):
    with pytest.raises(ConfigError):
        parse_axis(name, text)


@pytest.mark.parametrize("text,field,line", [
    ("[experiment]\ntopology = mesh8\nmode = warp\n", "experiment.mode", 3),
    ("[experiment]\ntopology = mesh8\n[traffik]\nrate = 1\n", "traffik", 3),
    ("[experiment]\nmode = flit\n", "experiment.topology", 1),
    ("[experiment]\nmode = pulse\ntopology = cmesh32\n", "experiment.mode", 2),
    ("[experiment]\nmode = pulse\ntopology = butterfly4\n[stimulus]\na.0 = dest=1 data=[1]\n", "stimulus.a.0", 5),
    ("[experiment]\nmode = pulse\ntopology = butterfly4\n[stimulus]\nep9.0 = dest=1 data=[1]\n", "stimulus.ep9.0", 5),
    ("[experiment]\nmode = pulse\ntopology = router2\n[stimulus]\nep1.0 = dest=1 data=[1]\n", "stimulus.ep1.0", 5),
    ("[experiment]\nmode = pulse\ntopology = mesh8\n[epoch]\ndata_period = 300\n", "epoch.data_period", 5),
    ("[experiment]\nmode = pulse\ntopology = router2\nscenario = fig11\n", "experiment.scenario", 4),
    ("[experiment]\ntopology = mesh8\n[traffic]\nwarmup = 50\nsample = 10\n", "traffic.warmup", 4),
    ("[experiment]\ntopology = mesh8\n[traffic]\nrate = 1.5\n", "traffic.rate", 4),
    ("[experiment]\ntopology = mesh8\nseed = x\n", "experiment.seed", 3),
    ("[experiment]\ntopology = mesh8\n[sweep]\nwidth = 1, 2\n", "sweep.width", 4),
    ("[experiment]\ntopology = mesh8\n[sweep]\npattern = uniform, zipf\n", "sweep.pattern", 4),
    ("[experiment]\ntopology = mesh8\n[stimulus]\nc.0 = dest=1 data=[1]\n", "stimulus.c.0", 4),
])
def test_config_errors_are_located(text, field, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.field == field
    assert info.value.line == line


def test_syntax_errors():
    with pytest.raises(ConfigError, match="section"):
        parse_config("topology = mesh8\n")
    with pytest.raises(ConfigError) as info:
        parse_config("[experiment]\ntopology = mesh8\ntopology = router2\n")
    assert info.value.line == 3


def test_stimulus_section():
    cfg = parse_config(
        "[experiment]\nmode = pulse\ntopology = router2\n"
        "[stimulus]\nb.1 = dest=2 data=[3]\na.0 = dest=1 data=[1,5]\n"
    )
    assert cfg.stimulus == ((0, "a", Packet(1, {1, 5})), (1, "b", Packet(2, {3})))
    assert pulse_stimulus(cfg) == [(Packet(1, {1, 5}), None, False), (None, Packet(2, {3}), False)]


def test_pulse_without_stimulus():
    cfg = parse_config("[experiment]\nmode = pulse\ntopology = router2\n")
    with pytest.raises(ConfigError, match="stimulus"):
        pulse_stimulus(cfg)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.ini")


def test_overrides_are_validated():
    cfg = parse_config("[experiment]\ntopology = mesh8\n")
    assert cfg.with_overrides(seed=9, workers=2).seed == 9
    with pytest.raises(ConfigError) as info:
        cfg.with_overrides(trace="fst")
    assert info.value.field == "output.trace"


def test_sweep_point_replaces_fields():
    cfg = parse_config(ANALYTIC_SWEEP)
    point = cfg.point(data_period=450, case="worst")
    assert point.data_period == 450
    assert point.cases == ("worst",)
    assert point.sweep == ()
    assert len(sweep_points(cfg)) == 3


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.ini")), ids=lambda p: p.stem)
def test_shipped_configs_parse(path):
    cfg = load_config(path)
    assert cfg.source == str(path)
    assert cfg.as_dict()["topology"] == cfg.topology


# ========================
# SCENARIOS
# ========================

def test_fig9_round_robin_alternates():
    result = fig9()
    assert [row["winner"] for row in result.rows] == ["A", "B"]
    for row in result.rows:
        assert row["out_a"] == row["behavioral_out_a"]
        assert row["out_b"] == row["behavioral_out_b"]
    assert result.rows[0]["out_a"] == "dest=1 data=[1,5]"
    assert result.trace
    assert "out_a" in result.wires


def test_fig11_loser_retired_then_served():
    packets = fig11().packets
    assert [(p["src"], p["dst"]) for p in packets] == [(1, 2), (3, 2), (2, 4)] * 2
    assert packets[0]["deliver_epoch"] == 0
    assert packets[1]["deliver_epoch"] is None
    assert packets[2]["deliver_epoch"] == 0
    assert packets[3]["deliver_epoch"] is None
    assert packets[4]["deliver_epoch"] == 1


def test_fig14_shared_destination_served_in_sequence():
    # "exit in sequence with an empty epoch in between": 3->3 leaves in epoch 0,
    # 2->3 crosses one retimed mesh link and leaves in epoch 1. Neither packet
    # is deflected; the gap between the two exits is the extra node hop.
    packets = fig14().packets
    assert [(p["src"], p["dst"]) for p in packets] == [(1, 2), (2, 3), (3, 3)]
    assert [p["deliver_epoch"] for p in packets] == [0, 1, 0]
    assert [p["hops"] for p in packets] == [1, 2, 1]
    assert all(p["deflections"] == 0 for p in packets)


@pytest.mark.parametrize("scenario,exit_endpoint", [(fig11, 2), (fig14, 3)])
def test_pulse_scenarios_match_flit_level(scenario, exit_endpoint):
    pulse = scenario(mode="pulse")
    assert pulse.packets == scenario().packets
    assert all("packet" in row for row in pulse.rows)
    assert f"ep{exit_endpoint}_out" in pulse.wires
    assert any(ev.wire == f"ep{exit_endpoint}_out" for ev in pulse.trace)


def test_fig14_pulse_exits_one_epoch_apart():
    result = fig14(mode="pulse")
    epoch = build_topology("mesh8", data_period=600).epoch_cfg.epoch
    exits = sorted(row["epoch"] for row in result.rows if row["event"] == "deliver" and row["at"] == 3)
    assert exits == [0, 1]
    first = min(ev.time for ev in result.trace if ev.wire == "ep3_out")
    last = max(ev.time for ev in result.trace if ev.wire == "ep3_out")
    assert epoch <= last - first < 2 * epoch


def test_pulse_disagreement_is_reported(monkeypatch):
    real = PulseNetwork.run

    def dropping(self, injections):
        got = real(self, injections)
        got[0].clear()
        return got

    monkeypatch.setattr(PulseNetwork, "run", dropping)
    with pytest.raises(MismatchReport) as info:
        fig11(mode="pulse")
    assert info.value.mismatches
    assert {m["epoch"] for m in info.value.mismatches} == {0}
    assert all(m["got"] is None for m in info.value.mismatches)


def test_payload_tag():
    assert payload_tag(5, 4) == frozenset({1, 3})
    assert payload_tag(1, 1) == frozenset({1})
    for flit_id in (0, 16):
        with pytest.raises(ValueError, match="does not fit"):
            payload_tag(flit_id, 4)


def test_endpoint_stimulus_on_butterfly():
    cfg = parse_config(
        "[experiment]\nmode = pulse\ntopology = butterfly4\n"
        "[stimulus]\nep1.0 = dest=2 data=[1]\nep3.0 = dest=2 data=[2]\nep4.1 = dest=1 data=[3]\n"
    )
    stimulus = network_stimulus(cfg)
    assert stimulus == [{1: Packet(2, {1}), 3: Packet(2, {2})}, {4: Packet(1, {3})}]
    result = run_network_epochs("butterfly4", stimulus, name="stimulus")
    delivered = [p for p in result.packets if p["deliver_epoch"] is not None]
    assert [(p["src"], p["deliver_epoch"]) for p in delivered if p["dst"] == 1] == [(4, 1)]
    assert sum(p["dst"] == 2 for p in delivered) == 1
    assert sum(row["event"] == "retire" for row in result.rows) == 1


def test_run_mesh_pulse_config(tmp_path):
    cfg = load_config(CONFIG_DIR / "fig14_pulse.ini").with_overrides(out=str(tmp_path))
    outputs = run(cfg)
    assert outputs["trace"].name == "trace.vcd"
    rows = read_rows(outputs["packets"])
    assert [int(row["deliver_epoch"]) for row in rows] == [0, 1, 0]


# ========================
# RUN
# ========================

def test_run_fig11_writes_artifacts(tmp_path):
    cfg = load_config(CONFIG_DIR / "fig11.ini").with_overrides(out=str(tmp_path))
    outputs = run(cfg)
    assert set(outputs) == {"results", "packets", "area", "graph", "metadata"}
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["outputs"]["packets"] == {"file": "packets.csv", "module": "flit-sim", "operation": "FlitNetwork.step"}
    assert meta["config"]["scenario"] == "fig11"
    assert (tmp_path / "topology.dot").read_text().startswith('digraph "butterfly4"')


def test_pulse_trace_is_reproducible(tmp_path):
    cfg = load_config(CONFIG_DIR / "fig9.ini")
    first = run(cfg.with_overrides(out=str(tmp_path / "one")))
    second = run(cfg.with_overrides(out=str(tmp_path / "two")))
    assert first["trace"].name == "trace.vcd"
    assert first["trace"].read_bytes() == second["trace"].read_bytes()
    assert first["results"].read_bytes() == second["results"].read_bytes()


def test_flit_run_outputs(tmp_path):
    outputs = run(config(FLIT_SMALL, tmp_path))
    assert {"results", "hops", "endpoints"} <= set(outputs)
    rows = read_rows(outputs["results"])
    assert len(rows) == 1 and rows[0]["pattern"] == "uniform"
    assert len(read_rows(outputs["endpoints"])) == 4


def test_analytic_point_rows():
    rows = run_point(parse_config("[experiment]\nmode = analytic\ntopology = butterfly4\n"))
    assert [row["case"] for row in rows] == ["best", "uniform", "worst"]
    assert {row["baseline"] for row in rows} == {"banyan4"}


def test_analyze_bundle(tmp_path, monkeypatch):
    monkeypatch.setattr(sys.modules["runner.run"], "mesh_efficiency", lambda topology, policy, case, seed=0: 0.5)
    cfg = config("[experiment]\nmode = analytic\ntopology = mesh8\n[sweep]\ndata_period = 300, 600\n", tmp_path)
    result = analyze(cfg)
    assert {"curves", "crossovers", "area", "cells", "baselines", "summary", "metadata"} == set(result["outputs"])
    assert len(result["crossovers"]) == 9
    area = json.loads((tmp_path / "area.json").read_text())
    assert area["butterfly4"]["total_with_retimers"] == 1924
    assert area["mesh8_closest_to_published"]["data_period_ps"] == 60
    curves = read_rows(tmp_path / "curves.csv")
    assert {row["data_period_ps"] for row in curves} == {"300", "600"}
    assert (tmp_path / "summary.pdf").read_bytes().startswith(b"%PDF")


# ========================
# SWEEP
# ========================

def test_sweep_resume_matches_single_pass(tmp_path):
    cfg = config(ANALYTIC_SWEEP, tmp_path / "resumed")
    path = sweep(cfg, limit=1)
    assert len(read_rows(path)) == 3
    sweep(cfg)
    full = sweep(config(ANALYTIC_SWEEP, tmp_path / "single"))
    assert path.read_bytes() == full.read_bytes()
    assert [row["data_period"] for row in read_rows(path)][::3] == ["300", "450", "600"]


def test_sweep_rerun_is_a_no_op(tmp_path):
    cfg = config(ANALYTIC_SWEEP, tmp_path)
    path = sweep(cfg)
    before = path.read_bytes()
    sweep(cfg)
    assert path.read_bytes() == before


@pytest.mark.parametrize("text", [
    "[experiment]\nmode = analytic\ntopology = router2\n",
    "[experiment]\nmode = pulse\ntopology = router2\nscenario = fig9\n[sweep]\nseed = 1, 2\n",
])
def test_sweep_rejects(text, tmp_path):
    with pytest.raises(ConfigError):
        sweep(config(text, tmp_path))
