# tests/test_perf_models.py
import math

import pytest

from calculators.baselines import (
    BASELINES,
    PUBLISHED_CROSSOVERS,
    SRNOC_GBPS,
    baseline_catalog,
    competitor,
    parse_case,
)
from calculators.capacity import bits_per_packet
from calculators.goodput import (
    butterfly_efficiency,
    crossover,
    crossover_table,
    default_grid,
    delivery_efficiency,
    goodput_curve,
    improvement_factor,
    improvement_ratio,
    measured_efficiency,
    pastnoc_goodput,
    raw_gbps_per_port,
    scale_control_period,
    worst_case_efficiency,
)
from flitsim.metrics import measure
from flitsim.network import FlitNetwork
from flitsim.traffic import make_pattern
from packet.epoch import EpochConfig
from topology import build_topology, jj_count
from validators.errors import NoCrossover

WORST_TWO_STAGE = (-1 + math.sqrt(1 + 4 * 0.1875 * 0.5625)) / (2 * 0.1875)

# ========================
# BASELINES
# ========================

def test_srnoc_rate_and_worst_case():
    assert SRNOC_GBPS == pytest.approx(6.25)
    srnoc = BASELINES["srnoc"]
    assert srnoc.gbps_per_port("worst") == pytest.approx(6.25 / 4)
    assert srnoc.goodput("best") == pytest.approx(6.25 / 528)


@pytest.mark.parametrize("topology,expected", [
    ("router2", "banyan2"),
    ("butterfly4", "banyan4"),
    ("mesh8", "banyan8"),
])
def test_binary_competitor_is_best_of_group(topology, expected):
    assert competitor(topology, "binary").name == expected


def test_named_competitor_and_errors():
    assert competitor("butterfly4", "crossbar4").jj_count == 4316
    with pytest.raises(ValueError, match="Invalid value for 'topology'"):
        competitor("bfly32", "binary")
    with pytest.raises(ValueError, match="Invalid value for 'baseline'"):
        competitor("butterfly4", "ring")


@pytest.mark.parametrize("text,expected", [("UR", "uniform"), (" Worst ", "worst"), ("best", "best")])
def test_parse_case(text, expected):
    assert parse_case(text) == expected


def test_parse_case_rejects_unknown():
    with pytest.raises(ValueError, match="Invalid value for 'case'"):
        parse_case("adversarial")


def test_baseline_catalog():
    rows = {row["name"]: row for row in baseline_catalog()}
    assert set(rows) == set(BASELINES)
    assert rows["srnoc"]["factor_worst"] == 0.25
    assert rows["banyan8"]["jj_count"] == 12 * 1184


# ========================
# DELIVERY EFFICIENCY
# ========================

def test_closed_form_efficiencies():
    assert butterfly_efficiency(1, "best") == 1.0
    assert butterfly_efficiency(1, "worst") == 0.5
    assert butterfly_efficiency(2, "uniform") == pytest.approx(0.5625)
    assert butterfly_efficiency(5, "UR") == pytest.approx(0.75 ** 5)


def test_worst_case_fixed_point():
    assert worst_case_efficiency(2) == pytest.approx(WORST_TWO_STAGE, abs=1e-9)
    assert worst_case_efficiency(2) == pytest.approx(0.513, abs=1e-3)
    assert worst_case_efficiency(4) == pytest.approx(WORST_TWO_STAGE * 0.75 ** 2, abs=1e-9)
    with pytest.raises(ValueError):
        worst_case_efficiency(0)


def test_delivery_efficiency_prefers_measured():
    topo = build_topology("butterfly4")
    assert delivery_efficiency(topo, "uniform") == pytest.approx(0.5625)
    assert delivery_efficiency(topo, "uniform", measured=0.7) == 0.7


def test_measured_efficiency():
    assert measured_efficiency(build_topology("mesh8"), "best") == 1.0
    eff = measured_efficiency(build_topology("router2"), "uniform", warmup=20, sample_epochs=400)
    assert 0.0 < eff < 1.0


@pytest.mark.parametrize("topology,stages", [("router2", 1), ("butterfly4", 2)])
def test_uniform_efficiency_matches_flit_level(topology, stages):
    topo = build_topology(topology)
    net = FlitNetwork(topo, reinject=False, seed=4)
    metrics = measure(net, make_pattern("uniform", topo.n_endpoints, 1.0, seed=4), warmup=100, sample_epochs=20000)
    assert metrics.accepted_load == pytest.approx(butterfly_efficiency(stages, "uniform"), rel=0.02)


@pytest.mark.parametrize("data_period", [255, 300, 600, 990, 1500, 1890])
def test_retimer_share_across_data_periods(data_period):
    manifest = jj_count(build_topology("mesh8", data_period=data_period))
    assert 5.0 <= manifest["retimer_share_percent"] <= 30.0


# ========================
# GOODPUT
# ========================

def test_scale_control_period():
    assert scale_control_period(4) == 300
    assert scale_control_period(8, control_slot=50) == 450
    with pytest.raises(ValueError):
        scale_control_period(1)


def test_raw_rate():
    cfg = EpochConfig(num_destinations=4, data_period=300)
    assert raw_gbps_per_port(cfg) == pytest.approx(bits_per_packet(cfg) * 1000 / 600)
    assert raw_gbps_per_port(cfg.with_data_period(15)) == 0.0


def test_pastnoc_goodput_router2():
    topo = build_topology("router2", data_period=300)
    expected = raw_gbps_per_port(topo.epoch_cfg) * 0.75 / 481
    assert pastnoc_goodput(topo.epoch_cfg, topo, "uniform") == pytest.approx(expected)
    assert pastnoc_goodput(topo.epoch_cfg, topo, "uniform", efficiency=1.0, jj=1) == \
        pytest.approx(raw_gbps_per_port(topo.epoch_cfg))


def test_goodput_curve_columns_and_baseline():
    frame = goodput_curve("butterfly4", data_periods=[300, 600], baseline="binary")
    assert len(frame) == 6
    assert set(frame["baseline"]) == {"banyan4"}
    row = frame[(frame["case"] == "uniform") & (frame["data_period_ps"] == 300)].iloc[0]
    assert row["jj"] == 1924
    assert row["ratio"] == pytest.approx(row["gbps_per_port_per_jj"] / (40.0 / 4300))


@pytest.mark.parametrize("case", ["best", "uniform", "worst"])
def test_goodput_increases_with_data_period(case):
    frame = goodput_curve("butterfly4", [case], data_periods=default_grid(30, 1890))
    values = frame["gbps_per_port_per_jj"].tolist()
    assert all(b > a for a, b in zip(values, values[1:]))


def test_mesh_curve_uses_given_efficiencies():
    frame = goodput_curve("mesh8", ["uniform"], data_periods=[300],
                          efficiencies={"uniform": 0.6})
    assert frame.iloc[0]["efficiency"] == 0.6
    assert frame.iloc[0]["jj"] == 8160


# ========================
# COMPARISONS
# ========================

def test_improvement_ratio_edges():
    assert improvement_ratio(2.0, 1.0) == 2.0
    assert improvement_ratio(1.0, 0.0) == math.inf
    assert improvement_ratio(0.0, 0.0) == 1.0


def test_router2_crossover():
    assert crossover("router2", "binary", "uniform") == 75
    assert improvement_factor("router2", "binary", 75) >= 1.0
    assert improvement_factor("router2", "binary", 60) < 1.0


def test_no_crossover_on_short_grid():
    with pytest.raises(NoCrossover):
        crossover("butterfly4", "binary", "worst", data_periods=[30])


def test_crossover_table_lists_published_pairs():
    effs = {"mesh8": {"best": 1.0, "uniform": 0.6, "worst": 0.4}}
    table = crossover_table(efficiencies=effs)
    assert len(table) == len(PUBLISHED_CROSSOVERS)
    assert list(table.columns) == ["topology", "competitor", "case", "computed_ps", "published_ps"]
    srnoc_best = table[(table["competitor"] == "srnoc") & (table["case"] == "best")].iloc[0]
    assert srnoc_best["published_ps"] == 960
    assert table["computed_ps"].notna().all()
