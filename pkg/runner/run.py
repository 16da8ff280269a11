# runner/run.py
"""
Experiment execution: one configured run, the analysis bundle and the
netlist cross-validation.

Every run writes ``results.csv``, ``area.json``, ``topology.dot`` and
``metadata.json`` into its output directory; pulse runs add a trace when
asked for one.
"""
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy

from calculators.baselines import BINARY_COMPETITORS, POWER_CONSTANTS, baseline_catalog
from calculators.capacity import CAPACITY_NOTE
from calculators.goodput import crossover_table, goodput_curve, measured_efficiency
from cells.library import write_library_manifest
from engine.trace import write_csv, write_vcd
from flitsim.metrics import measure
from flitsim.network import FlitNetwork
from flitsim.traffic import make_pattern
from packet.epoch import EpochConfig, Packet
from reports.artifacts import write_frame, write_json, write_rows
from reports.pdf import create_pdf_report
from router.behavioral import Policy, RouterConfig
from router.crossvalidate import crossvalidate
from runner.config import ExperimentConfig
from runner.scenarios import SCENARIOS, ScenarioResult, run_network_epochs, run_router_epochs
from topology import NAMED_TOPOLOGIES, PUBLISHED_MESH8_JJ, build_topology, closest_configuration, jj_count, write_dot
from topology.model import Topology
from validators.errors import ConfigError

logger = logging.getLogger(__name__)

VERSION = "0.1.0"
ASSUMPTIONS = [
    "payload bits per packet = (n - n/e) * log2(n) for n data slots",
    "only packets delivered to their own destination count towards throughput",
    "binary baselines move 1 bit per cycle per port at 40 GHz, independent of the data period",
    "the rotary baseline moves 6 bits per 64 x 15 ps window; its worst case reaches a quarter of that",
    "routers are charged at the characterised JJ count; retimers at 2 * stages + 2",
    "mesh delivery efficiency is the worst-endpoint delivered fraction of a saturated flit-level run",
]
ANALYZE_TOPOLOGIES = ("router2", "butterfly4", "mesh8")
ANALYZE_GRID = tuple(range(150, 1891, 15))
ROW_SOURCES = {
    "pulse": ("router2x2", "RouterHarness.run"),
    "flit": ("flit-sim", "measure"),
    "analytic": ("perf-models", "goodput_curve"),
}


def versions() -> Dict[str, str]:
    return {"pastnoc": VERSION, "numpy": np.__version__, "pandas": pd.__version__, "scipy": scipy.__version__}


def build_config_topology(cfg: ExperimentConfig, topology: Optional[str] = None) -> Topology:
    return build_topology(topology or cfg.topology, policy=cfg.policy, data_period=cfg.data_period,
                          control_slot=cfg.control_slot, data_spacing=cfg.data_spacing)


def _epoch_cfg(cfg: ExperimentConfig) -> EpochConfig:
    base = EpochConfig(num_destinations=2)
    return EpochConfig(2, cfg.control_slot or base.control_slot, cfg.data_spacing or base.data_spacing,
                       cfg.data_period)


# -----------------------------
# ONE POINT
# -----------------------------
def pulse_stimulus(cfg: ExperimentConfig) -> List[Tuple[Optional[Packet], Optional[Packet], bool]]:
    """Per-epoch (a, b, rand_bit) from the ``[stimulus]`` section."""
    if not cfg.stimulus:
        raise ConfigError("pulse mode needs a scenario or a [stimulus] section", field="stimulus")
    epochs = max(k for k, _, _ in cfg.stimulus) + 1
    slots: Dict[Tuple[int, str], Packet] = {(k, side): pkt for k, side, pkt in cfg.stimulus}
    rng = np.random.default_rng(cfg.seed)
    randomized = Policy.parse(cfg.policy) is Policy.RANDOMIZED_RR
    return [(slots.get((k, "a")), slots.get((k, "b")), randomized and bool(rng.random() < cfg.rand_q))
            for k in range(epochs)]


def network_stimulus(cfg: ExperimentConfig) -> List[Dict[int, Packet]]:
    """Per-epoch endpoint -> packet from ``ep<n>.<epoch>`` keys of the ``[stimulus]`` section."""
    if not cfg.stimulus:
        raise ConfigError("pulse mode needs a scenario or a [stimulus] section", field="stimulus")
    epochs = max(k for k, _, _ in cfg.stimulus) + 1
    out: List[Dict[int, Packet]] = [{} for _ in range(epochs)]
    for k, side, pkt in cfg.stimulus:
        out[k][int(side[2:])] = pkt
    return out


def run_scenario(cfg: ExperimentConfig) -> ScenarioResult:
    if cfg.scenario == "fig9":
        return SCENARIOS["fig9"](seed=cfg.seed, jitter_ps=cfg.jitter_ps)
    if cfg.scenario is not None and cfg.mode == "pulse":
        return SCENARIOS[cfg.scenario](policy=cfg.policy, seed=cfg.seed, mode="pulse", data_period=cfg.data_period)
    if cfg.scenario is not None:
        return SCENARIOS[cfg.scenario](policy=cfg.policy, seed=cfg.seed)
    if cfg.topology != "router2":
        topo = build_config_topology(cfg)
        return run_network_epochs(cfg.topology, network_stimulus(cfg), cfg.policy, seed=cfg.seed,
                                  epoch_cfg=topo.epoch_cfg, name="stimulus")
    return run_router_epochs(pulse_stimulus(cfg), cfg.policy, _epoch_cfg(cfg), seed=cfg.seed,
                             jitter_ps=cfg.jitter_ps, name="stimulus")


@lru_cache(maxsize=None)
def mesh_efficiency(topology: str, policy: str, case: str, seed: int = 0) -> float:
    return measured_efficiency(build_topology(topology, policy=policy), case, seed=seed)


def _efficiencies(topology: str, policy: str, cases: Sequence[str], seed: int) -> Optional[Dict[str, float]]:
    if build_topology(topology, policy=policy).kind == "butterfly":
        return None
    return {c: mesh_efficiency(topology, policy, c, seed) for c in cases}


def flit_metrics(cfg: ExperimentConfig):
    topo = build_config_topology(cfg)
    net = FlitNetwork(topo, seed=cfg.seed, reinject=cfg.reinject, rand_q=cfg.rand_q, rand_source=cfg.rand_source)
    pattern = make_pattern(cfg.pattern, topo.n_endpoints, cfg.rate, seed=cfg.seed, topology=topo)
    return measure(net, pattern, cfg.warmup, cfg.sample_epochs)


def analytic_rows(cfg: ExperimentConfig) -> List[Dict[str, Any]]:
    baseline = "binary" if cfg.topology in BINARY_COMPETITORS else None
    effs = _efficiencies(cfg.topology, cfg.policy, cfg.cases, cfg.seed)
    frame = goodput_curve(cfg.topology, cfg.cases, [cfg.data_period], policy=cfg.policy, baseline=baseline,
                          efficiencies=effs)
    return frame.to_dict(orient="records")


def run_point(cfg: ExperimentConfig) -> List[Dict[str, Any]]:
    """Result rows of one configuration (no files written)."""
    if cfg.mode == "pulse" or cfg.scenario is not None:
        return run_scenario(cfg).rows
    if cfg.mode == "flit":
        return [flit_metrics(cfg).as_row()]
    return analytic_rows(cfg)


# -----------------------------
# RUN
# -----------------------------
def run(cfg: ExperimentConfig) -> Dict[str, Path]:
    """
    Execute ``cfg`` and write its artifacts.

    Raises:
        ConfigError: the configuration cannot be run as given.
        InadmissiblePattern: the traffic pattern oversubscribes a destination.
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs: Dict[str, Path] = {}
    sources: Dict[str, Tuple[str, str]] = {}

    if cfg.mode == "pulse" or cfg.scenario is not None:
        result = run_scenario(cfg)
        outputs["results"] = write_rows(result.rows, out / "results.csv")
        sources["results"] = ("runner", f"scenario {result.name}")
        if result.packets:
            outputs["packets"] = write_rows(result.packets, out / "packets.csv", sort_by=["flit"])
            sources["packets"] = ("flit-sim", "FlitNetwork.step")
        if result.trace and cfg.trace == "vcd":
            outputs["trace"] = write_vcd(result.trace, out / "trace.vcd", wires=result.wires)
        elif result.trace and cfg.trace == "csv":
            outputs["trace"] = write_csv(result.trace, out / "trace.csv")
        if "trace" in outputs:
            sources["trace"] = ("pulse-engine", "Simulator.run_until")
    elif cfg.mode == "flit":
        metrics = flit_metrics(cfg)
        outputs["results"] = write_rows([metrics.as_row()], out / "results.csv")
        outputs["hops"] = write_rows(metrics.per_hop, out / "hops.csv",
                                     columns=["hop", "traversals", "deflections", "prob", "ci_low", "ci_high"])
        outputs["endpoints"] = write_rows(
            [{"endpoint": ep, "delivered_fraction": f} for ep, f in sorted(metrics.endpoint_fractions.items())],
            out / "endpoints.csv",
        )
        sources.update(results=ROW_SOURCES["flit"], hops=("flit-sim", "measure"), endpoints=("flit-sim", "measure"))
    else:
        outputs["results"] = write_rows(analytic_rows(cfg), out / "results.csv")
        sources["results"] = ROW_SOURCES["analytic"]

    topo = build_config_topology(cfg)
    outputs["area"] = write_json(jj_count(topo), out / "area.json")
    outputs["graph"] = write_dot(topo, out / "topology.dot")
    sources.update(area=("topology", "jj_count"), graph=("topology", "to_dot"))
    outputs["metadata"] = write_json(run_metadata(cfg, outputs, sources), out / "metadata.json")
    logger.info(f"run {cfg.name}: wrote {sorted(outputs)} to {out}")
    return outputs


def run_metadata(cfg: Optional[ExperimentConfig], outputs: Dict[str, Path],
                 sources: Dict[str, Tuple[str, str]]) -> Dict[str, Any]:
    return {
        "config": cfg.as_dict() if cfg is not None else None,
        "seed": cfg.seed if cfg is not None else 0,
        "versions": versions(),
        "outputs": {name: {"file": path.name, "module": sources.get(name, ("runner", "run"))[0],
                           "operation": sources.get(name, ("runner", "run"))[1]}
                    for name, path in outputs.items() if name != "metadata"},
        "assumptions": ASSUMPTIONS,
        "capacity_note": CAPACITY_NOTE,
        "power_constants": POWER_CONSTANTS,
    }


# -----------------------------
# ANALYZE
# -----------------------------
def analyze(cfg: Optional[ExperimentConfig] = None, out_dir: Optional[str] = None) -> Dict[str, Any]:
    """
    Goodput curves, crossovers and area manifests of the reference topologies.

    Returns:
        dict: ``outputs`` (name -> path) and ``crossovers`` (table rows).
    """
    policy = cfg.policy if cfg is not None else "round_robin"
    seed = cfg.seed if cfg is not None else 0
    grid = list(cfg.axes.get("data_period", ANALYZE_GRID)) if cfg is not None else list(ANALYZE_GRID)
    out = Path(out_dir or (cfg.out_dir if cfg is not None else "results"))
    out.mkdir(parents=True, exist_ok=True)

    cases = ("best", "uniform", "worst")
    efficiencies: Dict[str, Dict[str, float]] = {}
    for topology in ANALYZE_TOPOLOGIES:
        measured = _efficiencies(topology, policy, cases, seed)
        if measured is not None:
            efficiencies[topology] = measured
    frames = []
    for topology in ANALYZE_TOPOLOGIES:
        for baseline in ("binary", "srnoc") if topology == "butterfly4" else ("binary",):
            frames.append(goodput_curve(topology, cases, grid, policy=policy, baseline=baseline,
                                        efficiencies=efficiencies.get(topology)))
    curves = pd.concat(frames, ignore_index=True)
    curve_cols = ["topology", "baseline", "case", "data_period_ps", "efficiency", "jj", "gbps_per_port",
                  "gbps_per_port_per_jj", "baseline_gbps_per_port_per_jj", "ratio"]
    curves = curves[curve_cols].sort_values(["topology", "baseline", "case", "data_period_ps"], kind="mergesort")

    crossovers = crossover_table(policy, efficiencies=efficiencies)
    area = {name: jj_count(build_topology(name, policy=policy)) for name in NAMED_TOPOLOGIES}
    area["mesh8_closest_to_published"] = closest_configuration(
        lambda dp: build_topology("mesh8", policy=policy, data_period=dp), PUBLISHED_MESH8_JJ)

    outputs: Dict[str, Path] = {
        "curves": write_frame(curves.reset_index(drop=True), out / "curves.csv"),
        "crossovers": write_frame(crossovers, out / "crossovers.csv"),
        "area": write_json(area, out / "area.json"),
        "cells": write_library_manifest(out / "cells.json"),
        "baselines": write_json(baseline_catalog(), out / "baselines.json"),
    }
    rows = crossovers.to_dict(orient="records")
    summary = {
        "policy": policy,
        "data periods": f"{grid[0]}..{grid[-1]} ps ({len(grid)} points)",
        "mesh8 efficiencies": efficiencies.get("mesh8"),
        "router2 JJ": area["router2"]["total_with_retimers"],
        "butterfly4 JJ": area["butterfly4"]["total_with_retimers"],
        "mesh8 JJ at 300 ps": area["mesh8"]["total_with_retimers"],
    }
    pdf_path = out / "summary.pdf"
    create_pdf_report(summary, "PaST-NoC analysis", path=str(pdf_path), tables={"Crossovers": rows})
    outputs["summary"] = pdf_path
    sources = {"curves": ("perf-models", "goodput_curve"), "crossovers": ("perf-models", "crossover"),
               "area": ("topology", "jj_count"), "cells": ("rsfq-cells", "cell_library_manifest"),
               "baselines": ("perf-models", "baseline_catalog"), "summary": ("reports", "create_pdf_report")}
    outputs["metadata"] = write_json(run_metadata(cfg, outputs, sources), out / "metadata.json")
    return {"outputs": outputs, "crossovers": rows}


# -----------------------------
# VALIDATE
# -----------------------------
def validate(policies: Iterable[str] = ("fixed_priority", "round_robin", "randomized_rr"), epochs: int = 1000,
             seed: int = 0, jitter_ps: int = 0, epoch_cfg: Optional[EpochConfig] = None) -> List[Dict[str, Any]]:
    """
    Exhaustive and random cross-validation per policy.

    Raises:
        MismatchReport: on the first policy/mode that disagrees.
    """
    ecfg = epoch_cfg or EpochConfig(num_destinations=2)
    results = []
    for policy in policies:
        cfg = RouterConfig(Policy.parse(policy), 1, ecfg)
        results.append(crossvalidate(cfg, "exhaustive"))
        results.append(crossvalidate(cfg, "random", epochs=epochs, seed=seed, jitter_ps=jitter_ps))
    return results
