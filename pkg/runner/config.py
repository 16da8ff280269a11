# runner/config.py
"""
Experiment configuration: INI files parsed into a frozen ``ExperimentConfig``.

    [experiment]
    mode = flit               ; pulse | flit | analytic
    topology = cmesh32
    scenario = fig14          ; optional named scenario
    seed = 1

    [epoch]
    data_period = 300         ; control_slot / data_spacing optional

    [router]
    policy = round_robin

    [traffic]
    pattern = tornado
    rate = 0.4

    [sweep]
    data_period = 150:1890:15 ; start:stop:step, stop included
    rate = 0.1, 0.2, 0.4

    [output]
    dir = results
    trace = vcd

    [stimulus]
    a.0 = dest=1 data=[1,5]   ; pulse mode on router2: input a / b, epoch index
    ep3.0 = dest=2 data=[4]   ; pulse mode on a network: endpoint, epoch index
"""
import configparser
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from calculators.baselines import CASES
from flitsim.traffic import PATTERNS
from packet.epoch import Packet
from topology import NAMED_TOPOLOGIES, PULSE_MAX_ENDPOINTS, build_topology, topology_size
from topology.pulsenet import check_pulse_geometry
from validators.config_input import POLICIES, validate_experiment_input
from validators.errors import ConfigError, PastNocError

MODES = ("pulse", "flit", "analytic")
TRACES = ("none", "vcd", "csv")
# scenario -> (modes, topology) it runs in
SCENARIOS = {
    "fig9": (("pulse",), "router2"),
    "fig11": (("flit", "pulse"), "butterfly4"),
    "fig14": (("flit", "pulse"), "mesh8"),
}
RAND_SOURCES = ("rng", "lfsr")
SECTIONS = ("experiment", "epoch", "router", "traffic", "sweep", "output", "stimulus")
SWEEP_AXES = ("data_period", "rate", "seed", "pattern", "case", "policy", "topology")
INT_AXES = ("data_period", "seed")
LONGEST_DATA_PERIOD = 1890
FLOAT_AXES = ("rate",)

_RANGE = re.compile(r"^\s*(-?\d+(?:\.\d+)?)\s*:\s*(-?\d+(?:\.\d+)?)\s*:\s*(\d+(?:\.\d+)?)\s*$")
_STIMULUS_KEY = re.compile(r"^([ab]|ep\d+)\.(\d+)$")


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "flit"
    topology: str = "router2"
    name: str = "experiment"
    scenario: Optional[str] = None
    seed: int = 0
    control_slot: Optional[int] = None
    data_spacing: Optional[int] = None
    data_period: int = 300
    policy: str = "round_robin"
    rand_q: float = 0.25
    rand_source: str = "rng"
    jitter_ps: int = 0
    pattern: str = "uniform"
    rate: float = 0.5
    warmup: int = 1000
    sample_epochs: int = 10_000
    reinject: bool = True
    cases: Tuple[str, ...] = ("best", "uniform", "worst")
    sweep: Tuple[Tuple[str, Tuple[Any, ...]], ...] = ()
    out_dir: str = "results"
    trace: str = "none"
    workers: int = 1
    stimulus: Tuple[Tuple[int, str, Packet], ...] = ()
    source: Optional[str] = field(default=None, compare=False)

    @property
    def axes(self) -> Dict[str, Tuple[Any, ...]]:
        return dict(self.sweep)

    def with_overrides(self, seed: Optional[int] = None, out: Optional[str] = None, workers: Optional[int] = None,
                       trace: Optional[str] = None) -> "ExperimentConfig":
        """Apply command-line flags on top of the file values."""
        changes: Dict[str, Any] = {}
        if seed is not None:
            changes["seed"] = seed
        if out is not None:
            changes["out_dir"] = out
        if workers is not None:
            changes["workers"] = workers
        if trace is not None:
            changes["trace"] = trace
        cfg = replace(self, **changes)
        check_experiment(_as_fields(cfg))
        return cfg

    def point(self, **values: Any) -> "ExperimentConfig":
        """One sweep point: the given axis values replace the base fields."""
        mapped = {("sample_epochs" if k == "sample" else k): v for k, v in values.items() if k != "case"}
        if "case" in values:
            mapped["cases"] = (values["case"],)
        return replace(self, sweep=(), **mapped)

    def as_dict(self) -> Dict[str, Any]:
        out = _as_fields(self)
        out["sweep"] = {k: list(v) for k, v in self.sweep}
        out["stimulus"] = [{"epoch": k, "input": side, "packet": pkt.literal()} for k, side, pkt in self.stimulus]
        out.pop("source")
        return out


def _as_fields(cfg: ExperimentConfig) -> Dict[str, Any]:
    return {name: getattr(cfg, name) for name in cfg.__dataclass_fields__}


# -----------------------------
# VALUE PARSERS
# -----------------------------
def parse_axis(name: str, text: str) -> Tuple[Any, ...]:
    """
    ``start:stop:step`` (stop included) or a comma list.

    Raises:
        ConfigError: empty axis, zero step, or values of the wrong type.
    """
    match = _RANGE.match(text)
    if match:
        start, stop, step = (float(g) for g in match.groups())
        if step <= 0:
            raise ConfigError(f"sweep axis '{name}' needs a positive step, got {text!r}", field=f"sweep.{name}")
        count = int(round((stop - start) / step)) + 1
        values = [start + i * step for i in range(max(count, 0)) if start + i * step <= stop + 1e-9]
    else:
        values = [tok.strip() for tok in text.split(",") if tok.strip()]
    if not values:
        raise ConfigError(f"sweep axis '{name}' is empty", field=f"sweep.{name}")
    try:
        if name in INT_AXES:
            return tuple(int(round(float(v))) for v in values)
        if name in FLOAT_AXES:
            return tuple(round(float(v), 9) for v in values)
    except ValueError:
        raise ConfigError(f"sweep axis '{name}' must be numeric, got {text!r}", field=f"sweep.{name}") from None
    return tuple(str(v) for v in values)


def _line_index(text: str) -> Dict[str, int]:
    """'section.key' (and 'section') -> 1-based line number."""
    index: Dict[str, int] = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            index.setdefault(section, lineno)
            continue
        key = re.split(r"[=:]", line, maxsplit=1)[0].strip().lower()
        index.setdefault(f"{section}.{key}", lineno)
    return index


class _Reader:
    def __init__(self, parser: configparser.ConfigParser, lines: Dict[str, int]):
        self.parser = parser
        self.lines = lines

    def error(self, message: str, where: str) -> ConfigError:
        return ConfigError(message, field=where, line=self.lines.get(where, self.lines.get(where.split(".")[0])))

    def has(self, section: str, key: str) -> bool:
        return self.parser.has_option(section, key)

    def text(self, section: str, key: str, default: Optional[str] = None) -> Optional[str]:
        if not self.has(section, key):
            return default
        value = self.parser.get(section, key).strip()
        return value if value else default

    def integer(self, section: str, key: str, default: Optional[int] = None) -> Optional[int]:
        raw = self.text(section, key)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise self.error(f"{key} must be an integer, got {raw!r}", f"{section}.{key}") from None

    def number(self, section: str, key: str, default: Optional[float] = None) -> Optional[float]:
        raw = self.text(section, key)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise self.error(f"{key} must be a number, got {raw!r}", f"{section}.{key}") from None

    def flag(self, section: str, key: str, default: bool) -> bool:
        if not self.has(section, key):
            return default
        try:
            return self.parser.getboolean(section, key)
        except ValueError:
            raise self.error(f"{key} must be true or false", f"{section}.{key}") from None


# -----------------------------
# LOADING
# -----------------------------
def parse_config(text: str, source: Optional[str] = None) -> ExperimentConfig:
    """
    Parse INI text into an ``ExperimentConfig``.

    Raises:
        ConfigError: syntax errors, unknown sections, missing or invalid
            fields; ``field`` and ``line`` locate the problem.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text, source=source or "<config>")
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key '{exc.option}'", field=f"{exc.section}.{exc.option}", line=exc.lineno)
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section '{exc.section}'", field=exc.section, line=exc.lineno)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("config must start with a [section] header", line=exc.lineno)
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line", line=lineno)

    lines = _line_index(text)
    rd = _Reader(parser, lines)
    for section in parser.sections():
        if section not in SECTIONS:
            raise rd.error(f"unknown section [{section}]; expected one of {list(SECTIONS)}", section)
    if not rd.text("experiment", "topology"):
        raise rd.error("Missing required fields in experiment: ['topology']", "experiment.topology")

    base = ExperimentConfig()
    sweep = []
    if parser.has_section("sweep"):
        for key in parser.options("sweep"):
            if key not in SWEEP_AXES:
                raise rd.error(f"unknown sweep axis '{key}'; expected one of {list(SWEEP_AXES)}", f"sweep.{key}")
            try:
                sweep.append((key, parse_axis(key, parser.get("sweep", key))))
            except ConfigError as exc:
                raise rd.error(exc.message, f"sweep.{key}") from None

    cases = rd.text("traffic", "cases")
    values = dict(
        mode=(rd.text("experiment", "mode", base.mode) or base.mode).lower(),
        topology=rd.text("experiment", "topology"),
        name=rd.text("experiment", "name", base.name),
        scenario=rd.text("experiment", "scenario"),
        seed=rd.integer("experiment", "seed", base.seed),
        control_slot=rd.integer("epoch", "control_slot"),
        data_spacing=rd.integer("epoch", "data_spacing"),
        data_period=rd.integer("epoch", "data_period", base.data_period),
        policy=rd.text("router", "policy", base.policy),
        rand_q=rd.number("router", "rand_q", base.rand_q),
        rand_source=rd.text("router", "rand_source", base.rand_source),
        jitter_ps=rd.integer("router", "jitter_ps", base.jitter_ps),
        pattern=rd.text("traffic", "pattern", base.pattern),
        rate=rd.number("traffic", "rate", base.rate),
        warmup=rd.integer("traffic", "warmup", base.warmup),
        sample_epochs=rd.integer("traffic", "sample", base.sample_epochs),
        reinject=rd.flag("traffic", "reinject", base.reinject),
        cases=tuple(c.strip() for c in cases.split(",")) if cases else base.cases,
        sweep=tuple(sweep),
        out_dir=rd.text("output", "dir", base.out_dir),
        trace=(rd.text("output", "trace", base.trace) or base.trace).lower(),
        workers=rd.integer("output", "workers", base.workers),
        stimulus=_stimulus(parser, rd),
        source=source,
    )
    try:
        check_experiment(values)
    except ConfigError as exc:
        if exc.line is None and exc.field:
            raise rd.error(exc.message, exc.field) from None
        raise
    return ExperimentConfig(**values)


def _stimulus(parser: configparser.ConfigParser, rd: _Reader) -> Tuple[Tuple[int, str, Packet], ...]:
    if not parser.has_section("stimulus"):
        return ()
    out: List[Tuple[int, str, Packet]] = []
    for key in parser.options("stimulus"):
        match = _STIMULUS_KEY.match(key)
        if not match:
            raise rd.error(f"stimulus keys look like 'a.<epoch>', 'b.<epoch>' or 'ep<n>.<epoch>', got '{key}'",
                           f"stimulus.{key}")
        try:
            pkt = Packet.parse(parser.get("stimulus", key))
        except ValueError as exc:
            raise rd.error(str(exc), f"stimulus.{key}") from None
        out.append((int(match.group(2)), match.group(1), pkt))
    return tuple(sorted(out, key=lambda item: (item[0], item[1])))


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config(text, source=str(path))


def check_experiment(values: Dict[str, Any]) -> None:
    """
    Field checks plus the pulse-mode size limit.

    Raises:
        ConfigError: located by ``section.key``.
    """
    choices = {
        "mode": MODES,
        "topology": NAMED_TOPOLOGIES,
        "scenario": SCENARIOS,
        "policy": POLICIES,
        "rand_source": RAND_SOURCES,
        "pattern": PATTERNS,
        "cases": CASES,
        "trace": TRACES,
    }
    validate_experiment_input(values, choices)
    for axis, items in dict(values.get("sweep") or ()).items():
        name = "cases" if axis == "case" else axis
        if name in choices:
            try:
                validate_experiment_input({**values, name: tuple(items)}, {name: choices[name]})
            except ConfigError as exc:
                raise ConfigError(exc.message, field=f"sweep.{axis}") from None
    if values["mode"] == "pulse" and topology_size(values["topology"]) > PULSE_MAX_ENDPOINTS:
        raise ConfigError(
            f"pulse mode is limited to topologies of at most {PULSE_MAX_ENDPOINTS} endpoints, "
            f"got {values['topology']} ({topology_size(values['topology'])})",
            field="experiment.mode",
        )
    scenario = values.get("scenario")
    if scenario is not None:
        modes, topology = SCENARIOS[scenario]
        if values["mode"] not in modes or values["topology"] != topology:
            raise ConfigError(f"scenario {scenario} runs in mode = {' or '.join(modes)} on topology = {topology}",
                              field="experiment.scenario")
    if values["mode"] == "pulse":
        _check_pulse(values)


def _check_pulse(values: Dict[str, Any]) -> None:
    topology = values["topology"]
    size = topology_size(topology)
    for k, side, _pkt in values.get("stimulus") or ():
        where = f"stimulus.{side}.{k}"
        if topology == "router2" and side.startswith("ep"):
            raise ConfigError("the 2x2 router is driven through inputs 'a' and 'b'", field=where)
        if topology != "router2" and not side.startswith("ep"):
            raise ConfigError(f"{topology} is driven per endpoint: use 'ep<n>.<epoch>' keys", field=where)
        if side.startswith("ep") and not 1 <= int(side[2:]) <= size:
            raise ConfigError(f"endpoint {side[2:]} out of range: expected between 1 and {size}", field=where)
    if topology == "router2":
        return
    problem = _pulse_problem(values, values["data_period"])
    if problem is not None:
        # a problem that a long data period does not cure lies with the router configuration
        where = "epoch.data_period" if _pulse_problem(values, LONGEST_DATA_PERIOD) is None else "router.policy"
        raise ConfigError(f"{topology} has no pulse-level schedule: {problem}", field=where)


def _pulse_problem(values: Dict[str, Any], data_period: int) -> Optional[str]:
    try:
        check_pulse_geometry(build_topology(values["topology"], policy=values["policy"], data_period=data_period,
                                            control_slot=values.get("control_slot"),
                                            data_spacing=values.get("data_spacing")))
    except PastNocError as exc:
        return str(exc)
    return None
