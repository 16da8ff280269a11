# validators/config_input.py
from typing import Any, Dict, Iterable, Type

from validators.errors import ConfigError, InvalidEpoch, UnsupportedPolicy

MIN_DATA_SPACING_PS = 15

# -----------------------------
# GENERAL HELPERS
# -----------------------------
def validate_required_fields(data: Dict[str, Any], fields: list, context: str = "",
                             error_cls: Type[ValueError] = ConfigError) -> None:
    missing = [f for f in fields if f not in data or data[f] is None]
    if missing:
        ctx = f" in {context}" if context else ""
        raise error_cls(f"Missing required fields{ctx}: {missing}")


def validate_type(value, field, expected_type, context="", error_cls: Type[ValueError] = ConfigError):
    # bool is an int subclass; never accept it where a number is asked for
    if isinstance(value, bool) and expected_type is not bool and bool not in _as_tuple(expected_type):
        raise error_cls(f"{field} must be a number, got a boolean for {context}")
    if not isinstance(value, expected_type):
        if expected_type is bool:
            raise error_cls(f"{field} must be True or False")
        names = "/".join(t.__name__ for t in _as_tuple(expected_type))
        raise error_cls(f"{field} must be of type {names} for {context}")


def validate_range(value: float, field: str, min_val: float, max_val: float, inclusive: bool = True,
                   context: str = "", error_cls: Type[ValueError] = ConfigError) -> None:
    ctx = f" in {context}" if context else ""
    if inclusive:
        if not (min_val <= value <= max_val):
            raise error_cls(f"{field}{ctx} out of range: {value} (expected between {min_val} and {max_val})")
    else:
        if not (min_val < value < max_val):
            raise error_cls(f"{field}{ctx} out of range: {value} (expected >{min_val} and <{max_val})")


def validate_in_set(value: Any, field: str, valid_set: Iterable, context: str = "",
                    error_cls: Type[ValueError] = ConfigError) -> None:
    valid = set(valid_set)
    if value not in valid:
        ctx = f" in {context}" if context else ""
        raise error_cls(f"Invalid value for '{field}'{ctx}: '{value}'. Must be one of {sorted(valid)}")


def _as_tuple(expected_type) -> tuple:
    return expected_type if isinstance(expected_type, tuple) else (expected_type,)


# -----------------------------
# EPOCH GEOMETRY
# -----------------------------
def validate_epoch_input(num_destinations: int, control_slot: int, data_spacing: int, data_period: int) -> None:
    """
    Validate the geometry of one epoch.

    Raises:
        InvalidEpoch: non-integer fields, spacing below the 15 ps minimum, or a
            data period that is not a whole number of data slots.
    """
    ctx = "EpochConfig"
    for name, value in (("num_destinations", num_destinations), ("control_slot", control_slot),
                        ("data_spacing", data_spacing), ("data_period", data_period)):
        validate_type(value, name, int, ctx, error_cls=InvalidEpoch)

    validate_range(num_destinations, "num_destinations", 1, 4096, context=ctx, error_cls=InvalidEpoch)
    validate_range(control_slot, "control_slot", 1, 10_000, context=ctx, error_cls=InvalidEpoch)
    if data_spacing < MIN_DATA_SPACING_PS:
        raise InvalidEpoch(f"data_spacing in {ctx} must be at least {MIN_DATA_SPACING_PS} ps, got {data_spacing}")
    if data_period < 0:
        raise InvalidEpoch(f"data_period in {ctx} must be non-negative, got {data_period}")
    if data_period % data_spacing != 0:
        raise InvalidEpoch(
            f"data_period ({data_period} ps) in {ctx} must be divisible by data_spacing ({data_spacing} ps)"
        )


# -----------------------------
# ROUTER
# -----------------------------
POLICIES = {"fixed_priority", "round_robin", "randomized_rr"}


def validate_router_input(policy: str, thr_slot: int, num_destinations: int) -> None:
    if not isinstance(policy, str):
        raise UnsupportedPolicy(f"policy must be a string, got {policy!r}")
    validate_in_set(policy, "policy", POLICIES, "RouterConfig", error_cls=UnsupportedPolicy)
    validate_type(thr_slot, "thr_slot", int, "RouterConfig", error_cls=InvalidEpoch)
    validate_range(thr_slot, "thr_slot", 0, num_destinations, context="RouterConfig", error_cls=InvalidEpoch)


# -----------------------------
# TRAFFIC
# -----------------------------
def validate_traffic_input(kind: str, n_endpoints: int, rate: float, valid_kinds: Iterable[str]) -> None:
    validate_in_set(kind, "pattern", valid_kinds, "TrafficPattern")
    validate_type(n_endpoints, "n_endpoints", int, "TrafficPattern")
    validate_range(n_endpoints, "n_endpoints", 2, 1 << 16, context="TrafficPattern")
    validate_type(rate, "rate", (int, float), "TrafficPattern")
    validate_range(rate, "rate", 0.0, 1.0, context="TrafficPattern")


# -----------------------------
# EXPERIMENT
# -----------------------------
# field -> "section.key" as written in experiment config files
EXPERIMENT_FIELDS = {
    "mode": "experiment.mode",
    "topology": "experiment.topology",
    "scenario": "experiment.scenario",
    "seed": "experiment.seed",
    "data_period": "epoch.data_period",
    "policy": "router.policy",
    "rand_q": "router.rand_q",
    "rand_source": "router.rand_source",
    "jitter_ps": "router.jitter_ps",
    "pattern": "traffic.pattern",
    "rate": "traffic.rate",
    "warmup": "traffic.warmup",
    "sample_epochs": "traffic.sample",
    "cases": "traffic.cases",
    "trace": "output.trace",
    "workers": "output.workers",
}


def validate_experiment_input(data: Dict[str, Any], choices: Dict[str, Iterable]) -> None:
    """
    Validate the fields of an experiment config.

    Args:
        data: field name -> parsed value.
        choices: field name -> allowed values, for the enumerated fields.

    Raises:
        ConfigError: located by ``section.key``.
    """
    def where(name: str) -> str:
        return EXPERIMENT_FIELDS.get(name, name)

    missing = [f for f in ("mode", "topology") if not data.get(f)]
    if missing:
        raise ConfigError(f"Missing required fields in experiment: {missing}", field=where(missing[0]))

    for name, allowed in choices.items():
        value = data.get(name)
        if value is None:
            continue
        for item in value if isinstance(value, tuple) else (value,):
            try:
                validate_in_set(item, name, allowed, "experiment config")
            except ConfigError as exc:
                raise ConfigError(exc.message, field=where(name)) from None

    bounds = (
        ("seed", 0, 2**32 - 1), ("rate", 0.0, 1.0), ("rand_q", 0.0, 1.0), ("jitter_ps", 0, 1000),
        ("workers", 1, 256), ("warmup", 0, 10**9), ("sample_epochs", 1, 10**9), ("data_period", 0, 100_000),
    )
    for name, low, high in bounds:
        value = data.get(name)
        if value is None:
            continue
        try:
            validate_range(value, name, low, high, context="experiment config")
        except ConfigError as exc:
            raise ConfigError(exc.message, field=where(name)) from None

    if data.get("mode") == "flit" and data.get("warmup", 0) >= data.get("sample_epochs", 1):
        raise ConfigError(
            f"warmup ({data['warmup']}) must be shorter than the sample window ({data['sample_epochs']})",
            field=where("warmup"),
        )
