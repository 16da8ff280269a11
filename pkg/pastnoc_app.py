# pastnoc_app.py
import argparse
import sys
from typing import List, Optional

from runner.config import TRACES, load_config
from runner.run import analyze, run, validate
from runner.sweep import sweep
from ui.templates import BANNER, MISMATCH_MESSAGE, format_crossovers, format_error, format_run_summary, \
    format_validation
from utils.logger import configure_logging, log_usage
from validators.errors import MismatchReport

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISMATCH = 3


def _config(args):
    cfg = load_config(args.config)
    return cfg.with_overrides(seed=args.seed, out=args.out, workers=args.workers, trace=args.trace)


# -----------------------------
# simulate
# -----------------------------
def run_simulate(args) -> int:
    inputs = {"config": args.config, "seed": args.seed, "out": args.out, "trace": args.trace}
    try:
        cfg = _config(args)
        outputs = run(cfg)
        print(format_run_summary("simulate", cfg.topology, cfg.mode, outputs))
        log_usage("simulate", inputs, sorted(outputs))
        return EXIT_OK
    except ValueError as e:
        log_usage("simulate", inputs, f"Error: {str(e)}")
        print(format_error(e), file=sys.stderr)
        return EXIT_CONFIG


# -----------------------------
# sweep
# -----------------------------
def run_sweep(args) -> int:
    inputs = {"config": args.config, "seed": args.seed, "out": args.out, "workers": args.workers}
    try:
        cfg = _config(args)
        path = sweep(cfg, limit=args.limit)
        print(format_run_summary("sweep", cfg.topology, cfg.mode, {"sweep": path}))
        log_usage("sweep", inputs, str(path))
        return EXIT_OK
    except ValueError as e:
        log_usage("sweep", inputs, f"Error: {str(e)}")
        print(format_error(e), file=sys.stderr)
        return EXIT_CONFIG


# -----------------------------
# analyze
# -----------------------------
def run_analyze(args) -> int:
    inputs = {"config": args.config, "out": args.out}
    try:
        cfg = _config(args) if args.config else None
        result = analyze(cfg, out_dir=args.out)
        print(format_crossovers(result["crossovers"]))
        print(format_run_summary("analyze", "reference set", "analytic", result["outputs"]))
        log_usage("analyze", inputs, sorted(result["outputs"]))
        return EXIT_OK
    except ValueError as e:
        log_usage("analyze", inputs, f"Error: {str(e)}")
        print(format_error(e), file=sys.stderr)
        return EXIT_CONFIG


# -----------------------------
# validate
# -----------------------------
def run_validate(args) -> int:
    inputs = {"config": args.config, "policies": args.policy, "epochs": args.epochs, "seed": args.seed}
    try:
        cfg = _config(args) if args.config else None
        policies = args.policy or ([cfg.policy] if cfg is not None else
                                   ["fixed_priority", "round_robin", "randomized_rr"])
        seed = args.seed if args.seed is not None else (cfg.seed if cfg is not None else 0)
        jitter = cfg.jitter_ps if cfg is not None else 0
        results = validate(policies, epochs=args.epochs, seed=seed, jitter_ps=jitter)
        print(format_validation(results))
        log_usage("validate", inputs, f"{len(results)} checks passed")
        return EXIT_OK
    except MismatchReport as e:
        log_usage("validate", inputs, f"Mismatch: {str(e)}")
        print(MISMATCH_MESSAGE.format(message=e), file=sys.stderr)
        return EXIT_MISMATCH
    except ValueError as e:
        log_usage("validate", inputs, f"Error: {str(e)}")
        print(format_error(e), file=sys.stderr)
        return EXIT_CONFIG


# -----------------------------
# Command line
# -----------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pastnoc", description=BANNER)
    parser.add_argument("--log-file", default="pastnoc.log", help="log destination ('' for stderr)")
    verbs = parser.add_subparsers(dest="verb", required=True)

    def common(p, config_required: bool):
        p.add_argument("--config", required=config_required, help="experiment config (INI)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--trace", choices=TRACES, default=None)

    p = verbs.add_parser("simulate", help="run one configured experiment")
    common(p, True)
    p.set_defaults(handler=run_simulate)

    p = verbs.add_parser("sweep", help="run the [sweep] cross product (resumable)")
    common(p, True)
    p.add_argument("--limit", type=int, default=None, help="stop after this many new points")
    p.set_defaults(handler=run_sweep)

    p = verbs.add_parser("analyze", help="goodput curves, crossovers, area manifests")
    common(p, False)
    p.set_defaults(handler=run_analyze)

    p = verbs.add_parser("validate", help="cross-validate the router netlist against the behavioral model")
    common(p, False)
    p.add_argument("--policy", action="append", default=None)
    p.add_argument("--epochs", type=int, default=1000)
    p.set_defaults(handler=run_validate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_file or None)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
