# runner/sweep.py
"""
Cross-product sweeps over the ``[sweep]`` axes of a config.

Points run in a worker pool in batches; after every batch the aggregated CSV
is rewritten sorted by key, so a rerun skips whatever is already on disk and
ends with the same file an uninterrupted sweep would have written.
"""
import itertools
import logging
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from reports.artifacts import read_rows, write_rows
from runner.config import ExperimentConfig
from runner.run import run_point
from validators.errors import ConfigError

logger = logging.getLogger(__name__)

BATCH_PER_WORKER = 4
SWEEP_FILE = "sweep.csv"


def sweep_points(cfg: ExperimentConfig) -> List[Dict[str, Any]]:
    """Every combination of axis values, first axis slowest."""
    names = [name for name, _ in cfg.sweep]
    return [dict(zip(names, combo)) for combo in itertools.product(*(values for _, values in cfg.sweep))]


def _norm(value: Any) -> str:
    try:
        return repr(float(value))
    except (TypeError, ValueError):
        return str(value)


def point_key(row: Dict[str, Any], names: Sequence[str]) -> Tuple[str, ...]:
    return tuple(_norm(row[name]) for name in names)


def _order(row: Dict[str, Any], names: Sequence[str]) -> Tuple[Tuple[int, Any], ...]:
    # numbers before text, numbers by value
    out = []
    for name in names:
        try:
            out.append((0, float(row[name])))
        except (TypeError, ValueError):
            out.append((1, str(row[name])))
    return tuple(out)


def _run_point(job: Tuple[ExperimentConfig, Dict[str, Any]]) -> List[Dict[str, Any]]:
    base, values = job
    rows = run_point(base.point(**values))
    return [{**values, **row} for row in rows]


def _batches(items: List[Any], size: int) -> Iterator[List[Any]]:
    for start in range(0, len(items), size):
        yield items[start:start + size]


def sweep(cfg: ExperimentConfig, path: Optional[Path] = None, limit: Optional[int] = None) -> Path:
    """
    Run every pending point and keep ``path`` sorted by its key columns.

    Args:
        cfg: config with at least one sweep axis.
        path: aggregated CSV (default ``<out_dir>/sweep.csv``).
        limit: stop after this many new points (the file stays resumable).

    Raises:
        ConfigError: no sweep axis, or a pulse-mode config.
    """
    if not cfg.sweep:
        raise ConfigError("sweep needs at least one axis in [sweep]", field="sweep")
    if cfg.mode == "pulse":
        raise ConfigError("pulse mode runs single scenarios; sweep flit or analytic configs",
                          field="experiment.mode")
    path = Path(path) if path is not None else Path(cfg.out_dir) / SWEEP_FILE
    names = [name for name, _ in cfg.sweep]
    sort_names = names + (["case"] if cfg.mode == "analytic" and "case" not in names else [])

    rows: List[Dict[str, Any]] = read_rows(path)
    done = {point_key(row, names) for row in rows}
    pending = [p for p in sweep_points(cfg) if point_key(p, names) not in done]
    if done:
        logger.info(f"sweep resume: {len(done)} points on disk, {len(pending)} pending")
    if limit is not None:
        pending = pending[:limit]

    workers = max(1, cfg.workers)
    pool = Pool(workers) if workers > 1 and len(pending) > 1 else None
    try:
        for batch in _batches(pending, workers * BATCH_PER_WORKER):
            jobs = [(cfg, values) for values in batch]
            results = pool.map(_run_point, jobs) if pool is not None else [_run_point(job) for job in jobs]
            for point_rows in results:
                rows.extend(point_rows)
            rows.sort(key=lambda row: _order(row, sort_names))
            write_rows(rows, path)
            logger.info(f"sweep: {len(rows)} rows in {path}")
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    if not pending and not path.exists():
        write_rows(rows, path)
    return path
