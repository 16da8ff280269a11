# ui/templates.py

"""
CLI Templates
-------------
Text templates and message snippets printed by the command-line verbs.
"""
from typing import Any, Dict, Iterable, Optional

BANNER = "PaST-NoC simulator"

ERROR_MESSAGE = "Input Error: {message}"

MISMATCH_MESSAGE = "Validation mismatch: {message}"

RUN_TEMPLATE = """
{verb} finished
- topology: {topology}
- mode: {mode}
- outputs: {outputs}
"""

VALIDATION_TEMPLATE = "{policy:<15} {mode:<11} checked={checked:<6} mismatches={mismatches}"

CROSSOVER_HEADER = f"{'topology':<11} {'competitor':<10} {'case':<8} {'computed':>9} {'published':>10}"
CROSSOVER_ROW = "{topology:<11} {competitor:<10} {case:<8} {computed:>9} {published:>10}"


def format_error(message: Any) -> str:
    return ERROR_MESSAGE.format(message=message)


def format_run_summary(verb: str, topology: str, mode: str, outputs: Dict[str, Any]) -> str:
    names = ", ".join(sorted(str(v) for v in outputs.values())) or "none"
    return RUN_TEMPLATE.format(verb=verb, topology=topology, mode=mode, outputs=names)


def format_validation(results: Iterable[Dict[str, Any]]) -> str:
    return "\n".join(VALIDATION_TEMPLATE.format(**r) for r in results)


def _ps(value: Optional[Any]) -> str:
    if value is None or value == "" or (isinstance(value, float) and value != value):
        return "none"
    return f"{int(value)} ps"


def format_crossovers(rows: Iterable[Dict[str, Any]]) -> str:
    """Computed crossovers with the reported abscissas next to them."""
    lines = [CROSSOVER_HEADER]
    for r in rows:
        lines.append(CROSSOVER_ROW.format(topology=r["topology"], competitor=r["competitor"], case=r["case"],
                                          computed=_ps(r["computed_ps"]), published=_ps(r["published_ps"])))
    return "\n".join(lines)
