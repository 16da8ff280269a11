# topology/export.py
from pathlib import Path
from typing import Union

from topology.model import Topology


def to_dot(topo: Topology) -> str:
    """Graphviz description of the element graph (endpoints as boxes, retimed links dashed)."""
    lines = [f'digraph "{topo.name}" {{', "  rankdir=LR;"]
    for ep in sorted(topo.injection):
        lines.append(f'  "in{ep}" [shape=box, label="in {ep}"];')
        lines.append(f'  "out{ep}" [shape=box, label="out {ep}"];')
    for elem in topo.order:
        thr = "top=" + ",".join(str(d) for d in sorted(elem.top_destinations))
        lines.append(f'  "{elem.name}" [shape=circle, label="{elem.name}\\n{thr}"];')
    for ep, (elem, port) in sorted(topo.injection.items()):
        lines.append(f'  "in{ep}" -> "{elem}" [headlabel="{port}"];')
    for (elem, port), link in sorted(topo.links.items()):
        head = f"out{link.target}" if link.kind == "endpoint" else link.target
        style = ", style=dashed" if link.delay else ""
        lines.append(f'  "{elem}" -> "{head}" [taillabel="{"AB"[port]}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(topo: Topology, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(to_dot(topo))
    return path
