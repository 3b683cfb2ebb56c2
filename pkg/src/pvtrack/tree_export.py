"""Graphviz DOT rendering of the recent hypothesis tree.

Node shapes: diamond for the current frame, doubleoctagon for a child that
would count as a collision against its parent, ellipse otherwise. The best
hypothesis of each frame gets a blue border. Line one of a node lists
``track.meas`` pairs (track ID in red, no ``.meas`` for a missed
detection); line two is the frame number, followed by ``:0`` on diamonds
since there is a single hypothesis pool.
"""
from __future__ import annotations

import math
from typing import Iterable

from .glmb import HistoryEntry, HypothesisLog
from .hypothesis import DIED, MISSED

HEAD = "head"


def _node_label(entry: HistoryEntry, current: bool) -> str:
    pairs = []
    for label, outcome in sorted(entry.associations.items()):
        if outcome == DIED or (outcome == MISSED and label.birth_frame == entry.frame):
            continue
        tid = f'<font color="red">{label}</font>'
        pairs.append(f"{tid}.{outcome}" if outcome >= 1 else tid)
    line1 = ", ".join(pairs) if pairs else "&empty;"
    line2 = f"{entry.frame}:0" if current else f"{entry.frame}"
    return f'<{line1}<br/><font color="gray">{line2}</font>>'


def export_tree(history: HypothesisLog | Iterable[HistoryEntry], current_frame: int,
                generations: int = 5) -> str:
    """DOT text for hypotheses of the last ``generations`` frames.

    Edges come from the parent when it is inside the window, otherwise from
    ``head`` with the frame number in orange. Edge labels carry the
    normalised hypothesis weight.
    """
    if generations < 1:
        raise ValueError("generations must be >= 1")
    entries = history.entries() if isinstance(history, HypothesisLog) else list(history)
    first = current_frame - generations + 1
    window = sorted((e for e in entries if first <= e.frame <= current_frame),
                    key=lambda e: e.id)
    ids = {e.id for e in window}

    lines = ["digraph hypotheses {", "  rankdir=LR;",
             '  node [fontname="Helvetica"];',
             f'  {HEAD} [shape=box, label="head"];']
    for e in window:
        current = e.frame == current_frame
        shape = "diamond" if current else ("doubleoctagon" if e.would_collide else "ellipse")
        attrs = [f"shape={shape}", f"label={_node_label(e, current)}"]
        if e.is_best:
            attrs += ["color=blue", "penwidth=2"]
        lines.append(f"  h{e.id} [{', '.join(attrs)}];")
    for e in window:
        weight = f"{math.exp(e.log_weight):.4g}"
        if e.parent_id in ids:
            lines.append(f'  h{e.parent_id} -> h{e.id} [label="{weight}"];')
        else:
            lines.append(f'  {HEAD} -> h{e.id} [label=<{weight} '
                         f'<font color="orange">{e.frame}</font>>];')
    lines.append("}")
    return "\n".join(lines) + "\n"
