"""Single-pool delta-GLMB recursion with verified child ranking."""
from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Sequence

from .dependent import DependentStructure, Independence, orders_conflict
from .hypothesis import (ClutterModel, GaussianTrack, Hypothesis, Label,
                         MeasurementFrame, build_cost_matrix, predicted_tracks,
                         root_hypothesis)
from .kinematics import GaussianState, NcvModel
from .propose_verify import ChildStream


class FilterCollapseError(RuntimeError):
    """Every child of every parent was ruled out."""

    def __init__(self, frame: int, message: str):
        super().__init__(f"frame {frame}: {message}")
        self.frame = frame


@dataclass(frozen=True)
class FilterConfig:
    pd: float = 0.99
    ps: float = 0.999
    r_birth: float = 0.5
    birth_mean: tuple[float, float] = (0.0, 0.0)
    birth_cov: tuple[tuple[float, float], tuple[float, float]] = ((100.0, 0.0), (0.0, 25.0))
    clutter: ClutterModel = field(default_factory=ClutterModel)
    gate: float = 20.0
    max_hypotheses: int = 100
    structure: DependentStructure = field(default_factory=Independence)
    ncv: NcvModel = field(default_factory=NcvModel)
    proposal_cap_factor: int = 50
    history_depth: int = 5

    def __post_init__(self):
        for name in ("pd", "ps", "r_birth"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.max_hypotheses < 1:
            raise ValueError("max_hypotheses must be >= 1")
        if self.proposal_cap_factor < 1:
            raise ValueError("proposal_cap_factor must be >= 1")
        if self.history_depth < 1:
            raise ValueError("history_depth must be >= 1")

    def birth_state(self) -> GaussianState:
        return GaussianState.from_arrays(self.birth_mean, self.birth_cov)


@dataclass(frozen=True)
class HistoryEntry:
    id: int
    parent_id: int
    frame: int
    associations: dict
    raw_log_weight: float
    log_weight: float
    would_collide: bool
    is_best: bool


class HypothesisLog:
    """Append-only record of selected hypotheses, trimmed to recent frames."""

    def __init__(self, depth: int | None = 5):
        self.depth = depth
        self._frames: deque[tuple[int, list[HistoryEntry]]] = deque()

    def append_frame(self, frame: int, entries: list[HistoryEntry]) -> None:
        self._frames.append((frame, entries))
        if self.depth is not None:
            while self._frames and self._frames[0][0] <= frame - self.depth:
                self._frames.popleft()

    def entries(self, since_frame: int | None = None) -> list[HistoryEntry]:
        return [e for f, batch in self._frames
                if since_frame is None or f >= since_frame for e in batch]

    @property
    def last_frame(self) -> int | None:
        return self._frames[-1][0] if self._frames else None


@dataclass(frozen=True)
class FilterState:
    hypotheses: tuple[Hypothesis, ...]
    frame: int
    history: HypothesisLog
    next_id: int = 1
    stats: dict = field(default_factory=dict)

    def weights(self) -> list[float]:
        return [math.exp(h.log_weight) for h in self.hypotheses]


def initial_state(config: FilterConfig | None = None) -> FilterState:
    depth = config.history_depth if config is not None else 5
    return FilterState((root_hypothesis(),), -1, HypothesisLog(depth))


def _logsumexp(values: Sequence[float]) -> float:
    top = max(values)
    return top + math.log(math.fsum(math.exp(v - top) for v in values))


def child_streams(state: FilterState, frame: MeasurementFrame,
                  config: FilterConfig) -> list[ChildStream]:
    """One lazy verified-child stream per parent hypothesis."""
    birth = GaussianTrack(Label(frame.frame, 0), config.birth_state(), True)
    cap = config.proposal_cap_factor * config.max_hypotheses
    streams = []
    for parent in state.hypotheses:
        tracks = predicted_tracks(parent, birth, config.ncv)
        costs, legend = build_cost_matrix(
            tracks, frame, config.clutter, config.pd, config.ps, config.r_birth,
            config.gate, config.structure.optimistic_miss, config.ncv)
        streams.append(ChildStream(parent, costs, legend, config.structure,
                                   frame, config.ncv, config.pd, cap))
    return streams


def select_children(streams: Sequence[ChildStream], k: int) -> list[tuple[int, Hypothesis]]:
    """Global top-``k`` children across parents, round robin over a buffer.

    The buffer holds each parent's best remaining child; the best entry in
    it is taken and refilled from the same parent.
    """
    buffer = []
    for idx, stream in enumerate(streams):
        item = stream.pop()
        if item is not None:
            heapq.heappush(buffer, (-item[0].log_weight, idx, stream.popped, item[0]))
    selected = []
    while buffer and len(selected) < k:
        _, idx, _, child = heapq.heappop(buffer)
        selected.append((idx, child))
        item = streams[idx].pop()
        if item is not None:
            heapq.heappush(buffer, (-item[0].log_weight, idx, streams[idx].popped, item[0]))
    return selected


def step(state: FilterState, frame: MeasurementFrame, config: FilterConfig) -> FilterState:
    """Joint predict-update of every hypothesis and truncation to ``K``."""
    if frame.frame != state.frame + 1:
        raise ValueError(f"expected frame {state.frame + 1}, got {frame.frame}")
    streams = child_streams(state, frame, config)
    selected = select_children(streams, config.max_hypotheses)
    if not selected:
        raise FilterCollapseError(
            frame.frame, f"no admissible child among {len(streams)} parents "
            f"under {config.structure.name}; check the configuration")

    norm = _logsumexp([child.log_weight for _, child in selected])
    next_id = state.next_id
    hypotheses = []
    entries = []
    for idx, child in selected:
        parent = streams[idx].parent
        h = replace(child, id=next_id, log_weight=child.log_weight - norm,
                    optimistic_log_weight=child.optimistic_log_weight - norm)
        next_id += 1
        hypotheses.append(h)
        entries.append(HistoryEntry(
            id=h.id, parent_id=parent.id, frame=frame.frame,
            associations=dict(h.associations), raw_log_weight=child.log_weight,
            log_weight=h.log_weight,
            would_collide=bool(orders_conflict(parent.positions(), h.positions())),
            is_best=False))
    best = max(range(len(hypotheses)), key=lambda i: (hypotheses[i].log_weight, -hypotheses[i].id))
    entries[best] = replace(entries[best], is_best=True)
    state.history.append_frame(frame.frame, entries)

    stats = {
        "frame": frame.frame,
        "parents": len(streams),
        "hypotheses": len(hypotheses),
        "proposals": sum(s.proposals for s in streams),
        "certificates": sum(s.certificates for s in streams),
        "impossible": sum(s.impossible for s in streams),
        "demoted": sum(s.demoted for s in streams),
        "capped_parents": sum(s.capped for s in streams),
        "would_collide": sum(e.would_collide for e in entries),
        "best_weight": math.exp(hypotheses[best].log_weight),
    }
    return FilterState(tuple(hypotheses), frame.frame, state.history, next_id, stats)


def best_hypothesis(state: FilterState) -> Hypothesis:
    if not state.hypotheses:
        raise ValueError("empty filter state")
    return min(state.hypotheses, key=lambda h: (-h.log_weight, h.id))


def best_estimate(state: FilterState) -> list[tuple[Label, GaussianState]]:
    """Tracks of the highest-weight hypothesis (lowest id on ties)."""
    return [(t.label, t.state)
            for t in sorted(best_hypothesis(state).posterior_tracks, key=lambda t: t.label)]


def track_history(states: Sequence[FilterState]) -> dict[Label, list[tuple[int, float, float]]]:
    """Best-estimate positions joined across frames by label."""
    out: dict[Label, list] = {}
    for st in states:
        for label, gs in best_estimate(st):
            out.setdefault(label, []).append((st.frame, gs.pos, gs.pos_std))
    return out


def overtakes_between(frame: int, before: dict, after: dict) -> list[tuple[int, Label, Label]]:
    return [(frame, a, b) for a, b in orders_conflict(before, after)]


def detect_overtakes(states: Sequence[FilterState]) -> list[tuple[int, Label, Label]]:
    """Frames where a persistent pair of best-estimate tracks swapped order."""
    events = []
    previous = None
    for st in states:
        current = {label: gs.pos for label, gs in best_estimate(st)}
        if previous is not None:
            events.extend(overtakes_between(st.frame, previous, current))
        previous = current
    return events
