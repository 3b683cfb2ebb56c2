"""Labeled tracks, hypotheses and the joint predict-update cost matrix.

Association outcomes are plain integers: ``j >= 1`` is the 1-based index of
the measurement the track generated, ``MISSED`` (0) a missed detection and
``DIED`` (-1) a death. Row ``i`` of the matrix built here has three column
blocks: ``M`` detection columns, ``N`` missed columns (only column ``M+i``
allowed) and ``N`` death columns (only ``M+N+i`` allowed).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import kinematics
from .assignment import Assignment, CostMatrix
from .kinematics import GaussianState, NcvModel

MISSED = 0
DIED = -1


@dataclass(frozen=True, order=True, slots=True)
class Label:
    birth_frame: int
    birth_index: int

    def __str__(self):
        return f"{self.birth_frame}_{self.birth_index}"


@dataclass(frozen=True, slots=True)
class GaussianTrack:
    label: Label
    state: GaussianState
    is_birth_candidate: bool = False


@dataclass(frozen=True)
class MeasurementFrame:
    frame: int
    measurements: tuple[float, ...]
    # generating target per measurement (None for clutter); simulation only
    origins: tuple = ()

    def __post_init__(self):
        if self.frame < 0:
            raise ValueError("frame must be >= 0")
        object.__setattr__(self, "measurements", tuple(float(z) for z in self.measurements))

    def __len__(self):
        return len(self.measurements)


@dataclass(frozen=True, slots=True)
class ClutterModel:
    """Uniform Poisson clutter with density ``intensity`` per metre on [low, high]."""

    intensity: float = 5e-3
    low: float = -50.0
    high: float = 150.0

    def __post_init__(self):
        if not self.intensity > 0:
            raise ValueError("clutter intensity must be positive")
        if not self.low < self.high:
            raise ValueError("clutter support must have low < high")

    def density(self, z: float) -> float:
        # constant even outside [low, high]; real data may stray there
        return self.intensity

    @property
    def expected_count(self) -> float:
        return self.intensity * (self.high - self.low)


@dataclass(frozen=True)
class Hypothesis:
    id: int
    parent_id: int | None
    frame: int
    associations: Mapping[Label, int]
    posterior_tracks: tuple[GaussianTrack, ...]
    log_weight: float
    optimistic_log_weight: float
    certificate: bool = False
    optimistic_miss: bool = False
    # birth candidates scored as Missed are not instantiated, but their
    # predicted state is kept for dependence checks
    missed_births: Mapping[Label, GaussianState] = field(default_factory=dict)

    def labels(self) -> list[Label]:
        return [t.label for t in self.posterior_tracks]

    def positions(self) -> dict[Label, float]:
        return {t.label: t.state.pos for t in self.posterior_tracks}

    def track(self, label: Label) -> GaussianTrack:
        for t in self.posterior_tracks:
            if t.label == label:
                return t
        raise KeyError(label)

    def check(self) -> None:
        """Assert the structural invariants."""
        used = [j for j in self.associations.values() if j >= 1]
        assert len(used) == len(set(used)), "measurement used twice"
        assert self.log_weight <= self.optimistic_log_weight + 1e-12
        alive = {lab for lab, j in self.associations.items() if j != DIED}
        alive -= set(self.missed_births)
        assert alive == set(self.labels()), "posterior tracks do not match outcomes"


def root_hypothesis() -> Hypothesis:
    """The empty hypothesis that precedes frame 0, with weight 1."""
    return Hypothesis(id=0, parent_id=None, frame=-1, associations={},
                      posterior_tracks=(), log_weight=0.0,
                      optimistic_log_weight=0.0, certificate=True)


def psi_factor(track: GaussianTrack, outcome: int, frame: MeasurementFrame,
               clutter: ClutterModel, pd: float, optimistic_miss: bool,
               model: NcvModel) -> float:
    """Log association likelihood ratio of one track.

    Detection: ``log pd + log g(z_j | x) - log kappa(z_j)``. Missed:
    ``log(1 - pd)``, or ``0`` under the optimistic (occlusion) scoring.
    """
    if not 0.0 < pd < 1.0:
        raise ValueError("pd must lie in (0, 1)")
    if outcome >= 1:
        z = frame.measurements[outcome - 1]
        return (math.log(pd) + kinematics.log_likelihood(track.state, z, model)
                - math.log(clutter.density(z)))
    if outcome == MISSED:
        return 0.0 if optimistic_miss else math.log1p(-pd)
    raise ValueError(f"no psi factor for outcome {outcome}")


@dataclass
class ColumnLegend:
    """Decodes matrix columns and carries what is needed to build children."""

    tracks: tuple[GaussianTrack, ...]
    n_meas: int
    exist_log: tuple[float, ...]
    optimistic_miss: bool
    # (row, j) -> Kalman posterior, filled while scoring detections
    updated: dict = field(default_factory=dict)

    @property
    def n_tracks(self) -> int:
        return len(self.tracks)

    def outcome(self, row: int, col: int) -> int:
        m, n = self.n_meas, self.n_tracks
        if col < m:
            return col + 1
        if col < m + n:
            if col - m != row:
                raise ValueError(f"missed column {col} is off-diagonal for row {row}")
            return MISSED
        if col - m - n != row:
            raise ValueError(f"death column {col} is off-diagonal for row {row}")
        return DIED

    def column(self, row: int, outcome: int) -> int:
        if outcome >= 1:
            return outcome - 1
        if outcome == MISSED:
            return self.n_meas + row
        return self.n_meas + self.n_tracks + row


def build_cost_matrix(tracks: Sequence[GaussianTrack], frame: MeasurementFrame,
                      clutter: ClutterModel, pd: float, ps: float, r_birth: float,
                      gate: float, optimistic_miss: bool,
                      model: NcvModel) -> tuple[CostMatrix, ColumnLegend]:
    """Negative-log likelihood-ratio matrix for predicted tracks.

    ``tracks`` are already predicted to the frame time. Existing tracks
    survive with ``ps``; birth candidates exist with ``r_birth``.
    """
    n, m = len(tracks), len(frame)
    inf = math.inf
    rows = []
    exist_log = []
    updated = {}
    miss_psi = 0.0 if optimistic_miss else math.log1p(-pd)
    log_pd = math.log(pd)
    for i, track in enumerate(tracks):
        p_e = r_birth if track.is_birth_candidate else ps
        log_pe = math.log(p_e)
        exist_log.append(log_pe)
        row = [inf] * (m + 2 * n)
        for j, z in enumerate(frame.measurements):
            if not kinematics.gate(track.state, z, gate):
                continue
            post, loglik = kinematics.update(track.state, z, model)
            updated[i, j + 1] = post
            row[j] = -(log_pe + log_pd + loglik - math.log(clutter.density(z)))
        row[m + i] = -(log_pe + miss_psi)
        row[m + n + i] = -math.log1p(-p_e)
        rows.append(row)
    costs = CostMatrix(rows, n_cols=m + 2 * n)
    legend = ColumnLegend(tuple(tracks), m, tuple(exist_log), optimistic_miss, updated)
    return costs, legend


def assignment_to_hypothesis(parent: Hypothesis, assignment: Assignment,
                             legend: ColumnLegend, frame: MeasurementFrame,
                             model: NcvModel, hypothesis_id: int = -1) -> Hypothesis:
    """Child hypothesis for one assignment of the parent's cost matrix."""
    associations = {}
    posterior = []
    missed_births = {}
    for row, col in enumerate(assignment.row_to_col):
        track = legend.tracks[row]
        outcome = legend.outcome(row, col)
        associations[track.label] = outcome
        if outcome >= 1:
            state = legend.updated.get((row, outcome))
            if state is None:
                state, _ = kinematics.update(track.state, frame.measurements[outcome - 1], model)
            posterior.append(GaussianTrack(track.label, state))
        elif outcome == MISSED:
            if track.is_birth_candidate:
                missed_births[track.label] = track.state
            else:
                posterior.append(track)
    opt = parent.log_weight - assignment.cost
    return Hypothesis(
        id=hypothesis_id, parent_id=parent.id, frame=frame.frame,
        associations=associations, posterior_tracks=tuple(posterior),
        log_weight=opt, optimistic_log_weight=opt, certificate=False,
        optimistic_miss=legend.optimistic_miss, missed_births=missed_births,
    )


def predicted_tracks(parent: Hypothesis, birth: GaussianTrack | None,
                     model: NcvModel) -> list[GaussianTrack]:
    """Parent's tracks predicted one frame, sorted by label, birth row last."""
    tracks = [GaussianTrack(t.label, kinematics.predict(t.state, model))
              for t in sorted(parent.posterior_tracks, key=lambda t: t.label)]
    if birth is not None:
        tracks.append(birth)
    return tracks
