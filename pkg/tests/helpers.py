"""Random instance generators shared by the test modules."""
from __future__ import annotations

import numpy as np

from pvtrack.assignment import FORBIDDEN, CostMatrix
from pvtrack.dependent import Collision, Independence, Occlusion
from pvtrack.hypothesis import (ClutterModel, GaussianTrack, Hypothesis, Label,
                                MeasurementFrame, build_cost_matrix, predicted_tracks)
from pvtrack.kinematics import GaussianState, NcvModel

STRUCTURES = {
    "independence": Independence(),
    "collision": Collision(),
    "occlusion": Occlusion(sensor_pos=-100.0),
}

PD = 0.99
MODEL = NcvModel(q=1.0, dt=1.0, meas_sigma=1.0)
CLUTTER = ClutterModel(5e-3, -50.0, 150.0)


def random_cost_matrix(rng, max_rows=5, max_cols=8, p_forbidden=0.15, integer=None):
    """Random matrix with every row keeping at least one allowed entry."""
    while True:
        n = int(rng.integers(0, max_rows + 1))
        m = int(rng.integers(max(n, 1), max_cols + 1))
        if integer is None:
            integer = bool(rng.integers(2))
        values = (rng.integers(0, 6, (n, m)).astype(float) if integer
                  else rng.normal(0.0, 3.0, (n, m)))
        ok = rng.random((n, m)) >= p_forbidden
        if n == 0 or ok.any(axis=1).all():
            return CostMatrix(np.where(ok, values, FORBIDDEN), n_cols=m)


def random_parent(rng, max_tracks=3, frame=5, log_weight=None) -> Hypothesis:
    n = int(rng.integers(0, max_tracks + 1))
    tracks = []
    for i in range(n):
        state = GaussianState(float(rng.uniform(-8, 8)), float(rng.normal(0, 1)),
                              float(rng.uniform(0.5, 6)), 0.0, float(rng.uniform(0.2, 2)))
        tracks.append(GaussianTrack(Label(int(rng.integers(0, frame)), i), state))
    lw = float(rng.uniform(-3, 0)) if log_weight is None else log_weight
    return Hypothesis(id=int(rng.integers(1, 1000)), parent_id=0, frame=frame - 1,
                      associations={t.label: 1 for t in tracks},
                      posterior_tracks=tuple(tracks), log_weight=lw,
                      optimistic_log_weight=lw, certificate=True)


def random_instance(rng, structure, max_tracks=3, max_meas=4, gate=20.0):
    """Parent, predicted tracks (<= max_tracks + birth row) and a frame."""
    parent = random_parent(rng, max_tracks)
    m = int(rng.integers(0, max_meas + 1))
    frame = MeasurementFrame(parent.frame + 1, tuple(rng.uniform(-10, 10, m).tolist()))
    birth = GaussianTrack(Label(frame.frame, 0), GaussianState(0.0, 0.0, 100.0, 0.0, 25.0), True)
    tracks = predicted_tracks(parent, birth, MODEL)
    costs, legend = build_cost_matrix(tracks, frame, CLUTTER, PD, 0.999, 0.5, gate,
                                      structure.optimistic_miss, MODEL)
    return parent, costs, legend, frame
