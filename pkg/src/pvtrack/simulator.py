"""One-lane, two-target scenario with a noisy position sensor and clutter."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hypothesis import ClutterModel, MeasurementFrame


@dataclass(frozen=True)
class TargetPath:
    target_id: int
    appear_frame: int
    # positions[k] is the position at frame appear_frame + k
    positions: tuple[float, ...]

    @property
    def disappear_frame(self) -> int:
        return self.appear_frame + len(self.positions)

    def position(self, frame: int) -> float | None:
        k = frame - self.appear_frame
        if 0 <= k < len(self.positions):
            return self.positions[k]
        return None


@dataclass(frozen=True)
class Scenario:
    duration: int
    dt: float
    targets: tuple[TargetPath, ...]
    pd_true: float = 0.99
    meas_sigma_true: float = 1.0
    clutter_true: ClutterModel = field(default_factory=ClutterModel)
    seed: int = 0

    def truth(self, frame: int) -> dict[int, float]:
        out = {}
        for t in self.targets:
            pos = t.position(frame)
            if pos is not None:
                out[t.target_id] = pos
        return out

    def order_preserved(self) -> bool:
        """No two simultaneously present targets ever swap order."""
        previous = {}
        for k in range(self.duration):
            current = self.truth(k)
            common = sorted(set(previous) & set(current))
            for i, a in enumerate(common):
                for b in common[i + 1:]:
                    if (previous[a] - previous[b]) * (current[a] - current[b]) < 0:
                        return False
            previous = current
        return True


def default_paths(duration: int = 60, dt: float = 1.0,
                  follower_appears: int = 4, gap: float = 1.5) -> tuple[TargetPath, ...]:
    """Leader from 5 m at 1-2 m/s; follower from 0 m closing to ``gap`` then holding.

    The follower enters a few frames after the leader so that the two
    tracks are born in a fixed order.
    """
    times = np.arange(duration) * dt
    speed = 1.5 + 0.5 * np.sin(2.0 * math.pi * times / 40.0)
    leader = 5.0 + np.concatenate(([0.0], np.cumsum(speed[:-1] * dt)))
    start_gap = leader[follower_appears]
    close_frames = 20
    follower = []
    for k in range(follower_appears, duration):
        s = min((k - follower_appears) / close_frames, 1.0)
        # smooth closing, so the follower always moves forward
        g = gap + (start_gap - gap) * 0.5 * (1.0 + math.cos(math.pi * s))
        follower.append(leader[k] - g)
    return (
        TargetPath(1, 0, tuple(float(x) for x in leader)),
        TargetPath(2, follower_appears, tuple(follower)),
    )


def default_scenario(seed: int = 0, duration: int = 60) -> Scenario:
    return Scenario(duration=duration, dt=1.0, targets=default_paths(duration),
                    pd_true=0.99, meas_sigma_true=1.0,
                    clutter_true=ClutterModel(5e-3, -50.0, 150.0), seed=seed)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def generate_frame(scenario: Scenario, frame_index: int,
                   rng: np.random.Generator) -> MeasurementFrame:
    """Detections of present targets plus uniform clutter, in random order."""
    if not 0 <= frame_index < scenario.duration:
        raise ValueError(f"frame {frame_index} outside scenario duration")
    values = []
    origins = []
    for target_id, pos in sorted(scenario.truth(frame_index).items()):
        if rng.random() < scenario.pd_true:
            values.append(pos + scenario.meas_sigma_true * rng.standard_normal())
            origins.append(target_id)
    clutter = scenario.clutter_true
    n_clutter = rng.poisson(clutter.expected_count)
    values.extend(rng.uniform(clutter.low, clutter.high, n_clutter).tolist())
    origins.extend([None] * n_clutter)
    order = rng.permutation(len(values))
    return MeasurementFrame(frame_index, tuple(float(values[i]) for i in order),
                            tuple(origins[i] for i in order))


def simulate(scenario: Scenario, rng: np.random.Generator | None = None) -> list[MeasurementFrame]:
    rng = make_rng(scenario.seed) if rng is None else rng
    return [generate_frame(scenario, k, rng) for k in range(scenario.duration)]


def load_paths(path: str | Path) -> tuple[TargetPath, ...]:
    """Read target paths from CSV with columns ``target,frame,position``.

    Each target's frames must be contiguous.
    """
    rows: dict[int, list[tuple[int, float]]] = {}
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.setdefault(int(rec["target"]), []).append(
                (int(rec["frame"]), float(rec["position"])))
    paths = []
    for target_id, pts in sorted(rows.items()):
        pts.sort()
        frames = [f for f, _ in pts]
        if frames != list(range(frames[0], frames[0] + len(frames))):
            raise ValueError(f"target {target_id} has non-contiguous frames")
        paths.append(TargetPath(target_id, frames[0], tuple(p for _, p in pts)))
    return tuple(paths)
