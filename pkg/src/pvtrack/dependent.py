"""Dependence-aware correction factors applied to proposed hypotheses.

Each structure returns, per track, a factor in [0, 1] that multiplies the
independence-form association likelihood. Because no factor exceeds one,
a hypothesis can only lose weight when it is verified.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .hypothesis import MISSED, Hypothesis, Label

IMPOSSIBLE = -math.inf


class StructureConfigError(ValueError):
    """A child was scored with the wrong missed-detection convention."""


@dataclass(frozen=True)
class Independence:
    name = "independence"
    optimistic_miss = False


@dataclass(frozen=True)
class Collision:
    name = "collision"
    optimistic_miss = False


@dataclass(frozen=True)
class Occlusion:
    """Occlusion by other tracks on the line of sight from a sensor.

    ``shadow_halfwidth`` is kept for 2-D geometry and unused on a line.
    """

    sensor_pos: float = -100.0
    shadow_halfwidth: float = 1.0
    name = "occlusion"
    optimistic_miss = True

    def __post_init__(self):
        if not self.shadow_halfwidth > 0:
            raise ValueError("shadow_halfwidth must be positive")


DependentStructure = Independence | Collision | Occlusion


def structure_from_name(name: str, **params) -> DependentStructure:
    try:
        cls = {"independence": Independence, "collision": Collision,
               "occlusion": Occlusion}[name]
    except KeyError:
        raise ValueError(f"unknown dependence structure {name!r}") from None
    return cls(**params)


@dataclass(frozen=True)
class VerificationResult:
    log_lambda_product: float
    certificate: bool
    per_label_lambda: dict[Label, float] = field(default_factory=dict)

    @property
    def impossible(self) -> bool:
        return self.log_lambda_product == IMPOSSIBLE


def orders_conflict(before: dict, after: dict) -> list[tuple]:
    """Label pairs present in both maps whose strict position order flips.

    Pairs tied in either map are treated as keeping their order.
    """
    common = sorted(set(before) & set(after))
    flips = []
    for a_idx, a in enumerate(common):
        for b in common[a_idx + 1:]:
            d_before = before[a] - before[b]
            d_after = after[a] - after[b]
            if d_before * d_after < 0.0:
                flips.append((a, b))
    return flips


def collide(parent: Hypothesis, child: Hypothesis) -> bool:
    """True iff some persistent pair of tracks swapped order on the line.

    Deaths and births never collide: only labels in both hypotheses count.
    """
    if child.parent_id != parent.id:
        raise ValueError("child does not descend from parent")
    return bool(orders_conflict(parent.positions(), child.positions()))


def _blocked(target: float, others, sensor_pos: float) -> bool:
    side = target - sensor_pos
    for pos in others:
        d = pos - sensor_pos
        if d * side > 0.0 and abs(d) < abs(side):
            return True
    return False


def occluded(hypothesis: Hypothesis, label: Label, sensor_pos: float,
             shadow_halfwidth: float) -> bool:
    """True iff another track sits strictly between the sensor and ``label``."""
    positions = hypothesis.positions()
    if label in positions:
        target = positions.pop(label)
    elif label in hypothesis.missed_births:
        target = hypothesis.missed_births[label].pos
    else:
        raise KeyError(f"label {label} not present in hypothesis {hypothesis.id}")
    return _blocked(target, positions.values(), sensor_pos)


def verify(structure: DependentStructure, parent: Hypothesis, child: Hypothesis,
           pd: float) -> VerificationResult:
    """Evaluate the correction factors of ``child`` under ``structure``."""
    if child.optimistic_miss != structure.optimistic_miss:
        raise StructureConfigError(
            f"{structure.name} needs children scored with optimistic_miss="
            f"{structure.optimistic_miss}")
    if isinstance(structure, Independence):
        return VerificationResult(0.0, True)
    if isinstance(structure, Collision):
        if collide(parent, child):
            return VerificationResult(IMPOSSIBLE, False,
                                      {lab: 0.0 for lab in child.associations})
        return VerificationResult(0.0, True)

    lam = {}
    log_total = 0.0
    for label, outcome in child.associations.items():
        if outcome == MISSED and not occluded(child, label, structure.sensor_pos,
                                              structure.shadow_halfwidth):
            lam[label] = 1.0 - pd
            log_total += math.log1p(-pd)
    return VerificationResult(log_total, not lam, lam)
