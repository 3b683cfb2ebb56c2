"""Ranking children by true weight from an optimistic ranked proposal stream.

Proposals arrive in non-increasing optimistic weight. Verification can
only lower a weight, so the best pending child is final as soon as the
next proposal's optimistic weight cannot beat it. A child whose true and
optimistic weights agree settles every pending entry at or above it.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace

from .assignment import CostMatrix, brute_force_assignments, ranked_iter
from .dependent import DependentStructure, verify
from .hypothesis import (ColumnLegend, Hypothesis, MeasurementFrame,
                         assignment_to_hypothesis)
from .kinematics import NcvModel

DEFAULT_CAP_FACTOR = 50


class MonotonicityError(AssertionError):
    """A verified weight exceeded its optimistic weight."""


class ChildStream:
    """Verified children of one parent, best true weight first, on demand.

    ``pop()`` returns ``(child, certified)``; ``certified`` is False only
    when the proposal cap forced an early answer.
    """

    def __init__(self, parent: Hypothesis, costs: CostMatrix, legend: ColumnLegend,
                 structure: DependentStructure, frame: MeasurementFrame,
                 model: NcvModel, pd: float, proposal_cap: int | None = None):
        self.parent = parent
        self.legend = legend
        self.structure = structure
        self.frame = frame
        self.model = model
        self.pd = pd
        self.proposal_cap = math.inf if proposal_cap is None else proposal_cap
        self.iterator = ranked_iter(costs)
        self.proposals = 0
        self.popped = 0
        self.impossible = 0
        self.demoted = 0
        self.certificates = 0
        self.capped = False
        self.last_reason = None
        self._pending: list = []
        self._pending_certificates = 0

    def _propose(self) -> None:
        assignment = self.iterator.get_next()
        seq = self.proposals
        self.proposals += 1
        child = assignment_to_hypothesis(self.parent, assignment, self.legend,
                                         self.frame, self.model)
        result = verify(self.structure, self.parent, child, self.pd)
        for lam in result.per_label_lambda.values():
            if not 0.0 <= lam <= 1.0:
                raise MonotonicityError(f"lambda {lam} outside [0, 1]")
        if result.impossible:
            self.impossible += 1
            return
        true = child.optimistic_log_weight + result.log_lambda_product
        if true > child.optimistic_log_weight + 1e-12:
            raise MonotonicityError("verified weight above optimistic weight")
        if result.certificate:
            self.certificates += 1
            self._pending_certificates += 1
        elif true < child.optimistic_log_weight:
            self.demoted += 1
        child = replace(child, log_weight=true, certificate=result.certificate)
        heapq.heappush(self._pending, (-true, seq, child))

    def _head_reason(self) -> str | None:
        if not self._pending:
            return None
        if not self.iterator.has_next():
            return "exhausted"
        if self._pending_certificates:
            return "certificate"
        next_optimistic = self.parent.log_weight - self.iterator.peek_cost()
        if next_optimistic <= -self._pending[0][0]:
            return "bound"
        return None

    def _take(self, reason: str):
        _, _, child = heapq.heappop(self._pending)
        if child.certificate:
            self._pending_certificates -= 1
        self.popped += 1
        self.last_reason = reason
        return child

    def pop(self):
        """Next child in true-weight order, or ``None`` when there is none."""
        while True:
            reason = self._head_reason()
            if reason is not None:
                return self._take(reason), True
            if not self.iterator.has_next():
                return None
            if self.proposals >= self.proposal_cap:
                self.capped = True
                if self._pending:
                    return self._take("cap"), False
                return None
            self._propose()

    def drain(self) -> None:
        """Consume every remaining proposal."""
        while self.iterator.has_next():
            self._propose()


@dataclass
class VerifiedRanking:
    result: list[tuple[Hypothesis, float]]
    verified_prefix_len: int
    proposals_consumed: int
    exhausted: bool
    stop_reason: str | None = None
    stats: dict = field(default_factory=dict)


def rank_children(parent: Hypothesis, costs: CostMatrix, legend: ColumnLegend,
                  structure: DependentStructure, k: int, frame: MeasurementFrame,
                  model: NcvModel, pd: float, proposal_cap: int | None = None,
                  exhaustive: bool = False) -> VerifiedRanking:
    """Top ``k`` children of ``parent`` by verified weight.

    With ``exhaustive=True`` every proposal is consumed before ranking,
    which is the reference answer the early-stopping path must reproduce.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if proposal_cap is None:
        proposal_cap = DEFAULT_CAP_FACTOR * k
    if proposal_cap < k:
        raise ValueError("proposal_cap must be >= k")
    stream = ChildStream(parent, costs, legend, structure, frame, model, pd,
                         None if exhaustive else proposal_cap)
    if exhaustive:
        stream.drain()
    result = []
    certified = 0
    while len(result) < k:
        item = stream.pop()
        if item is None:
            break
        child, ok = item
        result.append((child, child.log_weight))
        # the verified prefix ends at the first capped answer
        if ok and certified == len(result) - 1:
            certified += 1
    return VerifiedRanking(
        result=result,
        verified_prefix_len=certified,
        proposals_consumed=stream.proposals,
        exhausted=not stream.iterator.has_next(),
        stop_reason=stream.last_reason,
        stats={"impossible": stream.impossible, "demoted": stream.demoted,
               "certificates": stream.certificates, "capped": stream.capped},
    )


def brute_force_children(parent: Hypothesis, costs: CostMatrix, legend: ColumnLegend,
                         structure: DependentStructure, frame: MeasurementFrame,
                         model: NcvModel, pd: float) -> list[tuple[Hypothesis, float]]:
    """Every possible child with its verified weight, best first.

    Enumerates assignments by permutation, so keep instances tiny.
    """
    scored = []
    for assignment in brute_force_assignments(costs):
        child = assignment_to_hypothesis(parent, assignment, legend, frame, model)
        result = verify(structure, parent, child, pd)
        if result.impossible:
            continue
        true = child.optimistic_log_weight + result.log_lambda_product
        scored.append((replace(child, log_weight=true, certificate=result.certificate), true))
    scored.sort(key=lambda item: -item[1])
    return scored
