"""Lazy k-best assignment enumeration (Murty partitioning)."""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernel
from .matrix import Assignment, CostMatrix, InfeasibleAssignmentError


class IteratorExhaustedError(LookupError):
    """``get_next`` was called on an iterator with nothing left."""


@dataclass(frozen=True)
class _Subproblem:
    # rows 0..len(fixed)-1 are pinned to these columns
    fixed: tuple[int, ...]
    # forbidden (row, col) pairs, all with row >= len(fixed)
    excluded: frozenset


def _solve_restricted(costs: CostMatrix, sub: _Subproblem):
    n, m = costs.shape
    t = len(sub.fixed)
    taken = set(sub.fixed)
    cols = [c for c in range(m) if c not in taken]
    if n - t > len(cols):
        return None
    if t == n:
        return sub.fixed
    col_pos = {c: k for k, c in enumerate(cols)}
    sub_costs = costs.costs[t:, cols]
    sub_allowed = costs.allowed[t:, cols]
    if sub.excluded:
        sub_allowed = sub_allowed.copy()
        for r, c in sub.excluded:
            k = col_pos.get(c)
            if k is not None:
                sub_allowed[r - t, k] = False
    reduced = kernel.solve_lap(np.ascontiguousarray(sub_costs),
                               np.ascontiguousarray(sub_allowed))
    if reduced is None:
        return None
    return sub.fixed + tuple(cols[k] for k in reduced)


def solve_optimal(costs: CostMatrix) -> Assignment:
    """Minimum-cost assignment, ties broken by smallest row->column vector."""
    row_to_col = _solve_restricted(costs, _Subproblem((), frozenset()))
    if row_to_col is None:
        raise InfeasibleAssignmentError("no assignment covers every row")
    return Assignment(tuple(row_to_col), costs.cost_of(row_to_col))


class RankedAssignmentIterator:
    """Every valid assignment of ``costs`` in (cost, row->column) order.

    Each emission partitions the remaining solution space of its
    subproblem into at most ``n`` children, which are solved immediately so
    the next cost is always known (``peek_cost``) without consuming it.
    """

    def __init__(self, costs: CostMatrix):
        self.costs = costs
        self.emitted = 0
        self.solves = 0
        self._heap: list = []
        self._tiebreak = itertools.count()
        self._push(_Subproblem((), frozenset()))

    def _push(self, sub: _Subproblem) -> None:
        self.solves += 1
        row_to_col = _solve_restricted(self.costs, sub)
        if row_to_col is None:
            return
        cost = self.costs.cost_of(row_to_col)
        heapq.heappush(self._heap, (cost, row_to_col, next(self._tiebreak), sub))

    def has_next(self) -> bool:
        return bool(self._heap)

    def peek_cost(self) -> float:
        """Cost of the next assignment, ``inf`` once exhausted."""
        return self._heap[0][0] if self._heap else math.inf

    def get_next(self) -> Assignment:
        if not self._heap:
            raise IteratorExhaustedError("ranked assignment iterator exhausted")
        cost, row_to_col, _, sub = heapq.heappop(self._heap)
        n = len(row_to_col)
        for t in range(len(sub.fixed), n):
            excluded = frozenset(e for e in sub.excluded if e[0] >= t)
            self._push(_Subproblem(row_to_col[:t], excluded | {(t, row_to_col[t])}))
        self.emitted += 1
        return Assignment(row_to_col, cost)

    def __iter__(self):
        return self

    def __next__(self) -> Assignment:
        if not self._heap:
            raise StopIteration
        return self.get_next()


def ranked_iter(costs: CostMatrix) -> RankedAssignmentIterator:
    return RankedAssignmentIterator(costs)
