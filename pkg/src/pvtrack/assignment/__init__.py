"""Optimal and ranked assignment over rectangular matrices with forbidden entries."""
from .kernel import available_backends, set_backend
from .matrix import FORBIDDEN, Assignment, CostMatrix, InfeasibleAssignmentError
from .murty import (IteratorExhaustedError, RankedAssignmentIterator,
                    ranked_iter, solve_optimal)


def has_next(it: RankedAssignmentIterator) -> bool:
    return it.has_next()


def get_next(it: RankedAssignmentIterator) -> Assignment:
    return it.get_next()


def brute_force_assignments(costs: CostMatrix) -> list[Assignment]:
    """All valid assignments sorted by (cost, row->column), by enumeration."""
    from itertools import permutations

    n, m = costs.shape
    out = [Assignment(p, costs.cost_of(p)) for p in permutations(range(m), n)
           if all(costs.allowed[r, c] for r, c in enumerate(p))]
    out.sort(key=lambda a: (a.cost, a.row_to_col))
    return out


__all__ = [
    "FORBIDDEN", "Assignment", "CostMatrix", "InfeasibleAssignmentError",
    "IteratorExhaustedError", "RankedAssignmentIterator", "available_backends",
    "brute_force_assignments", "get_next", "has_next", "ranked_iter",
    "set_backend", "solve_optimal",
]
