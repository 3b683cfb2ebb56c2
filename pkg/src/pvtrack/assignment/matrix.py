from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Marker for an entry that may not be selected. Inputs may use it directly;
#: the matrix keeps a separate ``allowed`` mask and the solvers only ever
#: consult the mask, never the stored value.
FORBIDDEN = math.inf


class InfeasibleAssignmentError(ValueError):
    """No assignment selects exactly one allowed entry per row."""


class CostMatrix:
    """Immutable ``rows x cols`` cost matrix with forbidden entries.

    Parameters
    ----------
    entries : array_like
        Finite costs; ``FORBIDDEN`` (``+inf``) marks forbidden entries
        unless ``allowed`` is given explicitly.
    allowed : array_like of bool, optional
        Mask of selectable entries.
    n_cols : int, optional
        Column count for a 0-row matrix.
    """

    __slots__ = ("costs", "allowed")

    def __init__(self, entries, allowed=None, n_cols=None):
        costs = np.array(entries, dtype=float)
        if costs.size == 0 and costs.ndim != 2:
            costs = costs.reshape(0, n_cols or 0)
        if costs.ndim != 2:
            raise ValueError("cost matrix must be 2-D")
        if np.isnan(costs).any():
            raise ValueError("cost matrix contains NaN")
        if allowed is None:
            mask = np.isfinite(costs)
        else:
            mask = np.array(allowed, dtype=bool).reshape(costs.shape)
            if not np.isfinite(costs[mask]).all():
                raise ValueError("allowed entries must be finite")
        if costs.shape[0] and not mask.any(axis=1).all():
            bad = int(np.flatnonzero(~mask.any(axis=1))[0])
            raise ValueError(f"row {bad} has no allowed entry")
        costs = np.where(mask, costs, FORBIDDEN)
        costs.setflags(write=False)
        mask.setflags(write=False)
        self.costs = costs
        self.allowed = mask

    @property
    def shape(self) -> tuple[int, int]:
        return self.costs.shape

    def is_forbidden(self, row: int, col: int) -> bool:
        return not self.allowed[row, col]

    def is_valid(self, row_to_col) -> bool:
        n, m = self.shape
        return (len(row_to_col) == n
                and len(set(row_to_col)) == n
                and all(0 <= c < m and self.allowed[r, c]
                        for r, c in enumerate(row_to_col)))

    def cost_of(self, row_to_col) -> float:
        # fsum is exactly rounded, so the total does not depend on row order
        return math.fsum(self.costs[r, c] for r, c in enumerate(row_to_col))

    def __repr__(self):
        return f"CostMatrix(shape={self.shape})"


@dataclass(frozen=True)
class Assignment:
    row_to_col: tuple[int, ...]
    cost: float
