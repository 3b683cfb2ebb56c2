"""Pure-Python rectangular assignment kernel (fallback for ``_lap_ext``).

Shortest augmenting path Hungarian method over an ``n x m`` matrix with
``n <= m`` and a mask of allowed entries. Costs are compared as pairs
``(cost, lex)`` where ``lex[i][j] = j * m**(n-1-i)``; minimising the pair
yields the minimum-cost assignment whose row->column vector is
lexicographically smallest. The secondary term is an exact integer, so
ties are broken exactly whenever the primary arithmetic is exact.
"""
from __future__ import annotations

import math

_INF = math.inf


def solve_lap(costs, allowed):
    """Solve one assignment problem.

    ``costs`` and ``allowed`` are 2-D numpy arrays of equal shape. Returns a
    list ``row_to_col`` or ``None`` when no complete assignment exists.
    """
    n, m = costs.shape
    if n == 0:
        return []
    if n > m:
        return None
    a = costs.tolist()
    ok = allowed.tolist()
    place = [m ** (n - 1 - i) for i in range(n)]

    # 1-based rows and columns, column 0 is the virtual source
    u = [0.0] * (n + 1)
    u2 = [0] * (n + 1)
    v = [0.0] * (m + 1)
    v2 = [0] * (m + 1)
    p = [0] * (m + 1)
    way = [0] * (m + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [_INF] * (m + 1)
        minv2 = [0] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = a[i0 - 1]
            row_ok = ok[i0 - 1]
            pl = place[i0 - 1]
            ui, ui2 = u[i0], u2[i0]
            delta, delta2, j1 = _INF, 0, -1
            for j in range(1, m + 1):
                if used[j]:
                    continue
                if row_ok[j - 1]:
                    cur = row[j - 1] - ui - v[j]
                    cur2 = (j - 1) * pl - ui2 - v2[j]
                    if cur < minv[j] or (cur == minv[j] and cur2 < minv2[j]):
                        minv[j] = cur
                        minv2[j] = cur2
                        way[j] = j0
                mj = minv[j]
                if mj < delta or (mj == delta and mj != _INF and minv2[j] < delta2):
                    delta, delta2, j1 = mj, minv2[j], j
            if delta == _INF:
                return None
            for j in range(m + 1):
                if used[j]:
                    u[p[j]] += delta
                    u2[p[j]] += delta2
                    v[j] -= delta
                    v2[j] -= delta2
                else:
                    minv[j] -= delta
                    minv2[j] -= delta2
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    row_to_col = [0] * n
    for j in range(1, m + 1):
        if p[j]:
            row_to_col[p[j] - 1] = j - 1
    return row_to_col
