"""Minimum-cost linear assignment on rectangular cost matrices.

Costs are nonnegative floats; entries set to ``INFEASIBLE`` (+inf) are
excluded from matching. The solver maximizes the number of feasible
matches, minimizes their total cost, and among equal-cost optima returns
the matching that is lexicographically smallest in (row, col) order, so
tracker output is reproducible across platforms.

The core is a shortest-augmenting-path solver (Jonker-Volgenant style,
O(n^3)); the lexicographic refinement re-solves reduced subproblems and is
intended for the modest matrix sizes of per-frame association.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

INFEASIBLE = float("inf")


@dataclass(frozen=True)
class Assignment:
    """A matching plus the rows and columns it leaves unmatched.

    Every row index appears exactly once across ``matches`` and
    ``unmatched_rows``, and likewise for columns.
    """

    matches: tuple[tuple[int, int], ...]
    unmatched_rows: tuple[int, ...]
    unmatched_cols: tuple[int, ...]


def _as_cost_matrix(costs) -> np.ndarray:
    c = np.asarray(costs, dtype=float)
    if c.ndim != 2:
        raise ValueError(f"cost matrix must be 2-D, got shape {c.shape}")
    if np.isnan(c).any():
        raise ValueError("cost matrix must not contain NaN")
    if np.isneginf(c).any():
        raise ValueError("cost matrix must not contain -inf")
    finite = np.isfinite(c)
    if c.size and (c[finite] < 0).any():
        raise ValueError("finite costs must be nonnegative")
    return c


def _shortest_augmenting_path(cost: np.ndarray) -> np.ndarray:
    """Assign all rows of a dense all-finite nr x nc matrix, nr <= nc.

    Returns col4row, the column matched to each row.
    """
    nr, nc = cost.shape
    u = np.zeros(nr)
    v = np.zeros(nc)
    col4row = np.full(nr, -1, dtype=np.intp)
    row4col = np.full(nc, -1, dtype=np.intp)

    for cur_row in range(nr):
        shortest = np.full(nc, np.inf)
        pred = np.full(nc, cur_row, dtype=np.intp)
        done = np.zeros(nc, dtype=bool)
        scanned_rows = []
        min_val = 0.0
        i = cur_row
        sink = -1
        while sink < 0:
            scanned_rows.append(i)
            reduced = min_val + cost[i] - u[i] - v
            improves = ~done & (reduced < shortest)
            shortest[improves] = reduced[improves]
            pred[improves] = i
            candidates = np.where(done, np.inf, shortest)
            j = int(np.argmin(candidates))
            min_val = float(candidates[j])
            if not np.isfinite(min_val):
                raise RuntimeError("augmenting path search stalled on finite input")
            done[j] = True
            if row4col[j] < 0:
                sink = j
            else:
                i = int(row4col[j])
        u[cur_row] += min_val
        for r in scanned_rows:
            if r != cur_row:
                u[r] += min_val - shortest[col4row[r]]
        v[done] += shortest[done] - min_val
        j = sink
        while True:
            i = int(pred[j])
            row4col[j] = i
            col4row[i], j = j, col4row[i]
            if i == cur_row:
                break
    return col4row


def _sentinel_for(costs: np.ndarray, feasible: np.ndarray) -> float:
    top = float(costs[feasible].max()) if feasible.any() else 0.0
    # One sentinel must outweigh any achievable feasible total, so the
    # solver always prefers more feasible matches over cheaper ones.
    return (abs(top) + 1.0) * (min(costs.shape) + 1) + 1e5


def _solve_complete(costs: np.ndarray, feasible: np.ndarray) -> list[tuple[int, int]]:
    sentinel = _sentinel_for(costs, feasible)
    filled = np.where(feasible, costs, sentinel)
    if filled.shape[0] <= filled.shape[1]:
        col4row = _shortest_augmenting_path(filled)
        return [(r, int(c)) for r, c in enumerate(col4row)]
    row4col = _shortest_augmenting_path(filled.T)
    return [(int(r), c) for c, r in enumerate(row4col)]


def _optimal_value(costs: np.ndarray) -> tuple[int, float]:
    """(max feasible cardinality, min total cost at that cardinality)."""
    nr, nc = costs.shape
    if nr == 0 or nc == 0:
        return 0, 0.0
    feasible = np.isfinite(costs)
    if not feasible.any():
        return 0, 0.0
    count = 0
    total = 0.0
    for r, c in _solve_complete(costs, feasible):
        if feasible[r, c]:
            count += 1
            total += costs[r, c]
    return count, total


def _tol(reference: float) -> float:
    return 1e-9 + 1e-12 * abs(reference)


def solve(costs) -> Assignment:
    """Optimal assignment over the feasible entries of ``costs``.

    Rows or columns whose entries are all infeasible come back unmatched;
    ties are broken toward the lexicographically smallest match list.
    """
    c = _as_cost_matrix(costs)
    nr, nc = c.shape
    target_count, target_total = _optimal_value(c)

    matches: list[tuple[int, int]] = []
    cols_free = list(range(nc))
    fixed_total = 0.0
    for r in range(nr):
        if len(matches) == target_count:
            break
        rows_rest = list(range(r + 1, nr))
        chosen = -1
        for cand in cols_free:
            if not np.isfinite(c[r, cand]):
                continue
            rest_cols = [x for x in cols_free if x != cand]
            sub_count, sub_total = _optimal_value(c[np.ix_(rows_rest, rest_cols)])
            if len(matches) + 1 + sub_count != target_count:
                continue
            if abs(fixed_total + c[r, cand] + sub_total - target_total) <= _tol(
                target_total
            ):
                chosen = cand
                break
        if chosen >= 0:
            matches.append((r, chosen))
            fixed_total += c[r, chosen]
            cols_free.remove(chosen)

    matched_rows = {r for r, _ in matches}
    matched_cols = {col for _, col in matches}
    return Assignment(
        matches=tuple(matches),
        unmatched_rows=tuple(r for r in range(nr) if r not in matched_rows),
        unmatched_cols=tuple(col for col in range(nc) if col not in matched_cols),
    )


def min_cost_matching(costs, max_cost: float) -> Assignment:
    """Assignment where any pairing costing more than ``max_cost`` is
    dissolved into an unmatched row and an unmatched column."""
    if not np.isfinite(max_cost):
        raise ValueError(f"max_cost must be finite, got {max_cost}")
    c = _as_cost_matrix(costs).copy()
    c[c > max_cost] = INFEASIBLE
    return solve(c)
