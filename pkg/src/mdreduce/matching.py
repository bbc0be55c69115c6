"""Exact maximum-weight bipartite matching.

The Hungarian method with potentials, run on the zero-padded square matrix
of negated weights.  Only additions and comparisons are performed, so the
result is exact for ``int`` and ``Fraction`` weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InvalidMatching



@dataclass(frozen=True)
class BipartiteWeights:
    """Rectangular grid of non-negative weights, ``weight[r][c]``."""

    weight: tuple[tuple, ...]

    def __init__(self, weight: Sequence[Sequence]):
        rows = tuple(tuple(r) for r in weight)
        if rows:
            width = len(rows[0])
            for r in rows:
                if len(r) != width:
                    raise ValueError("weight grid is not rectangular")
                for x in r:
                    if x < 0:
                        raise ValueError(f"negative weight {x}")
        object.__setattr__(self, "weight", rows)

    @property
    def rows(self) -> int:
        return len(self.weight)

    @property
    def cols(self) -> int:
        return len(self.weight[0]) if self.weight else 0


def _as_weights(w) -> BipartiteWeights:
    return w if isinstance(w, BipartiteWeights) else BipartiteWeights(w)


def _hungarian_min(cost: list[list], n: int) -> list[int]:
    # square n x n min-cost assignment; returns col assigned to each row
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [math.inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = math.inf
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    assign = [0] * n
    for j in range(1, n + 1):
        if p[j]:
            assign[p[j] - 1] = j - 1
    return assign


def matching_weight(W, pairs) -> "int | Fraction":
    W = _as_weights(W)
    return sum((W.weight[r][c] for r, c in pairs), 0)


def max_weight_matching(W) -> tuple[tuple[tuple[int, int], ...], "int | Fraction"]:
    """Maximum-weight (not necessarily perfect) matching of ``W``.

    Returns ``(pairs, total)`` where ``pairs`` is a sorted tuple of
    ``(row, col)``; pairs of weight zero are dropped.
    """
    W = _as_weights(W)
    nr, nc = W.rows, W.cols
    if nr == 0 or nc == 0:
        return (), 0
    n = max(nr, nc)
    cost = [[-W.weight[r][c] if r < nr and c < nc else 0 for c in range(n)] for r in range(n)]
    assign = _hungarian_min(cost, n)
    pairs = tuple(
        (r, c) for r, c in enumerate(assign) if r < nr and c < nc and W.weight[r][c] != 0
    )
    return pairs, matching_weight(W, pairs)


def validate_matching(W, pairs) -> None:
    W = _as_weights(W)
    seen_r, seen_c = set(), set()
    for r, c in pairs:
        if not (0 <= r < W.rows and 0 <= c < W.cols):
            raise InvalidMatching(f"pair {(r, c)} outside {W.rows}x{W.cols} grid")
        if r in seen_r or c in seen_c:
            raise InvalidMatching(f"pair {(r, c)} reuses a row or column")
        seen_r.add(r)
        seen_c.add(c)


def attains_max(W, pairs) -> bool:
    """True iff ``pairs`` is a valid matching whose weight equals the maximum."""
    W = _as_weights(W)
    validate_matching(W, pairs)
    return matching_weight(W, pairs) == max_weight_matching(W)[1]
