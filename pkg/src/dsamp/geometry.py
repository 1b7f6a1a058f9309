"""Integer point geometry helpers.

Distances are Euclidean center-to-center; comparisons run on squared
values so legality checks stay exact on integer-nanometer coordinates.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence

# (id, x, y)
IdPoint = tuple[int, int, int]


def dist_sq(ax: int, ay: int, bx: int, by: int) -> int:
    dx = ax - bx
    dy = ay - by
    return dx * dx + dy * dy


def close_pairs(points: Sequence[IdPoint], limit: int) -> Iterator[tuple[int, int, int]]:
    """Yield (id_a, id_b, dist_sq) for every pair strictly closer than limit.

    Uses a uniform grid with cell size = limit, so only each cell plus four
    forward neighbor cells need scanning. Emission order is deterministic
    for a fixed input order; ids within a pair satisfy id_a < id_b.
    """
    if limit <= 0 or len(points) < 2:
        return
    limit_sq = limit * limit
    cells: dict[tuple[int, int], list[IdPoint]] = {}
    for p in points:
        cells.setdefault((p[1] // limit, p[2] // limit), []).append(p)
    # forward half-neighborhood: each cell pair is visited exactly once
    steps = ((1, 0), (0, 1), (1, 1), (1, -1))
    for (cx, cy), bucket in cells.items():
        for i, (ia, xa, ya) in enumerate(bucket):
            for ib, xb, yb in bucket[i + 1:]:
                d2 = dist_sq(xa, ya, xb, yb)
                if d2 < limit_sq:
                    yield (ia, ib, d2) if ia < ib else (ib, ia, d2)
        for dx, dy in steps:
            other = cells.get((cx + dx, cy + dy))
            if not other:
                continue
            for ia, xa, ya in bucket:
                for ib, xb, yb in other:
                    d2 = dist_sq(xa, ya, xb, yb)
                    if d2 < limit_sq:
                        yield (ia, ib, d2) if ia < ib else (ib, ia, d2)
