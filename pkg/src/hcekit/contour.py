"""Iso-contour extraction on regular grids (marching squares).

Coordinates are in grid index units: x runs along columns, y along rows, so
the caller maps them onto data axes. Corners are classified as above a level
by strict comparison; crossings are placed by linear interpolation along cell
edges, and the ambiguous saddle cases are resolved by the sign of the cell
average. A constant field therefore yields no contour at any level, including
the constant itself.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .model import HceError

# Segment table indexed by the 4-bit corner mask (bottom-left, bottom-right,
# top-right, top-left); saddles (5, 10) are handled separately.
_SEGMENTS: dict[int, tuple[tuple[str, str], ...]] = {
    0: (),
    1: (("left", "bottom"),),
    2: (("bottom", "right"),),
    3: (("left", "right"),),
    4: (("right", "top"),),
    6: (("bottom", "top"),),
    7: (("left", "top"),),
    8: (("top", "left"),),
    9: (("bottom", "top"),),
    11: (("top", "right"),),
    12: (("left", "right"),),
    13: (("bottom", "right"),),
    14: (("left", "bottom"),),
    15: (),
}

_SADDLE = {
    # mask -> (segments when the cell average is above, when below)
    5: ((("bottom", "right"), ("top", "left")),
        (("left", "bottom"), ("right", "top"))),
    10: ((("left", "bottom"), ("right", "top")),
         (("bottom", "right"), ("top", "left"))),
}

EdgeKey = tuple[str, int, int]


def _edge_point(
    edge: str, i: int, j: int, level: float, a: float, b: float, c: float, d: float
) -> tuple[EdgeKey, tuple[float, float]]:
    """Crossing key and interpolated point for one cell edge. Corners:
    a = (j, i), b = (j+1, i), c = (j+1, i+1), d = (j, i+1)."""
    if edge == "bottom":
        t = (level - a) / (b - a)
        return ("h", i, j), (j + t, float(i))
    if edge == "top":
        t = (level - d) / (c - d)
        return ("h", i + 1, j), (j + t, float(i + 1))
    if edge == "left":
        t = (level - a) / (d - a)
        return ("v", i, j), (float(j), i + t)
    t = (level - b) / (c - b)
    return ("v", i, j + 1), (float(j + 1), i + t)


def extract_iso_contour(
    values: Sequence[Sequence[float]] | np.ndarray, level: float
) -> list[list[tuple[float, float]]]:
    """All polylines tracing ``values == level``.

    Open curves begin and end on the grid boundary; closed loops repeat their
    first vertex at the end. A level outside the value range yields an empty
    list.
    """
    grid = np.asarray(values, dtype=float)
    if grid.ndim != 2 or grid.shape[0] < 2 or grid.shape[1] < 2:
        raise HceError("contour extraction needs a 2-d grid, at least 2 x 2")
    if not np.all(np.isfinite(grid)):
        raise HceError("grid values must be finite")
    if not math.isfinite(level):
        raise HceError("level must be finite")
    if level < grid.min() or level > grid.max():
        return []

    segments: list[tuple[EdgeKey, tuple[float, float], EdgeKey, tuple[float, float]]] = []
    rows, cols = grid.shape
    for i in range(rows - 1):
        for j in range(cols - 1):
            a, b = grid[i, j], grid[i, j + 1]
            c, d = grid[i + 1, j + 1], grid[i + 1, j]
            mask = (
                (a > level) | ((b > level) << 1) | ((c > level) << 2) | ((d > level) << 3)
            )
            if mask in _SADDLE:
                above, below = _SADDLE[mask]
                pairs = above if (a + b + c + d) / 4.0 > level else below
            else:
                pairs = _SEGMENTS[mask]
            for e1, e2 in pairs:
                k1, p1 = _edge_point(e1, i, j, level, a, b, c, d)
                k2, p2 = _edge_point(e2, i, j, level, a, b, c, d)
                segments.append((k1, p1, k2, p2))

    adjacency: dict[EdgeKey, list[int]] = {}
    for idx, (k1, _, k2, _) in enumerate(segments):
        adjacency.setdefault(k1, []).append(idx)
        adjacency.setdefault(k2, []).append(idx)

    used = [False] * len(segments)

    def walk(start_key: EdgeKey) -> list[tuple[float, float]]:
        chain_keys = [start_key]
        key = start_key
        while True:
            next_idx = next(
                (s for s in adjacency[key] if not used[s]), None
            )
            if next_idx is None:
                break
            used[next_idx] = True
            k1, _, k2, _ = segments[next_idx]
            key = k2 if k1 == key else k1
            chain_keys.append(key)
        points = []
        for k in chain_keys:
            idx = adjacency[k][0]
            k1, p1, k2, p2 = segments[idx]
            points.append(p1 if k1 == k else p2)
        return points

    polylines: list[list[tuple[float, float]]] = []
    open_ends = sorted(k for k, segs in adjacency.items() if len(segs) == 1)
    for key in open_ends:
        if all(used[s] for s in adjacency[key]):
            continue
        polylines.append(walk(key))
    for key in sorted(adjacency):
        if all(used[s] for s in adjacency[key]):
            continue
        loop = walk(key)
        if loop[0] != loop[-1]:
            loop.append(loop[0])
        polylines.append(loop)
    return polylines
