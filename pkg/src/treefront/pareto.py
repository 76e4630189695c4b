"""Pareto dominance, nondominated filtering, and front/set extraction.

Minimization orientation throughout: v dominates w when v is componentwise
no larger, strictly when it is smaller somewhere.  The nondominated filter
is the classic divide-and-conquer scheme: lexicographically presort, split,
solve halves, then keep the second half's survivors that no first-half
survivor strictly dominates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .trees import Hyperrectangle


class Dominance(enum.Enum):
    NONE = 0
    WEAK = 1
    STRICT = 2


def dominates(v, w) -> Dominance:
    """Relation of v over w: WEAK if v <= w everywhere, STRICT if also < somewhere."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    if v.shape != w.shape:
        raise ValueError(f"length mismatch: {v.shape} vs {w.shape}")
    if not np.all(v <= w):
        return Dominance.NONE
    if np.any(v < w):
        return Dominance.STRICT
    return Dominance.WEAK


# Below this size the quadratic scan beats the recursion; any small constant
# is correct, this one is just fast.
_SCAN_CUTOFF = 16


def _strictly_dominated_mask(points: np.ndarray, against: np.ndarray) -> np.ndarray:
    """For each row of `points`, whether some row of `against` strictly dominates it."""
    out = np.zeros(len(points), dtype=bool)
    # chunk the broadcast so memory stays flat when both sides are large
    step = max(1, int(4e6) // max(1, len(against)))
    for i in range(0, len(points), step):
        chunk = points[i : i + step, None, :]
        le = np.all(against[None, :, :] <= chunk, axis=2)
        lt = np.any(against[None, :, :] < chunk, axis=2)
        out[i : i + step] = np.any(le & lt, axis=1)
    return out


def _scan_front(points: np.ndarray) -> np.ndarray:
    return points[~_strictly_dominated_mask(points, points)]


def _merge_dominated_mask(s: np.ndarray, front: np.ndarray) -> np.ndarray:
    """Like _strictly_dominated_mask(s, front) for a lexsorted nondominated
    `front` disjoint from `s`; binary search replaces the pairwise scan when
    there are two objectives (first coordinates strictly increase, second
    strictly decrease along the front)."""
    if front.shape[1] != 2:
        return _strictly_dominated_mask(s, front)
    j = np.searchsorted(front[:, 0], s[:, 0], side="right") - 1
    out = np.zeros(len(s), dtype=bool)
    valid = j >= 0
    jj = j[valid]
    best2 = front[jj, 1]  # least second coordinate among front points with r1 <= s1
    out[valid] = (best2 < s[valid, 1]) | (
        (best2 == s[valid, 1]) & (front[jj, 0] < s[valid, 0])
    )
    return out


def _find_front(points: np.ndarray) -> np.ndarray:
    if len(points) <= _SCAN_CUTOFF:
        return _scan_front(points)
    half = len(points) // 2
    r = _find_front(points[:half])
    s = _find_front(points[half:])
    keep = ~_merge_dominated_mask(s, r)
    return np.vstack([r, s[keep]])


def kung_front(vectors) -> np.ndarray:
    """Nondominated subset of a set of d-vectors, one row per distinct vector.

    Duplicates collapse to a single representative; the result equals the set
    of input vectors not strictly dominated by any input vector.
    """
    pts = np.asarray(vectors, dtype=float)
    if pts.ndim != 2:
        pts = pts.reshape(len(pts), -1)
    if len(pts) == 0:
        return pts
    # lexicographic presort on (first coord, then second, ...): with this
    # order no later point can strictly dominate an earlier one, which is
    # what makes the one-sided merge filter sufficient.
    order = np.lexsort(pts.T[::-1])
    pts = pts[order]
    pts = np.unique(pts, axis=0)  # unique rows are sorted lexicographically
    return _find_front(pts)


@dataclass(frozen=True)
class FrontPoint:
    """A nondominated objective vector plus the atlas cells achieving it."""

    objective: tuple[float, ...]
    cell_refs: tuple[int, ...]


@dataclass(frozen=True)
class ParetoResult:
    front: tuple[FrontPoint, ...]
    set_boxes: tuple[Hyperrectangle, ...]


def pf_ps(atlas) -> ParetoResult:
    """Front and preimage boxes of an image atlas.

    Every cell whose value equals a front objective contributes its box, so
    the returned boxes are the full preimage of the front.
    """
    alphas = atlas.alphas
    front_vals = kung_front(alphas)
    points = []
    boxes = []
    for val in front_vals:
        refs = np.nonzero(np.all(alphas == val, axis=1))[0]
        points.append(FrontPoint(tuple(val), tuple(int(r) for r in refs)))
        boxes.extend(atlas.box(int(r)) for r in refs)
    return ParetoResult(tuple(points), tuple(boxes))
