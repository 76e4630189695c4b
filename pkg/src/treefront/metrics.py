"""Directed average-distance coverage metrics for point clouds.

overcoverage d(estimate, truth) punishes estimates with points far from the
truth; undercoverage d(truth, estimate) punishes estimates that miss parts
of the truth.  Both are directed means of point-to-set distances and are
not symmetric.
"""

from __future__ import annotations

import numpy as np

from .random_sets import PSCloud

# small primes give a full-period Kronecker lattice in each box
_LATTICE_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)


def dist_point_to_set(a, B) -> float:
    """Euclidean distance from point a to the nearest point of B."""
    a = np.asarray(a, dtype=float)
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if B.size == 0:
        raise ValueError("empty reference set")
    if B.shape[1] != a.shape[0]:
        raise ValueError("dimension mismatch")
    return float(np.min(np.sqrt(np.sum((B - a) ** 2, axis=1))))


def avg_dist(A, B) -> float:
    """Mean over points of A of their distance to B (directed, asymmetric)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.size == 0 or B.size == 0:
        raise ValueError("empty point set")
    total = 0.0
    # chunked pairwise distances keep memory flat for large clouds
    step = max(1, int(2e6) // max(1, len(B)))
    for i in range(0, len(A), step):
        chunk = A[i : i + step]
        d2 = np.sum((chunk[:, None, :] - B[None, :, :]) ** 2, axis=2)
        total += float(np.sqrt(d2.min(axis=1)).sum())
    return total / len(A)


def coverage(cloud, truth) -> tuple[float, float]:
    """(overcoverage, undercoverage) of a cloud against a reference set."""
    return avg_dist(cloud, truth), avg_dist(truth, cloud)


def ps_cloud_to_points(ps: PSCloud, k_per_box: int = 1) -> np.ndarray:
    """Deterministic representative points for a union of boxes.

    One centroid per box; for k_per_box > 1 a Kronecker lattice centered on
    the centroid fills each box, so metric values stabilize as k grows.
    """
    if k_per_box < 1:
        raise ValueError("k_per_box must be >= 1")
    pts = []
    for entry in ps.boxes:
        box = entry.box
        lo = np.array(box.lo)
        hi = np.array(box.hi)
        mid = (lo + hi) / 2.0
        pts.append(mid)
        if k_per_box > 1:
            p = len(lo)
            alpha = np.sqrt(np.array(_LATTICE_PRIMES[:p], dtype=float))
            t = np.arange(1, k_per_box)[:, None]
            frac = np.mod(0.5 + t * alpha[None, :], 1.0)
            pts.append(lo + frac * (hi - lo))
    if not pts:
        return np.empty((0, 0))
    return np.vstack([np.atleast_2d(x) for x in pts])
