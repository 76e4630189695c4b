"""Attainment-based uncertainty quantification over posterior fronts.

Each posterior draw yields a conditional Pareto front (CPF); the closure of
the region its points weakly dominate is one realization of a random closed
set.  The empirical attainment function counts how many realizations
contain a query point, and the point cloud keeps CPF points whose
attainment sits in a central band.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .atlas import ImageAtlas
from .pareto import FrontPoint, ParetoResult
from .trees import Hyperrectangle


class CellRefError(LookupError):
    """A cloud point references a cell missing from its source atlas."""


@dataclass(frozen=True)
class CPF:
    """Conditional Pareto front of one posterior draw."""

    draw_index: int
    points: tuple[FrontPoint, ...]

    @property
    def n_i(self) -> int:
        return len(self.points)

    def objectives(self) -> np.ndarray:
        return np.array([p.objective for p in self.points])

    @staticmethod
    def from_result(draw_index: int, result: ParetoResult) -> "CPF":
        return CPF(draw_index, result.front)

    @staticmethod
    def from_points(draw_index: int, objectives) -> "CPF":
        """CPF from bare objective vectors (no preimage bookkeeping)."""
        pts = tuple(FrontPoint(tuple(map(float, row)), ()) for row in np.atleast_2d(objectives))
        return CPF(draw_index, pts)


@dataclass(frozen=True)
class ObjectiveBox:
    """Smallest box containing a set of objective points."""

    bounds: tuple[tuple[float, float], ...]

    @staticmethod
    def from_points(points) -> "ObjectiveBox":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return ObjectiveBox(tuple((float(lo), float(hi)) for lo, hi in zip(pts.min(0), pts.max(0))))

    @property
    def d(self) -> int:
        return len(self.bounds)


@dataclass(frozen=True)
class CloudPoint:
    objective: tuple[float, ...]
    draw_index: int
    cell_refs: tuple[int, ...]
    eaf: Optional[float] = None
    depth_rank: Optional[int] = None


@dataclass(frozen=True)
class PFCloud:
    points: tuple[CloudPoint, ...]

    def objectives(self) -> np.ndarray:
        if not self.points:
            return np.empty((0, 0))
        return np.array([p.objective for p in self.points])

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class SourcedBox:
    box: Hyperrectangle
    draw_index: int


@dataclass(frozen=True)
class PSCloud:
    boxes: tuple[SourcedBox, ...]

    def __len__(self) -> int:
        return len(self.boxes)


def dpsc_contains(cpf: CPF, y) -> bool:
    """Whether y lies in the closed dominated region of the CPF."""
    y = np.asarray(y, dtype=float)
    pts = cpf.objectives()
    if pts.size == 0:
        return False
    return bool(np.any(np.all(pts <= y, axis=1)))


def eaf(cpfs: Sequence[CPF], y) -> float:
    """Fraction of the CPFs whose dominated region contains y."""
    if len(cpfs) == 0:
        raise ValueError("need at least one CPF")
    hits = sum(dpsc_contains(c, y) for c in cpfs)
    return hits / len(cpfs)


def _eaf_batch(cpfs: Sequence[CPF], queries: np.ndarray) -> np.ndarray:
    """EAF at many query points at once."""
    counts = np.zeros(len(queries))
    for c in cpfs:
        pts = c.objectives()
        if pts.size == 0:
            continue
        # point q is attained iff some CPF point is <= q componentwise
        contained = np.zeros(len(queries), dtype=bool)
        for p in pts:
            contained |= np.all(queries >= p, axis=1)
        counts += contained
    return counts / len(cpfs)


def pf_cloud_rs(cpfs: Sequence[CPF], alpha_rs: float) -> PFCloud:
    """CPF points whose empirical attainment lies in the central band.

    The band [0.5 - alpha/2, 0.5 + alpha/2] is closed at both ends, which
    keeps the alpha -> 1 limit meaningful.
    """
    if not 0.0 < alpha_rs < 1.0:
        raise ValueError("alpha_rs must be in (0, 1)")
    lo = 0.5 - alpha_rs / 2.0
    hi = 0.5 + alpha_rs / 2.0
    all_points = [(c, fp) for c in cpfs for fp in c.points]
    if not all_points:
        return PFCloud(())
    queries = np.array([fp.objective for _, fp in all_points])
    values = _eaf_batch(cpfs, queries)
    kept = []
    for (c, fp), val in zip(all_points, values):
        if lo <= val <= hi:
            kept.append(CloudPoint(fp.objective, c.draw_index, fp.cell_refs, eaf=float(val)))
    return PFCloud(tuple(kept))


def ps_cloud(cloud: PFCloud, atlases: dict[int, ImageAtlas]) -> PSCloud:
    """Union of the preimage boxes behind every cloud point."""
    boxes = []
    for pt in cloud.points:
        try:
            atlas = atlases[pt.draw_index]
        except KeyError:
            raise CellRefError(f"no atlas for draw {pt.draw_index}")
        for ref in pt.cell_refs:
            if not 0 <= ref < len(atlas):
                raise CellRefError(f"cell {ref} missing from draw {pt.draw_index}")
            boxes.append(SourcedBox(atlas.box(ref), pt.draw_index))
    return PSCloud(tuple(boxes))
