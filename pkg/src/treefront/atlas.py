"""Exact finite image of tree ensembles as (value, box) cells.

A sum of trees is piecewise constant, so a multi-output ensemble attains
finitely many values; each value is attained on an axis-aligned box and the
boxes partition the domain.  Cells are built by folding trees in one at a
time against the current partition and dropping empty intersections, which
keeps the cell count at the number of realizable regions instead of the
full product over leaves.

Cells with coincident values but different boxes stay distinct, so preimage
queries can return every box mapping to a given image point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .trees import Domain, Ensemble, Hyperrectangle, MultiEnsemble, tree_leaf_regions


def intersect_boxes(a: Hyperrectangle, b: Hyperrectangle) -> Optional[Hyperrectangle]:
    """Componentwise intersection; None when empty under the half-open rule."""
    if a.p != b.p:
        raise ValueError(f"dimension mismatch: {a.p} vs {b.p}")
    lo = tuple(max(x, y) for x, y in zip(a.lo, b.lo))
    hi = tuple(min(x, y) for x, y in zip(a.hi, b.hi))
    if any(l >= h for l, h in zip(lo, hi)):
        return None
    return Hyperrectangle(lo, hi)


@dataclass(frozen=True)
class ImageCell:
    alpha: tuple[float, ...]
    box: Hyperrectangle


class ImageAtlas:
    """Array-backed list of image cells of a multi-output ensemble."""

    def __init__(self, alphas: np.ndarray, los: np.ndarray, his: np.ndarray, domain: Domain):
        self._alphas = np.asarray(alphas, dtype=float)
        self._los = np.asarray(los, dtype=float)
        self._his = np.asarray(his, dtype=float)
        if not (len(self._alphas) == len(self._los) == len(self._his)):
            raise ValueError("cell arrays disagree in length")
        self.domain = domain

    @property
    def alphas(self) -> np.ndarray:
        """(n_cells, d) array of image values, raw units."""
        return self._alphas

    @property
    def d(self) -> int:
        return self._alphas.shape[1]

    def __len__(self) -> int:
        return len(self._alphas)

    def box(self, i: int) -> Hyperrectangle:
        return Hyperrectangle(tuple(self._los[i]), tuple(self._his[i]))

    def cell(self, i: int) -> ImageCell:
        return ImageCell(tuple(self._alphas[i]), self.box(i))

    def __iter__(self) -> Iterator[ImageCell]:
        return (self.cell(i) for i in range(len(self)))

    @property
    def cells(self) -> list[ImageCell]:
        return list(self)

    def total_volume(self) -> float:
        return float(np.prod(self._his - self._los, axis=1).sum())

    def contains_point_index(self, x) -> int:
        """Index of the unique cell whose box contains x; -1 if none."""
        x = np.asarray(x, dtype=float)
        dom_hi = self.domain.hi
        below = (x >= self._los)
        above = (x < self._his) | ((self._his >= dom_hi) & (x <= self._his))
        hits = np.nonzero(np.all(below & above, axis=1))[0]
        if len(hits) == 0:
            return -1
        if len(hits) > 1:
            raise AssertionError(f"point {x} in {len(hits)} cells; partition broken")
        return int(hits[0])

    def with_alphas(self, alphas: np.ndarray) -> "ImageAtlas":
        """Same partition, new values (e.g. after a monotone output transform)."""
        alphas = np.asarray(alphas, dtype=float)
        if alphas.shape != self._alphas.shape:
            raise ValueError("replacement alphas have wrong shape")
        return ImageAtlas(alphas, self._los, self._his, self.domain)


def _fold(ensembles: tuple[Ensemble, ...], domain: Domain):
    """Refine the domain against every tree of every ensemble.

    Returns (sums, los, his) where sums[:, j] accumulates ensemble j's leaf
    values in tree order, still in scaled units.
    """
    p = domain.p
    d = len(ensembles)
    los = domain.lo.reshape(1, p)
    his = domain.hi.reshape(1, p)
    sums = np.zeros((1, d))
    for j, ens in enumerate(ensembles):
        for tree in ens.trees:
            regions = tree_leaf_regions(tree, domain)
            new_lo, new_hi, new_sum = [], [], []
            for box, mu in regions:
                lo = np.maximum(los, np.array(box.lo))
                hi = np.minimum(his, np.array(box.hi))
                keep = np.all(lo < hi, axis=1)
                if not np.any(keep):
                    continue
                s = sums[keep].copy()
                s[:, j] += mu
                new_lo.append(lo[keep])
                new_hi.append(hi[keep])
                new_sum.append(s)
            los = np.vstack(new_lo)
            his = np.vstack(new_hi)
            sums = np.vstack(new_sum)
    return sums, los, his


def ensemble_cells(ens: Ensemble) -> list[tuple[float, Hyperrectangle]]:
    """Image cells of a single-output ensemble, values in raw units."""
    sums, los, his = _fold((ens,), ens.domain)
    raw = ens.transform.to_raw(sums[:, 0])
    return [
        (float(raw[i]), Hyperrectangle(tuple(los[i]), tuple(his[i])))
        for i in range(len(raw))
    ]


def multi_cells(me: MultiEnsemble) -> ImageAtlas:
    """Image atlas of a multi-output ensemble.

    Values are un-transformed to raw units once per cell, after all leaf
    sums are accumulated in scaled units.
    """
    sums, los, his = _fold(me.outputs, me.domain)
    alphas = np.empty_like(sums)
    for j, ens in enumerate(me.outputs):
        alphas[:, j] = ens.transform.to_raw(sums[:, j])
    return ImageAtlas(alphas, los, his, me.domain)
