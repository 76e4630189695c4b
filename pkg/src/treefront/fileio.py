"""File formats: JSON-lines draw/atlas files and CSV tables.

Floats are written with their shortest round-trip repr, so rereading a file
recovers bitwise-identical values and rerunning a seeded command rewrites
byte-identical output.
"""

from __future__ import annotations

import csv
import json
from typing import Optional, Sequence

import numpy as np

from .atlas import ImageAtlas
from .pareto import ParetoResult
from .random_sets import PFCloud, PSCloud
from .sampler import PosteriorDraw
from .trees import (
    Domain,
    MultiEnsemble,
    domain_to_dict,
    ensemble_from_dict,
    ensemble_to_dict,
)


def write_draws(path, draws: Sequence[PosteriorDraw]) -> None:
    """One posterior draw per line: error variances plus the full ensembles."""
    with open(path, "w", newline="\n") as fh:
        for i, draw in enumerate(draws):
            rec = {
                "draw_index": i,
                "sigma2": list(map(float, draw.sigma2)),
                "domain": domain_to_dict(draw.me.domain),
                "outputs": [ensemble_to_dict(e) for e in draw.me.outputs],
            }
            fh.write(json.dumps(rec) + "\n")


def read_draws(path) -> list[PosteriorDraw]:
    out = []
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            ensembles = tuple(ensemble_from_dict(e) for e in rec["outputs"])
            out.append(PosteriorDraw(MultiEnsemble(ensembles), np.array(rec["sigma2"])))
    return out


def write_atlas_file(path, entries: Sequence[tuple[int, ImageAtlas, Optional[ParetoResult]]]) -> None:
    """One line per draw: its cells, optionally front points and set boxes."""
    with open(path, "w", newline="\n") as fh:
        for draw_index, atlas, result in entries:
            rec = {
                "draw_index": draw_index,
                "cells": [
                    {
                        "alpha": list(map(float, cell.alpha)),
                        "box": {"lo": list(cell.box.lo), "hi": list(cell.box.hi)},
                    }
                    for cell in atlas
                ],
            }
            if result is not None:
                rec["front"] = [
                    {"objective": list(fp.objective), "cell_refs": list(fp.cell_refs)}
                    for fp in result.front
                ]
                rec["set_boxes"] = [
                    {"lo": list(b.lo), "hi": list(b.hi)} for b in result.set_boxes
                ]
            fh.write(json.dumps(rec) + "\n")


def read_atlas_file(path) -> list[tuple[int, ImageAtlas]]:
    """Rebuild each draw's atlas; the domain is the union of its cell boxes."""
    out = []
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            cells = rec["cells"]
            alphas = np.array([c["alpha"] for c in cells], dtype=float)
            los = np.array([c["box"]["lo"] for c in cells], dtype=float)
            his = np.array([c["box"]["hi"] for c in cells], dtype=float)
            domain = Domain(tuple(zip(los.min(axis=0), his.max(axis=0))))
            out.append((int(rec["draw_index"]), ImageAtlas(alphas, los, his, domain)))
    return out


# ---------------------------------------------------------------------------
# CSV tables


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if not isinstance(v, str) else v for v in row])


def write_pf_cloud_csv(path, cloud: PFCloud, annotation: str) -> None:
    """Cloud points with their attainment value or depth rank."""
    if annotation not in ("eaf", "depth_rank"):
        raise ValueError("annotation must be 'eaf' or 'depth_rank'")
    d = len(cloud.points[0].objective) if cloud.points else 2
    header = [f"y{j + 1}" for j in range(d)] + [annotation, "draw_index"]
    rows = []
    for pt in cloud.points:
        ann = pt.eaf if annotation == "eaf" else pt.depth_rank
        rows.append(list(pt.objective) + [ann, pt.draw_index])
    write_csv(path, header, rows)


def write_ps_boxes_csv(path, ps: PSCloud) -> None:
    p = len(ps.boxes[0].box.lo) if ps.boxes else 2
    header = []
    for j in range(p):
        header += [f"lo{j + 1}", f"hi{j + 1}"]
    header.append("draw_index")
    rows = []
    for entry in ps.boxes:
        row = []
        for j in range(p):
            row += [entry.box.lo[j], entry.box.hi[j]]
        row.append(entry.draw_index)
        rows.append(row)
    write_csv(path, header, rows)


def write_depths_csv(path, cpf_draw_indices: Sequence[int], depths) -> None:
    rows = [[int(i), float(v)] for i, v in zip(cpf_draw_indices, depths)]
    write_csv(path, ["draw_index", "depth"], rows)


def write_points_csv(path, points: np.ndarray) -> None:
    points = np.atleast_2d(points)
    header = [f"y{j + 1}" for j in range(points.shape[1])]
    write_csv(path, header, points)


def read_points_csv(path) -> np.ndarray:
    """Coordinate columns (y1.., or box lo/hi columns reduced to centroids)."""
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [list(map(float, r)) for r in reader if r]
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    ycols = [i for i, name in enumerate(header) if name.startswith("y")]
    if ycols:
        return data[:, ycols]
    locols = [i for i, name in enumerate(header) if name.startswith("lo")]
    hicols = [i for i, name in enumerate(header) if name.startswith("hi")]
    if locols and len(locols) == len(hicols):
        return (data[:, locols] + data[:, hicols]) / 2.0
    raise ValueError(f"no coordinate columns found in {path}")


def read_dataset_csv(path):
    """Training table with header x1..xp,y1..yd; returns (X, Y)."""
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [list(map(float, r)) for r in reader if r]
    xcols = [i for i, name in enumerate(header) if name.startswith("x")]
    ycols = [i for i, name in enumerate(header) if name.startswith("y")]
    if not xcols or not ycols:
        raise ValueError("expected header columns x1..xp and y1..yd")
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return data[:, xcols], data[:, ycols]
