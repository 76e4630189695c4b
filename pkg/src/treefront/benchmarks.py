"""Analytic multiobjective benchmarks with known fronts, plus unit scaling.

Each benchmark bundles an objective evaluator over a box domain, samplers
for the true Pareto front/set, and the per-output variances under uniform
inputs that calibrate noise levels in simulation studies.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .pareto import kung_front
from .trees import Domain, DomainError

SQRT2 = np.sqrt(2.0)

# Variance of each objective under X ~ U(domain), used to set noise scales.
MOP2_VARIANCES = (0.0636, 0.0636)
ZDT3_VARIANCES = (1.0 / 12.0, 0.0461)
DTLZ2M_VARIANCES = (0.0616, 0.0616)

ZDT3_C3 = 0.70238

TURNING_B1 = 12354.0
TURNING_B2 = 0.0284
TURNING_DOMAIN = Domain(((10.0, 400.0), (0.04, 1.0)))


@dataclass(frozen=True)
class Benchmark:
    """A vector objective with known front/set geometry."""

    name: str
    domain: Domain
    d: int
    batch_eval: Callable[[np.ndarray], np.ndarray]
    front_sampler: Callable[[int], np.ndarray]
    set_sampler: Callable[[int], np.ndarray]
    output_variances: Optional[tuple[float, ...]]
    range_fn: Callable[[], tuple[tuple[float, float], ...]]

    @property
    def p(self) -> int:
        return self.domain.p

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        """Objectives at each row of X; rows must lie in the domain."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.p:
            raise DomainError(f"expected {self.p} columns, got {X.shape[1]}")
        lo, hi = self.domain.lo, self.domain.hi
        if np.any(X < lo) or np.any(X > hi):
            raise DomainError("input outside benchmark domain")
        return self.batch_eval(X)

    def true_front(self, k: int) -> np.ndarray:
        if k < 2:
            raise ValueError("need k >= 2 samples")
        return self.front_sampler(k)

    def true_set(self, k: int) -> np.ndarray:
        if k < 2:
            raise ValueError("need k >= 2 samples")
        return self.set_sampler(k)

    def output_ranges(self) -> tuple[tuple[float, float], ...]:
        return self.range_fn()


# ---------------------------------------------------------------------------
# MOP2 (Fonseca-Fleming rescaled to the unit square)

def _mop2_batch(X: np.ndarray) -> np.ndarray:
    z = 4.0 * X - 2.0
    f1 = 1.0 - np.exp(-np.sum((z - 1.0 / SQRT2) ** 2, axis=1))
    f2 = 1.0 - np.exp(-np.sum((z + 1.0 / SQRT2) ** 2, axis=1))
    return np.column_stack([f1, f2])


def mop2(x) -> np.ndarray:
    """Both objectives at a single point of the unit square."""
    return _mop2().evaluate(np.asarray(x, dtype=float).reshape(1, -1))[0]


_MOP2_T_LO = (2.0 - 1.0 / SQRT2) / 4.0
_MOP2_T_HI = (2.0 + 1.0 / SQRT2) / 4.0


def _mop2_set(k: int) -> np.ndarray:
    t = np.linspace(_MOP2_T_LO, _MOP2_T_HI, k)
    return np.column_stack([t, t])


def _mop2_front(k: int) -> np.ndarray:
    return _mop2_batch(_mop2_set(k))


def _mop2_ranges() -> tuple[tuple[float, float], ...]:
    # exponent sum peaks at the corner farthest from the respective optimum
    top = 2.0 * (2.0 + 1.0 / SQRT2) ** 2
    hi = 1.0 - np.exp(-top)
    return ((0.0, float(hi)), (0.0, float(hi)))


@functools.lru_cache(maxsize=None)
def _mop2() -> Benchmark:
    return Benchmark(
        name="mop2",
        domain=Domain.unit(2),
        d=2,
        batch_eval=_mop2_batch,
        front_sampler=_mop2_front,
        set_sampler=_mop2_set,
        output_variances=MOP2_VARIANCES,
        range_fn=_mop2_ranges,
    )


# ---------------------------------------------------------------------------
# ZDT3 with two inputs; the second objective is pre-normalized so both
# objectives have roughly unit range.

def _zdt3_batch(X: np.ndarray) -> np.ndarray:
    x1 = X[:, 0]
    g = 1.0 + 9.0 * X[:, 1]
    # classic f2 = g * (1 - sqrt(x1/g) - (x1/g) sin(10 pi x1)), then shifted
    # and scaled by the constants that map its attainable span near [0, 1]
    gh = g * (1.0 - np.sqrt(x1 / g)) - x1 * np.sin(10.0 * np.pi * x1)
    f2 = (gh + ZDT3_C3) / (10.0 + ZDT3_C3)
    return np.column_stack([x1, f2])


def zdt3(x) -> np.ndarray:
    return _zdt3().evaluate(np.asarray(x, dtype=float).reshape(1, -1))[0]


@functools.lru_cache(maxsize=None)
def _zdt3_front_samples(resolution: int = 100001) -> tuple[np.ndarray, np.ndarray]:
    """The disconnected front, realized numerically along the x2 = 0 slice."""
    x1 = np.linspace(0.0, 1.0, resolution)
    X = np.column_stack([x1, np.zeros_like(x1)])
    F = _zdt3_batch(X)
    front = kung_front(F)
    # front rows are unique and sorted by f1 = x1, whose values are the inputs
    return front[:, 0].copy(), front


def _zdt3_front(k: int) -> np.ndarray:
    _, front = _zdt3_front_samples()
    idx = np.linspace(0, len(front) - 1, k).round().astype(int)
    return front[idx]


def _zdt3_set(k: int) -> np.ndarray:
    x1, _ = _zdt3_front_samples()
    idx = np.linspace(0, len(x1) - 1, k).round().astype(int)
    return np.column_stack([x1[idx], np.zeros(k)])


@functools.lru_cache(maxsize=None)
def _zdt3_ranges() -> tuple[tuple[float, float], ...]:
    grid = np.linspace(0.0, 1.0, 2001)
    G1, G2 = np.meshgrid(grid, grid, indexing="ij")
    F = _zdt3_batch(np.column_stack([G1.ravel(), G2.ravel()]))
    f2lo, f2hi = float(F[:, 1].min()), float(F[:, 1].max())
    return ((0.0, 1.0), (f2lo, f2hi))


@functools.lru_cache(maxsize=None)
def _zdt3() -> Benchmark:
    return Benchmark(
        name="zdt3",
        domain=Domain.unit(2),
        d=2,
        batch_eval=_zdt3_batch,
        front_sampler=_zdt3_front,
        set_sampler=_zdt3_set,
        output_variances=ZDT3_VARIANCES,
        range_fn=_zdt3_ranges,
    )


# ---------------------------------------------------------------------------
# DTLZ2 variant with four inputs and a convex quarter-circle front.

def _dtlz2m_batch(X: np.ndarray) -> np.ndarray:
    g = np.sum((X[:, 1:4] - 0.5) ** 2, axis=1)
    f1 = (g - 1.0) * np.cos(np.pi * X[:, 0] / 2.0) + 1.0
    f2 = (g - 1.0) * np.sin(np.pi * X[:, 0] / 2.0) + 1.0
    return np.column_stack([f1, f2])


def dtlz2m(x) -> np.ndarray:
    return _dtlz2m().evaluate(np.asarray(x, dtype=float).reshape(1, -1))[0]


def _dtlz2m_set(k: int) -> np.ndarray:
    x1 = np.linspace(0.0, 1.0, k)
    out = np.full((k, 4), 0.5)
    out[:, 0] = x1
    return out


def _dtlz2m_front(k: int) -> np.ndarray:
    t = np.linspace(0.0, np.pi / 2.0, k)
    return np.column_stack([1.0 - np.cos(t), 1.0 - np.sin(t)])


def _dtlz2m_ranges() -> tuple[tuple[float, float], ...]:
    # f_j = 1 - (1 - g) * trig with g in [0, 0.75] and trig in [0, 1]
    return ((0.0, 1.0), (0.0, 1.0))


@functools.lru_cache(maxsize=None)
def _dtlz2m() -> Benchmark:
    return Benchmark(
        name="dtlz2m",
        domain=Domain.unit(4),
        d=2,
        batch_eval=_dtlz2m_batch,
        front_sampler=_dtlz2m_front,
        set_sampler=_dtlz2m_set,
        output_variances=DTLZ2M_VARIANCES,
        range_fn=_dtlz2m_ranges,
    )


# ---------------------------------------------------------------------------
# Single-cut turning operation: machining cost vs tool cost in pounds, as a
# function of cutting speed (mm/min) and feed (mm).

def _turning_batch(X: np.ndarray) -> np.ndarray:
    v, f = X[:, 0], X[:, 1]
    cm = TURNING_B1 / (v * f)
    ct = TURNING_B2 * v ** 2 * f ** 3
    return np.column_stack([cm, ct])


def turning_costs(nu_c: float, f_r: float) -> tuple[float, float]:
    """Machining and tool cost for one cutting-speed/feed setting."""
    out = _turning().evaluate(np.array([[nu_c, f_r]]))[0]
    return float(out[0]), float(out[1])


def _turning_boundary(k: int) -> np.ndarray:
    """Inputs tracing the optimal boundary: feed floor then max-speed edge.

    Machining cost depends on the speed*feed product only, and for a fixed
    product the tool cost is minimized by the smallest feasible feed, so the
    set of optimizers is the bottom edge joined with the right edge.
    """
    u = np.linspace(0.0, 1.0, k)
    v = np.where(u <= 0.5, 10.0 + 390.0 * (2.0 * u), 400.0)
    f = np.where(u <= 0.5, 0.04, 0.04 + 0.96 * (2.0 * u - 1.0))
    return np.column_stack([v, f])


def _turning_front(k: int) -> np.ndarray:
    return _turning_batch(_turning_boundary(k))


def _turning_ranges() -> tuple[tuple[float, float], ...]:
    cm = (TURNING_B1 / (400.0 * 1.0), TURNING_B1 / (10.0 * 0.04))
    ct = (TURNING_B2 * 10.0 ** 2 * 0.04 ** 3, TURNING_B2 * 400.0 ** 2 * 1.0 ** 3)
    return (cm, ct)


@functools.lru_cache(maxsize=None)
def _turning() -> Benchmark:
    return Benchmark(
        name="turning",
        domain=TURNING_DOMAIN,
        d=2,
        batch_eval=_turning_batch,
        front_sampler=_turning_front,
        set_sampler=_turning_boundary,
        output_variances=None,
        range_fn=_turning_ranges,
    )


_REGISTRY = {"mop2": _mop2, "zdt3": _zdt3, "dtlz2m": _dtlz2m, "turning": _turning}


def benchmark_names() -> list[str]:
    return sorted(_REGISTRY)


def get_benchmark(name: str) -> Benchmark:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown benchmark {name!r}; choose from {benchmark_names()}")


def unit_scale(bench: Benchmark) -> Benchmark:
    """Affinely map inputs onto the unit cube and each objective onto [0, 1].

    Dominance is invariant under increasing affine maps, so the scaled
    benchmark's front/set are the scaled images of the originals.
    """
    in_lo, in_hi = bench.domain.lo.copy(), bench.domain.hi.copy()
    in_span = in_hi - in_lo
    ranges = bench.output_ranges()
    out_lo = np.array([r[0] for r in ranges])
    out_span = np.array([r[1] - r[0] for r in ranges])
    if np.any(out_span <= 0):
        raise ValueError("degenerate objective range")

    base_eval = bench.batch_eval
    base_front = bench.front_sampler
    base_set = bench.set_sampler

    def scaled_eval(X: np.ndarray) -> np.ndarray:
        raw = base_eval(in_lo + in_span * X)
        return (raw - out_lo) / out_span

    def scaled_front(k: int) -> np.ndarray:
        return (base_front(k) - out_lo) / out_span

    def scaled_set(k: int) -> np.ndarray:
        return (base_set(k) - in_lo) / in_span

    if bench.output_variances is None:
        variances = None
    else:
        variances = tuple(
            v / s ** 2 for v, s in zip(bench.output_variances, out_span)
        )

    return Benchmark(
        name=bench.name + "_unit",
        domain=Domain.unit(bench.p),
        d=bench.d,
        batch_eval=scaled_eval,
        front_sampler=scaled_front,
        set_sampler=scaled_set,
        output_variances=variances,
        range_fn=lambda: tuple((0.0, 1.0) for _ in range(bench.d)),
    )
