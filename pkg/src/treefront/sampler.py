"""Posterior sampling for additive regression tree models.

One chain per output: Bayesian backfitting over m trees, where each tree
gets a birth/death Metropolis step on its topology (leaf means integrated
out analytically) followed by conjugate draws of its leaf means, and the
error variance gets a scaled-inverse-chi-square draw.  Outputs are fit
independently, each on its own random stream, and draws are emitted as
immutable ensembles in raw output units.

Conventions fixed here rather than tuned per run:

* outputs are centered/rescaled so observed min/max map to -/+ 0.5;
* per variable, the cutpoint grid is a fixed set of equally spaced interior
  values over the observed input range;
* a split is valid only when its cut lies strictly inside the node's box
  and both children keep at least ``min_leaf_obs`` training points;
* split probability at depth D is ``alpha * (1 + D)^-beta``, and a node
  with no valid split is a leaf with probability one (the same truncation
  is applied by the prior simulator, so chain and prior agree exactly).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .trees import (
    Domain,
    Ensemble,
    Leaf,
    MultiEnsemble,
    Node,
    OutputTransform,
    Split,
    Tree,
)


class DegenerateDataError(ValueError):
    """The response column carries no information to scale against."""


RngLike = Union[int, None, np.random.SeedSequence, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True)
class BartConfig:
    """Hyperparameters of one single-output tree-ensemble fit."""

    m: int = 30
    kappa: float = 1.0
    nu: float = 3.0
    lam: float = 0.0001
    n_cutpoints: int = 30
    min_leaf_obs: int = 10
    tree_prior_alpha: float = 0.95
    tree_prior_beta: float = 2.0
    n_burn: int = 1000
    n_draws: int = 500

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("need at least one tree")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.n_cutpoints < 2:
            raise ValueError("need at least two cutpoints")
        if self.min_leaf_obs < 1:
            raise ValueError("min_leaf_obs must be >= 1")

    @property
    def sigma_mu2(self) -> float:
        """Leaf-mean prior variance; m of them sum to (2 kappa)^-2 spread."""
        return 1.0 / (4.0 * self.kappa ** 2 * self.m)


@dataclass(frozen=True)
class Dataset:
    """Training inputs and the full output matrix over a box domain."""

    inputs: np.ndarray
    outputs: np.ndarray
    domain: Domain

    def __post_init__(self):
        X = np.asarray(self.inputs, dtype=float)
        Y = np.asarray(self.outputs, dtype=float)
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "outputs", Y)
        if X.ndim != 2 or Y.ndim != 2 or len(X) != len(Y):
            raise ValueError("inputs must be (n, p) and outputs (n, d) with equal n")
        if X.shape[1] != self.domain.p:
            raise ValueError("input dimension disagrees with domain")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise ValueError("non-finite training values")
        if np.any(X < self.domain.lo) or np.any(X > self.domain.hi):
            raise ValueError("training inputs outside domain")

    @property
    def n(self) -> int:
        return len(self.inputs)

    @property
    def d(self) -> int:
        return self.outputs.shape[1]


@dataclass(frozen=True)
class PosteriorDraw:
    me: MultiEnsemble
    sigma2: np.ndarray


def scale_outputs(y) -> tuple[np.ndarray, OutputTransform]:
    """Map the observed response range onto [-0.5, 0.5]."""
    y = np.asarray(y, dtype=float)
    ymin, ymax = float(np.min(y)), float(np.max(y))
    if not ymax > ymin:
        raise DegenerateDataError("response column is constant")
    transform = OutputTransform(center=(ymin + ymax) / 2.0, scale=ymax - ymin)
    return transform.to_scaled(y), transform


def log_marginal_leaf(leaf_stats, sigma2: float, sigma_mu2: float) -> float:
    """Log marginal likelihood of leaf residuals with the mean integrated out.

    ``leaf_stats`` is a sequence of (count, sum, sum-of-squares) triples, one
    per leaf.  Empty leaves contribute zero; a single observation reduces to
    a normal density with the two variances convolved.
    """
    total = 0.0
    for k, s, q in leaf_stats:
        if k == 0:
            continue
        denom = sigma2 + k * sigma_mu2
        total += (
            -0.5 * k * math.log(2.0 * math.pi * sigma2)
            + 0.5 * math.log(sigma2 / denom)
            - q / (2.0 * sigma2)
            + sigma_mu2 * s * s / (2.0 * sigma2 * denom)
        )
    return total


def sample_sigma2(residuals, nu: float, lam: float, rng: RngLike) -> float:
    """Scaled-inverse-chi-square draw conditioned on the residuals."""
    r = np.asarray(residuals, dtype=float)
    n = r.size
    nu_post = nu + n
    lam_post = (nu * lam + float(np.sum(r * r))) / nu_post
    gen = as_generator(rng)
    return nu_post * lam_post / gen.chisquare(nu_post)


# ---------------------------------------------------------------------------
# internal mutable tree used during sampling


class _SNode:
    __slots__ = ("leaf", "var", "cut", "left", "right", "parent", "idx", "mu")

    def __init__(self, idx: np.ndarray, parent: Optional["_SNode"] = None):
        self.leaf = True
        self.var = -1
        self.cut = 0.0
        self.left: Optional[_SNode] = None
        self.right: Optional[_SNode] = None
        self.parent = parent
        self.idx = idx
        self.mu = 0.0


def _collect_leaves(root: _SNode, lo: np.ndarray, hi: np.ndarray, depth: int = 0):
    if root.leaf:
        return [(root, lo, hi, depth)]
    left_hi = hi.copy()
    left_hi[root.var] = root.cut
    right_lo = lo.copy()
    right_lo[root.var] = root.cut
    return _collect_leaves(root.left, lo, left_hi, depth + 1) + _collect_leaves(
        root.right, right_lo, hi, depth + 1
    )


def _collect_prunable(root: _SNode, lo: np.ndarray, hi: np.ndarray, depth: int = 0):
    if root.leaf:
        return []
    out = []
    if root.left.leaf and root.right.leaf:
        out.append((root, lo, hi, depth))
    left_hi = hi.copy()
    left_hi[root.var] = root.cut
    right_lo = lo.copy()
    right_lo[root.var] = root.cut
    out += _collect_prunable(root.left, lo, left_hi, depth + 1)
    out += _collect_prunable(root.right, right_lo, hi, depth + 1)
    return out


def _count_prunable(root: _SNode) -> int:
    if root.leaf:
        return 0
    if root.left.leaf and root.right.leaf:
        return 1
    return _count_prunable(root.left) + _count_prunable(root.right)


class _TreeState:
    """One tree plus the shared training design and cutpoint grids."""

    def __init__(self, X: np.ndarray, domain: Domain, grids: list[np.ndarray], cfg: BartConfig):
        self.X = X
        self.domain = domain
        self.grids = grids
        self.cfg = cfg
        self.root = _SNode(np.arange(len(X)))

    # -- split bookkeeping ---------------------------------------------------

    def valid_cuts(self, node: _SNode, lo: np.ndarray, hi: np.ndarray, var: int) -> np.ndarray:
        grid = self.grids[var]
        cuts = grid[(grid > lo[var]) & (grid < hi[var])]
        if cuts.size == 0:
            return cuts
        xs = np.sort(self.X[node.idx, var])
        n_left = np.searchsorted(xs, cuts, side="left")
        ok = (n_left >= self.cfg.min_leaf_obs) & (len(xs) - n_left >= self.cfg.min_leaf_obs)
        return cuts[ok]

    def valid_vars(self, node: _SNode, lo: np.ndarray, hi: np.ndarray) -> list[int]:
        if len(node.idx) < 2 * self.cfg.min_leaf_obs:
            return []
        return [v for v in range(self.X.shape[1]) if self.valid_cuts(node, lo, hi, v).size > 0]

    def has_valid_split(self, node: _SNode, lo: np.ndarray, hi: np.ndarray) -> bool:
        return len(self.valid_vars(node, lo, hi)) > 0

    def p_split(self, depth: int) -> float:
        return self.cfg.tree_prior_alpha * (1.0 + depth) ** (-self.cfg.tree_prior_beta)

    def growable(self):
        leaves = _collect_leaves(self.root, self.domain.lo, self.domain.hi)
        return [lf for lf in leaves if self.has_valid_split(lf[0], lf[1], lf[2])]

    # -- moves ----------------------------------------------------------------

    def apply_birth(self, node: _SNode, var: int, cut: float) -> None:
        mask = self.X[node.idx, var] < cut
        left = _SNode(node.idx[mask], parent=node)
        right = _SNode(node.idx[~mask], parent=node)
        left.mu = node.mu
        right.mu = node.mu
        node.leaf = False
        node.var = var
        node.cut = cut
        node.left = left
        node.right = right
        node.idx = np.empty(0, dtype=int)

    def apply_death(self, node: _SNode) -> None:
        node.idx = np.concatenate([node.left.idx, node.right.idx])
        node.mu = node.left.mu
        node.leaf = True
        node.left = None
        node.right = None
        node.var = -1

    # -- Metropolis step -------------------------------------------------------

    def _leaf_stats(self, idx: np.ndarray, resid: np.ndarray):
        r = resid[idx]
        return (len(r), float(r.sum()), float((r * r).sum()))

    def mh_step(self, resid: np.ndarray, sigma2: float, rng: np.random.Generator,
                flat_likelihood: bool = False) -> bool:
        """One birth-or-death proposal; returns whether it was accepted."""
        cfg = self.cfg
        smu2 = cfg.sigma_mu2
        if rng.random() < 0.5:
            # birth
            growable = self.growable()
            if not growable:
                return False
            node, lo, hi, depth = growable[int(rng.integers(len(growable)))]
            vs = self.valid_vars(node, lo, hi)
            var = vs[int(rng.integers(len(vs)))]
            cuts = self.valid_cuts(node, lo, hi, var)
            cut = float(cuts[int(rng.integers(len(cuts)))])

            mask = self.X[node.idx, var] < cut
            idx_l, idx_r = node.idx[mask], node.idx[~mask]
            lo_l, hi_l = lo, hi.copy()
            hi_l[var] = cut
            lo_r, hi_r = lo.copy(), hi
            lo_r[var] = cut
            child_l = _SNode(idx_l)
            child_r = _SNode(idx_r)
            p_d = self.p_split(depth)
            p_d1 = self.p_split(depth + 1)
            f_l = (1.0 - p_d1) if self.has_valid_split(child_l, lo_l, hi_l) else 1.0
            f_r = (1.0 - p_d1) if self.has_valid_split(child_r, lo_r, hi_r) else 1.0

            parent_was_prunable = (
                node.parent is not None
                and node.parent.left.leaf
                and node.parent.right.leaf
            )
            n_prunable_new = _count_prunable(self.root) + 1 - int(parent_was_prunable)

            log_ratio = (
                math.log(p_d) - math.log1p(-p_d)
                + math.log(f_l) + math.log(f_r)
                + math.log(len(growable)) - math.log(n_prunable_new)
            )
            if not flat_likelihood:
                stats_parent = [self._leaf_stats(node.idx, resid)]
                stats_children = [self._leaf_stats(idx_l, resid), self._leaf_stats(idx_r, resid)]
                log_ratio += log_marginal_leaf(stats_children, sigma2, smu2)
                log_ratio -= log_marginal_leaf(stats_parent, sigma2, smu2)
            if math.log(rng.random()) < log_ratio:
                self.apply_birth(node, var, cut)
                return True
            return False

        # death
        prunable = _collect_prunable(self.root, self.domain.lo, self.domain.hi)
        if not prunable:
            return False
        node, lo, hi, depth = prunable[int(rng.integers(len(prunable)))]
        var = node.var
        lo_l, hi_l = lo, hi.copy()
        hi_l[var] = node.cut
        lo_r, hi_r = lo.copy(), hi
        lo_r[var] = node.cut
        p_d = self.p_split(depth)
        p_d1 = self.p_split(depth + 1)
        f_l = (1.0 - p_d1) if self.has_valid_split(node.left, lo_l, hi_l) else 1.0
        f_r = (1.0 - p_d1) if self.has_valid_split(node.right, lo_r, hi_r) else 1.0

        growable_now = self.growable()
        n_growable_after = 1 + sum(
            1 for lf in growable_now if lf[0] is not node.left and lf[0] is not node.right
        )

        log_ratio = (
            math.log1p(-p_d) - math.log(p_d)
            - math.log(f_l) - math.log(f_r)
            - math.log(n_growable_after) + math.log(len(prunable))
        )
        if not flat_likelihood:
            merged = np.concatenate([node.left.idx, node.right.idx])
            stats_children = [
                self._leaf_stats(node.left.idx, resid),
                self._leaf_stats(node.right.idx, resid),
            ]
            stats_merged = [self._leaf_stats(merged, resid)]
            log_ratio += log_marginal_leaf(stats_merged, sigma2, smu2)
            log_ratio -= log_marginal_leaf(stats_children, sigma2, smu2)
        if math.log(rng.random()) < log_ratio:
            self.apply_death(node)
            return True
        return False

    # -- conditional draws ------------------------------------------------------

    def draw_leaf_means(self, resid: np.ndarray, sigma2: float, sigma_mu2: float,
                        rng: np.random.Generator, from_prior: bool = False) -> None:
        for node, _, _, _ in _collect_leaves(self.root, self.domain.lo, self.domain.hi):
            if from_prior:
                node.mu = math.sqrt(sigma_mu2) * rng.standard_normal()
                continue
            k, s, _ = self._leaf_stats(node.idx, resid)
            var_post = 1.0 / (k / sigma2 + 1.0 / sigma_mu2)
            mean_post = var_post * s / sigma2
            node.mu = mean_post + math.sqrt(var_post) * rng.standard_normal()

    def predict(self) -> np.ndarray:
        fit = np.empty(len(self.X))
        for node, _, _, _ in _collect_leaves(self.root, self.domain.lo, self.domain.hi):
            fit[node.idx] = node.mu
        return fit

    # -- conversions --------------------------------------------------------------

    def to_tree(self) -> Tree:
        def rec(node: _SNode) -> Node:
            if node.leaf:
                return Leaf(node.mu)
            return Split(node.var, node.cut, rec(node.left), rec(node.right))

        return Tree(rec(self.root))

    def load_tree(self, tree: Tree) -> None:
        def rec(node: Node, idx: np.ndarray, parent: Optional[_SNode]) -> _SNode:
            snode = _SNode(idx, parent)
            if isinstance(node, Leaf):
                snode.mu = node.mu
                return snode
            mask = self.X[idx, node.var] < node.cut
            snode.leaf = False
            snode.var = node.var
            snode.cut = node.cut
            snode.idx = np.empty(0, dtype=int)
            snode.left = rec(node.left, idx[mask], snode)
            snode.right = rec(node.right, idx[~mask], snode)
            return snode

        self.root = rec(tree.root, np.arange(len(self.X)), None)


def cutpoint_grids(X: np.ndarray, n_cutpoints: int) -> list[np.ndarray]:
    """Equally spaced interior cutpoints over each observed input range."""
    grids = []
    for v in range(X.shape[1]):
        lo, hi = float(X[:, v].min()), float(X[:, v].max())
        if hi <= lo:
            grids.append(np.empty(0))
            continue
        steps = np.arange(1, n_cutpoints + 1) / (n_cutpoints + 1)
        grids.append(lo + (hi - lo) * steps)
    return grids


def sample_prior_tree(X: np.ndarray, domain: Domain, cfg: BartConfig,
                      rng: RngLike) -> Tree:
    """Direct draw from the tree prior truncated to splits valid for X."""
    gen = as_generator(rng)
    state = _TreeState(np.asarray(X, dtype=float), domain, cutpoint_grids(X, cfg.n_cutpoints), cfg)

    def rec(node: _SNode, lo: np.ndarray, hi: np.ndarray, depth: int) -> None:
        vs = state.valid_vars(node, lo, hi)
        if not vs:
            return
        if gen.random() >= state.p_split(depth):
            return
        var = vs[int(gen.integers(len(vs)))]
        cuts = state.valid_cuts(node, lo, hi, var)
        cut = float(cuts[int(gen.integers(len(cuts)))])
        state.apply_birth(node, var, cut)
        hi_l = hi.copy()
        hi_l[var] = cut
        lo_r = lo.copy()
        lo_r[var] = cut
        rec(node.left, lo, hi_l, depth + 1)
        rec(node.right, lo_r, hi, depth + 1)

    rec(state.root, domain.lo, domain.hi, 0)
    return state.to_tree()


def mh_tree_step(tree: Tree, X, residuals, sigma2: float, cfg: BartConfig,
                 domain: Domain, rng: RngLike) -> Tree:
    """One topology proposal applied to an immutable tree; rejection returns
    a tree equal to the input."""
    X = np.asarray(X, dtype=float)
    state = _TreeState(X, domain, cutpoint_grids(X, cfg.n_cutpoints), cfg)
    state.load_tree(tree)
    state.mh_step(np.asarray(residuals, dtype=float), sigma2, as_generator(rng))
    return state.to_tree()


def sample_leaf_means(tree: Tree, X, residuals, sigma2: float, sigma_mu2: float,
                      domain: Domain, rng: RngLike) -> Tree:
    """Conjugate normal draw of every leaf mean given the residuals."""
    X = np.asarray(X, dtype=float)
    cfg = BartConfig(min_leaf_obs=1)
    state = _TreeState(X, domain, cutpoint_grids(X, cfg.n_cutpoints), cfg)
    state.load_tree(tree)
    state.draw_leaf_means(np.asarray(residuals, dtype=float), sigma2, sigma_mu2, as_generator(rng))
    return state.to_tree()


def fit_bart(X, y, domain: Domain, cfg: BartConfig, rng: RngLike) -> list[tuple[Ensemble, float]]:
    """Posterior draws for one output column.

    Returns ``cfg.n_draws`` post-burn-in (ensemble, error variance) pairs,
    the variance already back in raw output units.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(X)
    if n != len(y):
        raise ValueError("input/output length mismatch")
    if n < 2 * cfg.min_leaf_obs:
        raise ValueError(f"need at least {2 * cfg.min_leaf_obs} observations")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite training data")
    gen = as_generator(rng)

    y_scaled, transform = scale_outputs(y)
    grids = cutpoint_grids(X, cfg.n_cutpoints)
    states = [_TreeState(X, domain, grids, cfg) for _ in range(cfg.m)]
    fits = np.zeros((cfg.m, n))
    total = fits.sum(axis=0)
    sigma2 = max(float(np.var(y_scaled)), 1e-10)

    draws: list[tuple[Ensemble, float]] = []
    for sweep in range(cfg.n_burn + cfg.n_draws):
        for t, state in enumerate(states):
            resid_t = y_scaled - total + fits[t]
            state.mh_step(resid_t, sigma2, gen)
            state.draw_leaf_means(resid_t, sigma2, cfg.sigma_mu2, gen)
            new_fit = state.predict()
            total += new_fit - fits[t]
            fits[t] = new_fit
        total = fits.sum(axis=0)  # kill incremental drift once per sweep
        sigma2 = sample_sigma2(y_scaled - total, cfg.nu, cfg.lam, gen)
        if sweep >= cfg.n_burn:
            ens = Ensemble(
                trees=tuple(s.to_tree() for s in states),
                transform=transform,
                domain=domain,
            )
            draws.append((ens, sigma2 * transform.scale ** 2))
    return draws


def fit_multi_bart(
    dataset: Dataset,
    cfg: BartConfig,
    seed: Union[int, np.random.SeedSequence, None] = None,
    per_output_seeds: Optional[Sequence] = None,
) -> list[PosteriorDraw]:
    """Independent per-output fits assembled into joint posterior draws.

    Each output runs on its own stream: by default the streams are spawned
    from ``seed`` by output position, or pass ``per_output_seeds`` to pin
    them (fitting a column is then invariant to where the column sits).
    """
    d = dataset.d
    if dataset.n < 2 * cfg.min_leaf_obs:
        raise ValueError(f"need at least {2 * cfg.min_leaf_obs} observations")
    if per_output_seeds is not None:
        if len(per_output_seeds) != d:
            raise ValueError("need one seed per output")
        streams = list(per_output_seeds)
    else:
        root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        streams = root.spawn(d)

    per_output = [
        fit_bart(dataset.inputs, dataset.outputs[:, j], dataset.domain, cfg, streams[j])
        for j in range(d)
    ]
    draws = []
    for i in range(cfg.n_draws):
        ensembles = tuple(per_output[j][i][0] for j in range(d))
        sigma2 = np.array([per_output[j][i][1] for j in range(d)])
        draws.append(PosteriorDraw(MultiEnsemble(ensembles), sigma2))
    return draws
