import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from treefront import Dominance, dominates, kung_front, multi_cells, pf_ps
from treefront.pareto import _strictly_dominated_mask

from conftest import paired_stump_ensembles, random_multi


def brute_force_front(points):
    """Quadratic scan oracle: points not strictly dominated by any point."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    keep = []
    for v in pts:
        strict = np.all(pts <= v, axis=1) & np.any(pts < v, axis=1)
        if not strict.any():
            keep.append(tuple(v))
    return set(keep)


def as_set(arr):
    return set(map(tuple, np.asarray(arr).tolist()))


def test_dominates_strict():
    assert dominates([1, 2], [2, 2]) is Dominance.STRICT


def test_dominates_weak_on_equality():
    assert dominates([1, 2], [1, 2]) is Dominance.WEAK


def test_dominates_incomparable():
    assert dominates([1, 3], [2, 1]) is Dominance.NONE


def test_dominates_length_mismatch():
    with pytest.raises(ValueError):
        dominates([1, 2], [1, 2, 3])


def test_kung_small_example():
    got = as_set(kung_front([(1, 2), (2, 1), (3, 3)]))
    assert got == {(1.0, 2.0), (2.0, 1.0)}


def test_kung_singleton_returns_itself():
    assert as_set(kung_front([(4.0, 7.0)])) == {(4.0, 7.0)}


def test_kung_collapses_duplicates():
    got = kung_front([(1, 1), (1, 1), (2, 0)])
    assert len(got) == 2
    assert as_set(got) == {(1.0, 1.0), (2.0, 0.0)}


def test_kung_matches_brute_force_oracle():
    rng = np.random.default_rng(42)
    for trial in range(1000):
        d = int(rng.integers(2, 6))
        n = int(rng.integers(1, 201))
        pts = rng.random((n, d))
        if trial % 3 == 0:
            pts = np.round(pts, 1)  # force ties and duplicates
        assert as_set(kung_front(pts)) == brute_force_front(pts)


@given(
    hnp.arrays(
        float,
        st.tuples(st.integers(1, 40), st.integers(2, 4)),
        elements=st.floats(-10, 10, allow_nan=False),
    )
)
@settings(max_examples=200, deadline=None)
def test_kung_idempotent(pts):
    first = kung_front(pts)
    again = kung_front(first)
    assert as_set(first) == as_set(again)


@given(
    hnp.arrays(
        float,
        st.tuples(st.integers(1, 40), st.integers(2, 4)),
        elements=st.floats(-10, 10, allow_nan=False),
    ),
    st.randoms(),
)
@settings(max_examples=100, deadline=None)
def test_kung_order_invariant(pts, pyrandom):
    order = list(range(len(pts)))
    pyrandom.shuffle(order)
    assert as_set(kung_front(pts)) == as_set(kung_front(pts[order]))


# dyadic lattice values keep the shifted sums exactly representable
_dyadic = st.integers(-640, 640).map(lambda k: k / 64.0)


@given(
    hnp.arrays(float, st.tuples(st.integers(1, 30), st.just(3)), elements=_dyadic),
    st.tuples(_dyadic, _dyadic, _dyadic),
)
@settings(max_examples=100, deadline=None)
def test_kung_monotone_shift(pts, shift):
    shift = np.array(shift)
    base = kung_front(pts)
    shifted = kung_front(pts + shift)
    assert as_set(shifted) == as_set(base + shift)


def test_pf_ps_on_paired_stump_example():
    atlas = multi_cells(paired_stump_ensembles())
    result = pf_ps(atlas)
    assert [p.objective for p in result.front] == [(-6.0, -15.0)]
    # the single front cell is the low corner box
    (fp,) = result.front
    assert len(fp.cell_refs) == 1
    (box,) = result.set_boxes
    assert box.lo == (0.0, 0.0)
    assert box.hi == (0.3, 0.2)


def test_pf_ps_all_equal_alphas_covers_domain():
    atlas = multi_cells(paired_stump_ensembles())
    flat = atlas.with_alphas(np.tile([2.0, 5.0], (len(atlas), 1)))
    result = pf_ps(flat)
    assert [p.objective for p in result.front] == [(2.0, 5.0)]
    assert len(result.set_boxes) == len(flat)
    assert sum(b.volume for b in result.set_boxes) == pytest.approx(1.0)


def test_pf_ps_matches_brute_force_and_reevaluation():
    rng = np.random.default_rng(3)
    for _ in range(10):
        me = random_multi(rng, p=2, d=2, m=3)
        atlas = multi_cells(me)
        result = pf_ps(atlas)
        got = {p.objective for p in result.front}
        assert got == brute_force_front(atlas.alphas)
        # each referenced cell re-evaluates onto its front point
        from treefront import eval_multi

        for fp in result.front:
            for ref in fp.cell_refs:
                mid = atlas.box(ref).midpoint()
                assert tuple(eval_multi(me, mid)) == fp.objective


def test_every_non_front_alpha_strictly_dominated():
    rng = np.random.default_rng(4)
    me = random_multi(rng, p=2, d=2, m=4)
    atlas = multi_cells(me)
    result = pf_ps(atlas)
    front = np.array([p.objective for p in result.front])
    dominated = _strictly_dominated_mask(atlas.alphas, front)
    is_front = np.array(
        [tuple(a) in {p.objective for p in result.front} for a in atlas.alphas]
    )
    assert np.all(dominated | is_front)
