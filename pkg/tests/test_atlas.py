import numpy as np
import pytest

from treefront import (
    Domain,
    Ensemble,
    Hyperrectangle,
    MultiEnsemble,
    OutputTransform,
    ensemble_cells,
    eval_ensemble,
    eval_multi,
    intersect_boxes,
    multi_cells,
    tree_leaf_regions,
)

from conftest import (
    PAIRED_STUMP_IMAGE,
    paired_stump_ensembles,
    random_ensemble,
    random_multi,
    random_tree,
)

UNIT2 = Domain.unit(2)


def test_intersect_elementary():
    a = Hyperrectangle((0.0, 0.0), (1.0, 1.0))
    b = Hyperrectangle((0.5, 0.5), (2.0, 2.0))
    got = intersect_boxes(a, b)
    assert got == Hyperrectangle((0.5, 0.5), (1.0, 1.0))


def test_intersect_disjoint_is_empty():
    a = Hyperrectangle((0.0,), (0.5,))
    b = Hyperrectangle((0.5,), (1.0,))
    assert intersect_boxes(a, b) is None
    c = Hyperrectangle((0.7,), (1.0,))
    assert intersect_boxes(a, c) is None


def test_intersect_dimension_mismatch():
    with pytest.raises(ValueError):
        intersect_boxes(Hyperrectangle((0.0,), (1.0,)), Hyperrectangle((0.0, 0.0), (1.0, 1.0)))


def test_intersect_membership_oracle():
    rng = np.random.default_rng(0)
    dom = Domain.unit(3)
    for _ in range(10_000):
        lo1, lo2 = rng.random((2, 3)) * 0.8
        a = Hyperrectangle(tuple(lo1), tuple(lo1 + rng.random(3) * 0.5))
        b = Hyperrectangle(tuple(lo2), tuple(lo2 + rng.random(3) * 0.5))
        inter = intersect_boxes(a, b)
        x = rng.random(3)
        joint = a.contains(x, dom) and b.contains(x, dom)
        assert joint == (inter is not None and inter.contains(x, dom))


def test_single_tree_cells_equal_leaf_regions():
    rng = np.random.default_rng(1)
    tree = random_tree(rng, UNIT2, max_depth=3)
    ens = Ensemble((tree,), OutputTransform.identity(), UNIT2)
    cells = ensemble_cells(ens)
    regions = tree_leaf_regions(tree, UNIT2)
    assert {(mu, box) for box, mu in regions} == {(a, box) for a, box in cells}


def test_three_stump_ensemble_cells():
    # six cells; sums of the printed leaf values, e.g. -1-2-3 on the low corner
    ens = paired_stump_ensembles().outputs[0]
    cells = ensemble_cells(ens)
    assert len(cells) == 6
    assert sorted(a for a, _ in cells) == [-6.0, -4.0, 0.0, 0.0, 2.0, 6.0]
    lookup = {box: a for a, box in cells}
    corner = Hyperrectangle((0.0, 0.0), (0.3, 0.8))
    assert lookup[corner] == -6.0


def test_random_ensemble_cells_match_evaluation():
    rng = np.random.default_rng(2)
    for _ in range(10):
        ens = random_ensemble(rng, UNIT2, m=4)
        for alpha, box in ensemble_cells(ens):
            assert eval_ensemble(ens, box.midpoint()) == alpha


def test_paired_stump_image_is_exact():
    atlas = multi_cells(paired_stump_ensembles())
    assert len(atlas) == 16
    got = set(map(tuple, atlas.alphas.tolist()))
    assert got == PAIRED_STUMP_IMAGE


def test_duplicated_output_repeats_alpha():
    rng = np.random.default_rng(3)
    ens = random_ensemble(rng, UNIT2, m=3)
    me = MultiEnsemble((ens, ens))
    atlas = multi_cells(me)
    assert np.all(atlas.alphas[:, 0] == atlas.alphas[:, 1])
    singles = dict()
    for a, box in ensemble_cells(ens):
        singles[box] = a
    for cell in atlas:
        assert singles[cell.box] == cell.alpha[0]


def test_atlas_grid_membership_oracle():
    rng = np.random.default_rng(4)
    me = random_multi(rng, p=2, d=2, m=4)
    atlas = multi_cells(me)
    grid = np.linspace(0.0, 1.0, 50)
    for x1 in grid:
        for x2 in grid:
            x = np.array([x1, x2])
            i = atlas.contains_point_index(x)
            assert i >= 0
            assert np.array_equal(eval_multi(me, x), atlas.alphas[i])


def test_atlas_partition_volume_and_disjointness():
    rng = np.random.default_rng(5)
    me = random_multi(rng, p=3, d=2, m=3)
    atlas = multi_cells(me)
    assert atlas.total_volume() == pytest.approx(me.domain.volume, rel=1e-9)
    # pairwise interior disjointness on a small instance
    for i in range(len(atlas)):
        for j in range(i + 1, len(atlas)):
            inter = intersect_boxes(atlas.box(i), atlas.box(j))
            assert inter is None or inter.volume == 0.0


def test_cell_count_bounded_by_leaf_product():
    rng = np.random.default_rng(6)
    me = random_multi(rng, p=2, d=2, m=3)
    atlas = multi_cells(me)
    bound = 1
    for ens in me.outputs:
        for t in ens.trees:
            bound *= len(t.leaves())
    assert 1 <= len(atlas) <= bound


def test_alphas_untransformed_once_per_cell():
    rng = np.random.default_rng(7)
    dom = Domain.unit(2)
    ens = random_ensemble(rng, dom, m=4, transform=OutputTransform(3.0, 11.0))
    for alpha, box in ensemble_cells(ens):
        mid = box.midpoint()
        assert alpha == eval_ensemble(ens, mid, units="raw")
        assert alpha == float(ens.transform.to_raw(eval_ensemble(ens, mid, units="scaled")))
