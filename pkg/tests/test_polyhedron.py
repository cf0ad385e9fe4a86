import numpy as np
import pytest

from preftours.polyhedron import (
    Cut,
    Polyhedron,
    add_cut,
    is_valid_cut,
    probable_regions,
    region_probability,
    solve_lp,
)

from oracles import enumerate_vertices, lp_oracle


def test_cut_rejects_zero_direction():
    with pytest.raises(ValueError):
        Cut(direction=(0.0, 0.0))


def test_cut_flip_negates():
    cut = Cut(direction=(1.0, -2.0))
    flipped = cut.flipped()
    assert tuple(flipped.direction) == (-1.0, 2.0)
    assert flipped.negated and not cut.negated


def test_box_contains_origin_and_ones():
    poly = Polyhedron(dimension=3)
    assert poly.contains(np.zeros(3))
    assert poly.contains(np.ones(3))
    assert not poly.contains(np.array([1.2, 0, 0]))


def test_add_cut_keeps_original():
    poly = Polyhedron(dimension=2)
    bigger = add_cut(poly, Cut(direction=(1.0, -1.0)))
    assert len(poly.cuts) == 0
    assert len(bigger.cuts) == 1


def test_add_cut_dimension_mismatch():
    with pytest.raises(ValueError):
        add_cut(Polyhedron(dimension=2), Cut(direction=(1.0, 0.0, 0.0)))


def test_lp_box_corner():
    result = solve_lp(np.array([1.0, 1.0]), Polyhedron(dimension=2), "max")
    assert result.value == pytest.approx(2.0)
    assert result.optimizer == pytest.approx([1.0, 1.0])


def test_lp_diagonal_tie():
    poly = add_cut(Polyhedron(dimension=2), Cut(direction=(-1.0, 1.0)))
    result = solve_lp(np.array([1.0, -1.0]), poly, "max")
    assert result.value == pytest.approx(0.0, abs=1e-12)
    corners = [np.zeros(2), np.ones(2)]
    assert any(np.allclose(result.optimizer, c, atol=1e-9) for c in corners)


def test_lp_min_at_origin():
    poly = Polyhedron(dimension=3)
    result = solve_lp(np.ones(3), poly, "min")
    assert result.value == pytest.approx(0.0, abs=1e-12)
    assert result.optimizer == pytest.approx(np.zeros(3), abs=1e-12)


def test_lp_matches_vertex_oracle_randomized(rng):
    for trial in range(200):
        dim = int(rng.integers(1, 5))
        n_cuts = int(rng.integers(0, 7))
        cuts = []
        while len(cuts) < n_cuts:
            d = rng.uniform(-1, 1, dim)
            if np.abs(d).max() > 1e-6:
                cuts.append(Cut(direction=tuple(d)))
        poly = Polyhedron(dimension=dim, cuts=tuple(cuts))
        objective = rng.uniform(-2, 2, dim)
        sense = "max" if trial % 2 == 0 else "min"
        got = solve_lp(objective, poly, sense)
        want = lp_oracle(objective, dim, cuts, sense)
        assert got.value == pytest.approx(want, abs=1e-9)
        assert poly.contains(got.optimizer, tol=1e-9)


def test_lp_deterministic():
    rng = np.random.default_rng(0)
    cuts = tuple(Cut(direction=tuple(rng.uniform(-1, 1, 3))) for _ in range(3))
    poly = Polyhedron(dimension=3, cuts=cuts)
    c = rng.uniform(-1, 1, 3)
    a = solve_lp(c, poly, "max")
    b = solve_lp(c, poly, "max")
    assert np.array_equal(a.optimizer, b.optimizer)


def test_valid_cut_examples():
    box = Polyhedron(dimension=2)
    assert is_valid_cut(Cut(direction=(1.0, -1.0)), box)
    # nonnegative direction holds on the whole box
    assert not is_valid_cut(Cut(direction=(1.0, 0.5)), box)
    # repeating an existing cut leaves no interior on the negative side
    poly = add_cut(box, Cut(direction=(1.0, -1.0)))
    assert not is_valid_cut(Cut(direction=(1.0, -1.0)), poly)


def test_valid_cut_shrinks_feasible_set(rng):
    poly = Polyhedron(dimension=3)
    direction = np.array([0.8, -0.6, 0.1])
    cut = Cut(direction=tuple(direction))
    assert is_valid_cut(cut, poly)
    after = add_cut(poly, cut)
    # the point best aligned with -d was feasible and is now excluded
    witness = solve_lp(-direction, poly, "max").optimizer
    assert poly.contains(witness)
    assert not after.contains(witness)
    # and the max along some objective strictly drops
    before_val = solve_lp(-direction, poly, "max").value
    after_val = solve_lp(-direction, after, "max").value
    assert after_val < before_val - 1e-9


def test_add_complementary_cuts_leaves_hyperplane():
    poly = Polyhedron(dimension=2)
    d = (1.0, -1.0)
    both = add_cut(add_cut(poly, Cut(direction=d)), Cut(direction=(-1.0, 1.0)))
    for _ in range(20):
        w = np.random.default_rng(1).uniform(0, 1, 2)
        if both.contains(w):
            assert abs(w[0] - w[1]) < 1e-9
    result = solve_lp(np.array([1.0, 0.0]), both, "max")
    assert abs(result.optimizer[0] - result.optimizer[1]) < 1e-9


def test_region_probability_values():
    assert region_probability(0, 3, 0.8) == pytest.approx(0.512)
    assert region_probability(3, 3, 0.8) == pytest.approx(0.2**3)
    probs = [region_probability(k, 5, 0.8) for k in range(6)]
    assert all(a > b for a, b in zip(probs, probs[1:]))


def test_region_probability_range_checked():
    with pytest.raises(ValueError):
        region_probability(0, 1, 0.5)
    with pytest.raises(ValueError):
        region_probability(2, 1, 0.8)


def test_probable_regions_no_cuts(rng):
    regions = probable_regions(3, (), 4, 0.8, rng)
    assert len(regions) == 4
    for poly, prob in regions:
        assert prob == 1.0
        assert len(poly.cuts) == 0


def test_probable_regions_certain_cuts(rng):
    cuts = (Cut(direction=(1.0, -1.0)), Cut(direction=(-0.5, 1.0)))
    regions = probable_regions(2, cuts, 5, 1.0, rng)
    for poly, prob in regions:
        assert prob == 1.0
        assert [c.direction for c in poly.cuts] == [c.direction for c in cuts]


def test_probable_regions_one_flip_probability(rng):
    cuts = (Cut(direction=(1.0, -1.0)), Cut(direction=(-0.5, 1.0)))
    found = set()
    for _ in range(400):
        (poly, prob), = probable_regions(2, cuts, 1, 0.8, rng)
        flips = sum(1 for c in poly.cuts if c.negated)
        found.add(flips)
        assert prob == pytest.approx(0.8 ** (2 - flips) * 0.2**flips)
    assert {0, 1} <= found


def test_probable_regions_deterministic_under_seed():
    cuts = (Cut(direction=(1.0, -1.0)),)
    a = probable_regions(2, cuts, 6, 0.7, np.random.default_rng(9))
    b = probable_regions(2, cuts, 6, 0.7, np.random.default_rng(9))
    assert [p for _, p in a] == [p for _, p in b]
    assert [[c.negated for c in poly.cuts] for poly, _ in a] == [
        [c.negated for c in poly.cuts] for poly, _ in b
    ]


def test_enumeration_oracle_sanity():
    # the unit square has exactly 4 vertices
    vertices = enumerate_vertices(2, ())
    assert len(vertices) == 4
