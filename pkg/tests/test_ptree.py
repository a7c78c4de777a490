import itertools

import pytest
from hypothesis import given, settings, strategies as st

from homotiles.errors import BudgetExceeded
from homotiles.ptree import (
    BranchLevelSet,
    DigitTree,
    NotHomogeneous,
    branch_levels_from_zero_indices,
    count_homogeneous,
    digits,
    enumerate_homogeneous,
    from_digits,
    generate_homogeneous,
    homogeneity,
    is_homogeneous,
    spectral_homogeneity_check,
)

EXAMPLE_27 = frozenset({0, 4, 8, 9, 13, 17, 18, 22, 26})


def brute_homogeneous(C, p, n):
    """Independent oracle: count distinct children straight from the definition."""
    levels = set()
    for g in range(n):
        counts = {}
        for v in {c % p**g for c in C}:
            counts[v] = len({c % p ** (g + 1) for c in C if c % p**g == v})
        vals = set(counts.values())
        if vals == {p}:
            levels.add(g)
        elif vals != {1}:
            return None
    return frozenset(levels)


def test_digits_examples():
    assert digits(4, 3, 3) == (1, 1, 0)
    assert digits(0, 3, 3) == (0, 0, 0)
    assert digits(26, 3, 3) == (2, 2, 2)
    assert from_digits((1, 1, 0), 3) == 4
    with pytest.raises(ValueError):
        digits(27, 3, 3)


def test_homogeneity_examples():
    assert homogeneity(EXAMPLE_27, 3, 3) == BranchLevelSet(frozenset({0, 2}))
    assert homogeneity(range(8), 2, 3).levels == {0, 1, 2}
    h = homogeneity([0, 1, 2, 4], 2, 3)
    # root has children {0, 1}; at level 1, vertex 0 has two children and vertex 1 only one
    assert isinstance(h, NotHomogeneous) and h.level == 1 and not h


def test_homogeneity_rejects_degenerate_input():
    with pytest.raises(ValueError):
        homogeneity([], 2, 2)
    with pytest.raises(ValueError):
        homogeneity([0, 4], 2, 2)


@pytest.mark.parametrize("p, n", [(2, 3), (3, 2), (2, 4)])
def test_homogeneity_matches_brute_force(p, n):
    N = p**n
    for k in range(1, min(N, 9)):
        for C in itertools.combinations(range(N), k):
            h = homogeneity(C, p, n)
            expected = brute_homogeneous(C, p, n)
            assert (h.levels if h else None) == expected


def test_branch_levels_from_zero_indices():
    assert branch_levels_from_zero_indices({0}, 2) == {1}
    assert branch_levels_from_zero_indices({0, 2}, 3) == {2, 0}
    assert branch_levels_from_zero_indices([], 4) == frozenset()


def test_spectral_examples():
    v = spectral_homogeneity_check(EXAMPLE_27, 3, 3, [1, 3])
    assert v.holds and v.levels == {0, 2}
    v = spectral_homogeneity_check([0], 2, 2, [])
    assert v.holds and v.levels == frozenset()
    v = spectral_homogeneity_check([0, 2], 2, 2, [2])
    assert v.holds and v.levels == {1}
    assert not spectral_homogeneity_check([0, 1, 2], 2, 2, [2]).holds
    with pytest.raises(ValueError):
        spectral_homogeneity_check([0], 2, 2, [3])


@pytest.mark.parametrize("p, n", [(2, 3), (3, 2), (2, 4)])
def test_spectral_route_exhaustive(p, n):
    # whenever the hypotheses hold, the tree must agree (the check raises otherwise)
    N = p**n
    for k in range(1, min(N, 7)):
        for C in itertools.combinations(range(N), k):
            for r in range(n + 1):
                for js in itertools.combinations(range(1, n + 1), r):
                    spectral_homogeneity_check(C, p, n, js)


def test_generate_examples():
    assert generate_homogeneous(3, 2, {0, 1}, lambda lv, v: 2) == frozenset(range(9))
    assert generate_homogeneous(3, 3, {0, 2}, lambda lv, v: v % 3) == EXAMPLE_27
    assert generate_homogeneous(2, 3, set()) == {0}
    with pytest.raises(ValueError):
        generate_homogeneous(2, 2, {2})
    with pytest.raises(ValueError):
        generate_homogeneous(2, 2, set(), lambda lv, v: 5)


def test_enumerate_examples():
    assert list(enumerate_homogeneous(2, 2, {0, 1})) == [frozenset(range(4))]
    assert set(enumerate_homogeneous(2, 2, {0})) == {frozenset(s) for s in ({0, 1}, {0, 3}, {2, 1}, {2, 3})}
    assert set(enumerate_homogeneous(2, 2, {1})) == {frozenset({0, 2}), frozenset({1, 3})}
    with pytest.raises(BudgetExceeded):
        enumerate_homogeneous(3, 3, set(), budget=10)


@pytest.mark.parametrize("p, n", [(2, 2), (2, 3), (3, 2)])
def test_enumerate_is_exactly_the_homogeneous_sets(p, n):
    N = p**n
    for r in range(n + 1):
        for I in itertools.combinations(range(n), r):
            I = frozenset(I)
            sets = list(enumerate_homogeneous(p, n, I))
            assert len(sets) == len(set(sets)) == count_homogeneous(p, n, I)
            brute = {frozenset(C) for C in itertools.combinations(range(N), p**r) if brute_homogeneous(C, p, n) == I}
            assert set(sets) == brute


def test_digit_tree_example_27():
    tree = DigitTree.of(EXAMPLE_27, 3, 3)
    assert tree.branching_levels() == [0, 2]
    # 1 root + 3 + 3 internal vertices, 9 leaves
    assert tree.internal_vertex_count() == 7
    assert len(tree.levels[3]) == 9
    dot = tree.to_dot()
    assert dot.count("style=bold") == 3 + 9
    assert dot == DigitTree.of(sorted(EXAMPLE_27, reverse=True), 3, 3).to_dot()


def test_digit_tree_singleton_is_a_path():
    tree = DigitTree.of([0], 2, 4)
    assert [len(v) for v in tree.levels] == [1] * 5
    assert len(tree.edges()) == 4
    assert tree.branching_levels() == []
    assert tree.to_ascii().count("\n") == 5


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([(2, 3), (3, 2), (2, 4), (3, 3), (5, 2)]), st.data())
def test_generated_sets_are_homogeneous(pn, data):
    p, n = pn
    I = data.draw(st.frozensets(st.integers(0, n - 1)))
    picks = data.draw(st.lists(st.integers(0, p - 1), min_size=p**n, max_size=p**n))
    C = generate_homogeneous(p, n, I, lambda lv, v: picks[v])
    assert len(C) == p ** len(I)
    assert homogeneity(C, p, n).levels == I
    assert is_homogeneous({(c + 7) % p**n for c in C}, p, n)
