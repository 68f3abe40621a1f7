import itertools

import pytest
from hypothesis import given, strategies as st

from densepoly.linkstates import (
    DomainError, SeamLayout, apply_generator, arcs, binom, build_basis, catalan,
    dimension, enumerate_matchings, from_json, is_valid, seam_admissible, to_json,
)


def _layouts(N_max, rho_max, s_max):
    for N in range(0, N_max + 1):
        for rho in range(1, rho_max + 1):
            for s in range(1, s_max + 1):
                if (N + rho + s) % 2 == 0 and N + rho + s - 2 > 0:
                    yield SeamLayout(N, rho, s)


def _brute_matchings(n):
    """All fixed-point-free involutions of 1..n filtered by a crossing test."""
    out = []
    for perm in itertools.permutations(range(1, n + 1)):
        if all(perm[i] != i + 1 and perm[perm[i] - 1] == i + 1 for i in range(n)):
            pairs = [(i + 1, p) for i, p in enumerate(perm) if i + 1 < p]
            if not any(a < c < b < d for (a, b), (c, d) in itertools.product(pairs, pairs)):
                out.append(tuple(perm))
    return sorted(out)


@pytest.mark.parametrize("n,count", [(0, 1), (2, 1), (4, 2), (6, 5), (8, 14), (10, 42)])
def test_matching_counts(n, count):
    states = enumerate_matchings(n)
    assert len(states) == count
    assert states == sorted(states)
    assert all(is_valid(s) for s in states)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_matchings_against_permutation_filter(n):
    assert enumerate_matchings(n) == _brute_matchings(n)


@pytest.mark.parametrize("n", range(0, 17, 2))
def test_catalan_counts(n):
    assert len(enumerate_matchings(n)) == catalan(n // 2)


def test_two_nodes():
    assert enumerate_matchings(2) == [(2, 1)]


@pytest.mark.parametrize("n", [1, 3, 7, -2])
def test_odd_or_negative_node_count_rejected(n):
    with pytest.raises(DomainError):
        enumerate_matchings(n)


def test_layout_parity_and_sizes():
    lay = SeamLayout(4, 3, 3)
    assert lay.n == 8 and lay.r == 2
    assert list(lay.r_seam) == [5, 6]
    assert list(lay.s_seam) == [7, 8]
    with pytest.raises(DomainError):
        SeamLayout(4, 2, 3)
    assert SeamLayout.from_kac(4, 2, 1, "odd").rho == 3
    assert SeamLayout.from_kac(5, 2, 3, "even").rho == 4


@pytest.mark.parametrize("layout,size", [
    (SeamLayout(4, 3, 3), 6),
    (SeamLayout(2, 1, 1), 1),
    (SeamLayout(4, 1, 1), 2),
    (SeamLayout(14, 1, 1), 429),
    (SeamLayout(3, 2, 1), 2),
])
def test_dimension_examples(layout, size):
    assert dimension(layout) == size
    if layout.n <= 16:
        assert len(build_basis(layout)) == size


@pytest.mark.parametrize("layout", list(_layouts(10, 5, 5)), ids=str)
def test_dimension_matches_enumeration(layout):
    basis = build_basis(layout)
    assert len(basis) == dimension(layout)
    assert all(seam_admissible(s, layout) for s in basis)
    assert list(basis.states) == sorted(basis.states)
    assert all(basis.index[s] == i for i, s in enumerate(basis.states))


def test_seam_restriction_allows_arcs_between_seams():
    lay = SeamLayout(0, 2, 2)
    assert build_basis(lay).states == ((2, 1),)
    lay = SeamLayout(2, 3, 1)
    # r-seam nodes 3, 4 may not pair with each other
    assert (1, 2, 4, 3) not in build_basis(lay).index
    assert (4, 3, 2, 1) in build_basis(lay).index


def test_binom_conventions():
    assert binom(5, -1) == 0
    assert binom(5, 2.5) == 0
    assert binom(5, 2.0) == 10
    assert binom(3, 4) == 0


@pytest.mark.parametrize("state,j,out,loops", [
    ((2, 1, 4, 3), 1, (2, 1, 4, 3), 1),
    ((2, 1, 4, 3), 2, (4, 3, 2, 1), 0),
    ((4, 3, 2, 1), 1, (2, 1, 4, 3), 0),
])
def test_generator_examples(state, j, out, loops):
    assert apply_generator(state, j) == (out, loops)


def test_generator_range():
    with pytest.raises(DomainError):
        apply_generator((2, 1), 2)
    with pytest.raises(DomainError):
        apply_generator((2, 1), 0)


states_8 = st.sampled_from(enumerate_matchings(8))


@given(states_8, st.integers(1, 7))
def test_generator_output_valid(state, j):
    out, loops = apply_generator(state, j)
    assert is_valid(out) and loops in (0, 1)
    assert out[j - 1] == j + 1


@given(states_8, st.integers(1, 7))
def test_generator_idempotent_up_to_loop(state, j):
    once, l1 = apply_generator(state, j)
    twice, l2 = apply_generator(once, j)
    assert twice == once and l2 == 1


@pytest.mark.parametrize("n", [4, 6, 8, 10])
def test_tl_braid_relation(n):
    for state in enumerate_matchings(n):
        for j in range(1, n - 1):
            for k in (j - 1, j + 1):
                if not 1 <= k < n:
                    continue
                a, l1 = apply_generator(state, j)
                b, l2 = apply_generator(a, k)
                c, l3 = apply_generator(b, j)
                ref, l0 = apply_generator(state, j)
                assert c == ref
                assert l1 + l2 + l3 == l0


@pytest.mark.parametrize("n", [4, 6, 8])
def test_far_generators_commute(n):
    for state in enumerate_matchings(n):
        for j in range(1, n):
            for k in range(j + 2, n):
                a, la = apply_generator(apply_generator(state, j)[0], k)
                b, lb = apply_generator(apply_generator(state, k)[0], j)
                assert a == b


@given(states_8)
def test_json_round_trip(state):
    assert from_json(to_json(state)) == state
    assert to_json(state).startswith("[")


def test_from_json_rejects_crossing():
    with pytest.raises(DomainError):
        from_json("[3, 4, 1, 2]")


def test_arcs():
    assert list(arcs((4, 3, 2, 1))) == [(1, 4), (2, 3)]


def test_is_valid_rejects():
    assert not is_valid((1, 2))
    assert not is_valid((2, 1, 3))
    assert not is_valid((3, 4, 1, 2))
