import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from densepoly.linkstates import DomainError, SeamLayout, dimension
from densepoly.qseries import (
    DoubleColumn, InexactDivision, QExpPoly, central_shift, character_series, configuration_sum,
    decomposition_holds, enumerate_double_columns, euler_inverse, finitized_body, finitized_characters,
    irreducible_character, kac_weight, phi_bijection, q, q_binomial, q_catalan, q_narayana,
    q_pochhammer, selection_prefactor, selection_sum,
)
from oracles import (
    catalan_by_enumeration, gaussian_by_subsets, narayana_by_enumeration, partitions_min_part,
)


def as_poly(d):
    return sum((QExpPoly.monomial(e, c) for e, c in d.items()), QExpPoly.zero())


def poly(*coeffs, shift=0):
    return QExpPoly.from_coeffs(coeffs, shift)


polys = st.dictionaries(st.integers(-48, 96), st.integers(-5, 5), max_size=6).map(QExpPoly)


# --- arithmetic -------------------------------------------------------------


def test_arithmetic_examples():
    half = q(Fraction(1, 2))
    assert (1 + half) ** 2 == 1 + half.scale(2) + q(1)
    assert q(Fraction(1, 8)).shift(Fraction(-1, 8)) == QExpPoly.one()
    assert (1 + q(2)).eval_at_1() == 2
    assert (1 + q(2)).eval_float(0.5) == pytest.approx(1.25)


def test_exponent_must_be_a_multiple_of_a_24th():
    with pytest.raises(DomainError):
        q(Fraction(1, 5))
    with pytest.raises(DomainError):
        QExpPoly.one().shift(Fraction(1, 48))


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == QExpPoly.zero()
    assert not (a - a)


@given(polys, polys)
def test_exact_division_round_trip(a, b):
    if not b:
        return
    assert (a * b).divide_exact(b) == a


def test_inexact_division_raises():
    with pytest.raises(InexactDivision):
        (1 + q(1)).divide_exact(1 + q(2))
    with pytest.raises(ZeroDivisionError):
        q(1).divide_exact(QExpPoly.zero())


@given(polys)
def test_json_round_trip(p):
    assert QExpPoly.from_json(p.to_json()) == p
    pairs = json.loads(p.to_json())
    assert pairs == sorted(pairs)


@pytest.mark.parametrize("p,text", [
    (poly(0, 1, 1, 0, 1, 1), "q+q^2+q^4+q^5"),
    (q(Fraction(1, 12)), "q^{1/12}"),
    (q(Fraction(-1, 24)), "q^{-1/24}"),
    (1 - q(2).scale(3), "1-3q^2"),
    (QExpPoly.zero(), "0"),
])
def test_pretty_printer(p, text):
    assert str(p) == text


# --- Gaussian polynomials -----------------------------------------------------


def test_q_binomial_examples():
    assert q_binomial(4, 2) == poly(1, 1, 2, 1, 1)
    assert q_binomial(7, 0) == QExpPoly.one()
    assert q_binomial(5, -1) == QExpPoly.zero()
    assert q_binomial(5, Fraction(3, 2)) == QExpPoly.zero()


@pytest.mark.parametrize("a", range(0, 11))
def test_q_binomial_against_subsets(a):
    for b in range(-1, a + 2):
        assert q_binomial(a, b) == as_poly(gaussian_by_subsets(a, b))


@pytest.mark.parametrize("a", range(1, 21))
def test_q_binomial_recurrences(a):
    for b in range(0, a + 1):
        both = q_binomial(a, b)
        assert both == q_binomial(a - 1, b - 1) + q_binomial(a - 1, b).shift(b)
        assert both == q_binomial(a - 1, b) + q_binomial(a - 1, b - 1).shift(a - b)
        assert both == q_binomial(a, a - b)
        assert both.eval_at_1() == __import__("math").comb(a, b)


def test_q_binomial_via_pochhammer():
    for a in range(0, 9):
        for b in range(0, a + 1):
            num = q_pochhammer(a)
            assert num.divide_exact(q_pochhammer(b) * q_pochhammer(a - b)) == q_binomial(a, b)


# --- Narayana and Catalan ---------------------------------------------------


@pytest.mark.parametrize("M,m,n,expected", [
    (2, 1, 1, poly(0, 0, 1, 1, 1)),
    (3, 0, 0, QExpPoly.one()),
    (2, 0, 1, poly(0, 1, 1)),
])
def test_q_narayana_examples(M, m, n, expected):
    assert q_narayana(M, m, n) == expected


@pytest.mark.parametrize("M", range(0, 9))
def test_q_narayana_against_enumeration(M):
    for m in range(0, M + 1):
        for n in range(m, M + 1):
            p = q_narayana(M, m, n)
            assert p == as_poly(narayana_by_enumeration(M, m, n))
            assert p.nonnegative()
            assert p == configuration_sum(enumerate_double_columns(M, m, n))


def test_q_narayana_outside_range():
    assert q_narayana(3, 2, 1) == QExpPoly.zero()
    assert q_narayana(3, 0, 4) == QExpPoly.zero()


def test_q_catalan_examples():
    assert q_catalan(2, 2) == poly(0, 1, 1, 0, 1, 1)
    assert q_catalan(2, 2, "prime") == poly(1, 1, 1, 1, shift=Fraction(1, 2))
    assert q_catalan(4, 0) == QExpPoly.zero()
    assert q_catalan(3, -2) == -q_catalan(3, 2)
    assert q_catalan(3, -2, "prime") == -q_catalan(3, 2, "prime")
    assert q_catalan(0, 1) == QExpPoly.one()
    assert q_catalan(1, 1) == poly(1, 0, 1)
    with pytest.raises(DomainError):
        q_catalan(2, 1, "other")


@pytest.mark.parametrize("M", range(0, 9))
def test_q_catalan_against_enumeration(M):
    for r in range(1, M + 2):
        for kind, half in (("plain", False), ("prime", True)):
            p = q_catalan(M, r, kind)
            assert p == as_poly(catalan_by_enumeration(M, r, half))
            assert p.nonnegative()


def test_catalan_at_one_counts_paths():
    # C_{M,1}(1) is the Catalan number C_{M+1}
    from densepoly.linkstates import catalan
    for M in range(0, 8):
        assert q_catalan(M, 1).eval_at_1() == catalan(M + 1)


# --- double columns and the bijection ----------------------------------------


def test_double_column_counts():
    assert len(enumerate_double_columns(2, 0, 1)) == 2
    assert len(enumerate_double_columns(2, 1, 1, admissible_only=False)) == 4
    assert len(enumerate_double_columns(2, 1, 1)) == 3
    confs = enumerate_double_columns(2, 0, 1) + enumerate_double_columns(2, 1, 2)
    assert sorted(S.energy() for S in confs) == [1, 2, 4, 5]


def test_double_column_validation():
    with pytest.raises(DomainError):
        DoubleColumn(2, (1, 2), ())
    with pytest.raises(DomainError):
        DoubleColumn(2, (3,), ())
    with pytest.raises(DomainError):
        enumerate_double_columns(2, 3, 0)


def test_half_shift_energy():
    S = DoubleColumn(3, (2,), (3, 1))
    assert S.energy() == 6
    assert S.energy(half_shift=True) == Fraction(9, 2)


def test_phi_example():
    S = DoubleColumn(2, (2,), (1,))
    T = phi_bijection(S)
    assert (T.L, T.R) == ((), (2, 1))
    assert T.energy() == S.energy() == 3
    assert phi_bijection(T, "inverse") == S


def test_phi_rejects_admissible():
    with pytest.raises(DomainError):
        phi_bijection(DoubleColumn(2, (1,), (2,)))
    with pytest.raises(DomainError):
        phi_bijection(DoubleColumn(2, (1,), (2,)), "sideways")


@pytest.mark.parametrize("M", range(1, 9))
def test_phi_is_a_weight_preserving_bijection(M):
    for m in range(1, M + 1):
        for n in range(m, M):
            bad = [S for S in enumerate_double_columns(M, m, n, admissible_only=False) if not S.admissible()]
            target = enumerate_double_columns(M, m - 1, n + 1, admissible_only=False)
            images = [phi_bijection(S) for S in bad]
            assert sorted(images, key=lambda S: (S.L, S.R)) == sorted(target, key=lambda S: (S.L, S.R))
            for S, T in zip(bad, images):
                assert T.energy() == S.energy()
                assert phi_bijection(T, "inverse") == S


# --- characters -------------------------------------------------------------


def test_kac_weights():
    assert kac_weight(3, 1) == 3
    assert kac_weight(1, 2) == Fraction(-1, 8)
    assert kac_weight(2, 4) == kac_weight(1, 2)
    assert central_shift() == Fraction(1, 12)


def test_finitized_examples():
    assert finitized_body(4, 1, 1, "odd") == poly(1, 0, 1)
    assert finitized_body(4, 2, 3, "odd").eval_at_1() == 6
    assert finitized_characters(4, 1, 1, "odd") == poly(1, 0, 1, shift=Fraction(1, 12))
    with pytest.raises(DomainError):
        finitized_characters(4, 1, 2, "odd")


@pytest.mark.parametrize("N", range(1, 16, 2))
@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_irreducible_finitized_character(N, r):
    # rho = 2r, s = 1 sectors carry the irreducible characters
    assert finitized_characters(N, r, 1, "even") == q_catalan((N - 1) // 2, r).shift(central_shift())
    if r == 1:
        # rho = 1 gives the same character one site wider
        assert finitized_characters(N + 1, 1, 1, "odd") == q_catalan((N - 1) // 2, 1).shift(central_shift())


def test_selection_examples():
    assert selection_sum(2, 1, 1) == QExpPoly.one()
    assert selection_sum(4, 1, 1) == poly(1, 0, 1)
    with pytest.raises(DomainError):
        selection_sum(4, 1, 2)


@pytest.mark.parametrize("N", range(1, 13))
@pytest.mark.parametrize("rho", range(1, 6))
@pytest.mark.parametrize("s", range(1, 5))
def test_selection_counts_states(N, rho, s):
    if (N + rho + s) % 2:
        return
    G = selection_sum(N, rho, s)
    assert G.eval_at_1() == dimension(SeamLayout(N, rho, s))
    r = (rho + 1) // 2
    par = "even" if rho % 2 == 0 else "odd"
    assert G.shift(selection_prefactor(s)) == finitized_characters(N, r, s, par)


def test_selection_prefactor():
    assert selection_prefactor(1) == Fraction(1, 12)
    assert selection_prefactor(2) == Fraction(1, 12) - Fraction(1, 8)


def test_euler_inverse_gives_partitions():
    assert [euler_inverse(10).coefficient(k) for k in range(11)] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]
    with pytest.raises(DomainError):
        euler_inverse(65)


def test_vacuum_character_body():
    chi = character_series(1, 1, 12).shift(-central_shift())
    assert [chi.coefficient(k) for k in range(13)] == partitions_min_part(12, 2)
    assert chi.truncate(6) == poly(1, 0, 1, 1, 2, 2, 4)


def test_character_prefactors():
    assert character_series(1, 2, 5).lowest_exponent() == Fraction(-1, 24)
    assert character_series(2, 1, 5).lowest_exponent() == Fraction(1, 12) + 1


@pytest.mark.parametrize("r,s", [(1, 1), (1, 2), (2, 1), (2, 3)])
def test_finitized_characters_converge(r, s):
    chi = character_series(r, s, 6)
    lead = chi.lowest_exponent()
    for N in (16, 18):
        par = "odd" if (N + 2 * r - 1 + s) % 2 == 0 else "even"
        fin = finitized_characters(N, r, s, par)
        assert fin.truncate(lead + 6) == chi.truncate(lead + 6)


def test_irreducible_character_symmetry():
    assert irreducible_character(0, 1, 5) == QExpPoly.zero()
    assert irreducible_character(-2, 2, 5) == -irreducible_character(2, 2, 5)
    with pytest.raises(DomainError):
        irreducible_character(1, 3, 5)


@pytest.mark.parametrize("r", range(1, 5))
@pytest.mark.parametrize("s", range(1, 5))
def test_decomposition(r, s):
    assert decomposition_holds(r, s, 20)
