import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primrep.gram import (GramMatrix, ReducedBinaryForm, SpanWitness,
                          diag_lattice, eye, is_primitive_span,
                          is_primitive_vector, minkowski_reduce, minor_gcd,
                          osum, reduced_forms_up_to, short_vectors_raw)

A_PLANE = GramMatrix([[2, 1], [1, 2]])


def brute_reduced(cmax):
    out = []
    for c in range(1, cmax + 1):
        for a in range(1, c + 1):
            for b in range(0, a // 2 + 1):
                if a * c - b * b > 0:
                    out.append((a, b, c))
    return out


def test_reduced_forms_match_brute_force():
    got = [f.coeffs() for f in reduced_forms_up_to(12)]
    assert sorted(got) == sorted(brute_reduced(12))
    assert len(got) == len(set(got))


def test_reduced_forms_are_ordered_by_truant_key():
    keys = [f.key() for f in reduced_forms_up_to(10)]
    assert keys == sorted(keys)
    assert keys[0] == (1, 1, 0)


def test_reduced_form_rejects_bad_coefficients():
    with pytest.raises(ValueError):
        ReducedBinaryForm(2, 2, 2)  # 2b > a
    with pytest.raises(ValueError):
        ReducedBinaryForm(2, 1, 0)


def test_gauss_reduction_reaches_reduced_domain():
    f = ReducedBinaryForm.from_coeffs(5, -7, 11)
    assert 0 <= 2 * f.b <= f.a <= f.c
    assert f.det == 5 * 11 - 49


def test_gram_basics():
    G = osum(eye(2), diag_lattice(3))
    assert G.n == 3
    assert G.det == 3
    assert G.quadratic((1, 1, 1)) == 5
    assert G.bilinear((1, 0, 0), (0, 0, 1)) == 0
    assert G.is_positive_definite()
    assert not GramMatrix([[0, 1], [1, 0]]).is_positive_definite()


def test_transform_matches_explicit_congruence():
    U = [[1, 1], [0, 1]]
    G = A_PLANE.transform(U)
    # rows of U are coordinates of the new basis
    want = [[A_PLANE.bilinear(U[i], U[j]) for j in range(2)] for i in range(2)]
    assert G.rows == GramMatrix(want).rows


def test_minor_gcd_and_primitivity():
    assert minor_gcd([[2, 0, 0], [0, 2, 0]]) == 4
    assert minor_gcd([[1, 0, 0], [0, 2, 0]]) == 2
    assert is_primitive_span([[1, 0, 0], [0, 1, 0]])
    assert not is_primitive_span([[1, 1, 0], [1, -1, 0]])
    assert is_primitive_vector((2, 3, 5))
    assert not is_primitive_vector((2, 4, 6))


@given(st.lists(st.integers(-4, 4), min_size=3, max_size=3),
       st.lists(st.integers(-4, 4), min_size=3, max_size=3))
def test_unimodular_row_ops_preserve_span_primitivity(v, w):
    rows = [v, w]
    if minor_gcd(rows) == 0:  # dependent rows carry no span
        return
    assert is_primitive_span(rows) == is_primitive_span([v, [w[i] + 3 * v[i] for i in range(3)]])


def brute_vectors(G, bound):
    n = G.n
    box = int(bound ** 0.5) + 1
    hits = []
    for x in itertools.product(range(-2 * box, 2 * box + 1), repeat=n):
        q = G.quadratic(x)
        if 0 < q <= bound:
            hits.append((q, x))
    return hits


@pytest.mark.parametrize("G", [eye(2), eye(3), A_PLANE, diag_lattice(1, 2, 3)])
def test_short_vectors_against_box_enumeration(G):
    bound = 9
    raw = short_vectors_raw(G, bound)
    # one representative per +- pair, so doubling recovers the box count
    assert 2 * len(raw) == len(brute_vectors(G, bound))
    for x, norm in raw:
        assert G.quadratic(x) == norm <= bound
        lead = next(v for v in x if v != 0)
        assert lead > 0


def test_minkowski_reduce_binary_reaches_reduced_domain():
    G = GramMatrix([[10, 7], [7, 5]])
    R, U = minkowski_reduce(G)
    assert R.det == G.det
    a, b, c = R.rows[0][0], R.rows[0][1], R.rows[1][1]
    assert 0 <= 2 * b <= a <= c
    assert G.transform(U).rows == R.rows


@given(st.integers(1, 6), st.integers(-3, 3), st.integers(1, 6))
@settings(max_examples=60)
def test_minkowski_reduce_preserves_determinant(a, b, c):
    if a * c - b * b <= 0:
        return
    G = GramMatrix([[a, b], [b, c]])
    R, U = minkowski_reduce(G)
    assert R.det == G.det
    assert R.is_positive_definite()


def test_span_witness_validation():
    L = eye(4)
    w = SpanWitness(L, [[1, 0, 0, 0], [0, 1, 1, 0]])
    assert w.induced_gram().rows == ((1, 0), (0, 2))
    assert w.is_primitive()
    assert w.validate(GramMatrix([[1, 0], [0, 2]]))
    assert not w.validate(GramMatrix([[1, 0], [0, 3]]))
    doubled = SpanWitness(L, [[2, 0, 0, 0], [0, 2, 2, 0]])
    assert not doubled.is_primitive()
    assert not doubled.validate(GramMatrix([[4, 0], [0, 8]]))
