from hypothesis import given, settings
from hypothesis import strategies as st

from primrep.gram import GramMatrix, diag_lattice, eye, is_primitive_span, osum
from primrep.isometry import (find_embedding, find_isometry, is_isometric,
                              norm_fingerprint)

A_PLANE = GramMatrix([[2, 1], [1, 2]])


def test_identity_and_permutation_are_isometric():
    L = diag_lattice(1, 2, 3)
    M = diag_lattice(3, 1, 2)
    U = find_isometry(L, M, use_cache=False)
    assert U is not None
    assert M.transform(U).rows == L.rows
    assert is_isometric(L, M, use_cache=False)


@given(st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2))
@settings(max_examples=30)
def test_unimodular_change_of_basis_is_isometric(x, y, z):
    L = osum(eye(1), A_PLANE)
    U = [[1, x, y], [0, 1, z], [0, 0, 1]]
    M = L.transform(U)
    assert is_isometric(L, M, use_cache=False)


def test_genus_mates_are_not_isometric():
    left = osum(diag_lattice(1), GramMatrix([[2, 0, 1], [0, 2, 1], [1, 1, 5]]))
    right = osum(eye(3), diag_lattice(16))
    assert left.det == right.det == 16
    assert not is_isometric(left, right, use_cache=False)


def test_fingerprint_counts_vectors_per_norm():
    fp = norm_fingerprint(eye(2), 2, use_cache=False)
    # norm 1: e1, e2; norm 2: (1, +-1); one representative per sign pair
    assert fp == (2, 2)


def test_embedding_respects_primitivity_flag():
    target = diag_lattice(4, 4)
    free = find_embedding(target, eye(5), use_cache=False)
    assert free is not None
    prim = find_embedding(target, eye(5), require_primitive=True,
                          use_cache=False)
    # (4, 0, 4) has imprimitive realizations only in the five cube
    assert prim is None


def test_embedding_finds_primitive_plane():
    rows = find_embedding(A_PLANE, osum(eye(1), A_PLANE),
                          require_primitive=True, use_cache=False)
    assert rows is not None
    assert is_primitive_span([list(r) for r in rows])
