"""Escalation mechanics: truants, one-step extensions, survivor filtering.

The full generation run is covered by the acceptance suite; here only the
building blocks are exercised on small lattices.
"""

from primrep.enum_vectors import exceptions_up_to
from primrep.escalate import (
    PRUNE_CMAX,
    escalations,
    generate_candidates,
    surviving_exceptions,
    truant,
)
from primrep.gram import GramMatrix, ReducedBinaryForm, eye


def test_truant_of_the_cube_lattices():
    # I5 first misses the doubled square form
    t = truant(eye(5), search_cmax=8, use_cache=False)
    assert t is not None
    assert t.coeffs() == (4, 0, 4)
    # I2 misses (1, 0, 2) already
    t2 = truant(eye(2), search_cmax=4, use_cache=False)
    assert t2 is not None
    assert t2.c <= 2


def test_escalations_shape_and_sign_normalization():
    exts = escalations(eye(2), 2)
    for G in exts:
        assert G.n == 3
        assert G.det > 0
        # leading 2x2 block unchanged
        assert tuple(row[:2] for row in G.rows[:2]) == ((1, 0), (0, 1))
        # first nonzero cross term normalized nonnegative
        col = [G.rows[i][2] for i in range(2)]
        nz = [x for x in col if x]
        if nz:
            assert nz[0] > 0
    # diagonal runs from the previous diagonal entry up to the bound
    diags = {G.rows[2][2] for G in exts}
    assert diags == {1, 2}
    # cross terms bounded by half the diagonal above them
    for G in exts:
        for i in range(2):
            assert 2 * abs(G.rows[i][2]) <= G.rows[i][i]


def test_surviving_exceptions_shrink_along_extensions():
    L = eye(3)
    exc = exceptions_up_to(L, 8, use_cache=False)
    child = GramMatrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    surv = surviving_exceptions(child, exc, use_cache=False)
    kid = {f.key() for f in surv}
    full = {f.key() for f in exceptions_up_to(child, 8, use_cache=False)}
    # the survivor filter computes exactly the child's misses among the
    # parent's exceptions; nothing new ever appears
    assert kid == {f.key() for f in exc} & full
    assert kid <= {f.key() for f in exc}
    # stop_early returns a prefix
    head = surviving_exceptions(child, exc, stop_early=True, use_cache=False)
    assert len(head) <= 1
    if surv:
        assert head and head[0].key() == surv[0].key()


def test_exception_lists_are_ordered():
    exc = exceptions_up_to(eye(5), 10, use_cache=False)
    keys = [f.key() for f in exc]
    assert keys == sorted(keys)
    assert all(isinstance(f, ReducedBinaryForm) for f in exc)


def test_prune_bound_is_published_default():
    assert PRUNE_CMAX == 64
    assert generate_candidates.__defaults__[0] == PRUNE_CMAX
