"""Isometry testing and embedding search by constrained backtracking.

Vectors are matched basis row by basis row against short-vector tables of
the target lattice; at each level a numpy filter keeps only vectors with the
required norm and pairings against the rows already placed.
"""

import numpy as np

from .enum_vectors import get_slices
from .gram import GramMatrix, is_primitive_span


def _candidates_by_norm(lattice, norms, cache_dir=None, use_cache=True):
    """norm -> (vectors, pairings) over both signs, deterministic row order."""
    top = max(norms)
    slices = get_slices(lattice, top, cache_dir, use_cache)
    table = {}
    for t in set(norms):
        m = slices.matrix(t)
        p = slices.pairings(t)
        if len(m):
            vecs = np.vstack([m, -m])
            pair = np.vstack([p, -p])
        else:
            vecs, pair = m, p
        table[t] = (vecs, pair)
    return table


def _match_rows(target, lattice, table, require_primitive, require_unimodular):
    """Backtracking search for U with U * Gram(lattice) * U^T = target."""
    m = target.n
    diag = [target.rows[i][i] for i in range(m)]
    rows = []

    def place(i):
        vecs, pair = table[diag[i]]
        if len(vecs) == 0:
            return None
        mask = np.ones(len(vecs), dtype=bool)
        for j in range(i):
            mask &= pair @ rows[j] == target.rows[i][j]
        for idx in np.flatnonzero(mask):
            rows.append(vecs[idx])
            if i + 1 == m:
                U = [tuple(int(x) for x in r) for r in rows]
                ok = True
                if require_primitive and not is_primitive_span(U):
                    ok = False
                if ok and require_unimodular:
                    d = int(round(abs(np.linalg.det(np.array(U, dtype=float)))))
                    ok = d == 1
                if ok:
                    return U
            else:
                got = place(i + 1)
                if got is not None:
                    return got
            rows.pop()
        return None

    return place(0)


def find_embedding(target, lattice, require_primitive=False, cache_dir=None, use_cache=True):
    """Rows U with U G U^T = target Gram, or None.  Rank of target <= rank of lattice."""
    if target.n > lattice.n:
        return None
    diag = [target.rows[i][i] for i in range(target.n)]
    table = _candidates_by_norm(lattice, diag, cache_dir, use_cache)
    return _match_rows(target, lattice, table, require_primitive, False)


def find_isometry(A, B, cache_dir=None, use_cache=True):
    """Rows U with U Gram(B) U^T = Gram(A), det +-1, or None."""
    if A.n != B.n or A.det != B.det:
        return None
    diag = [A.rows[i][i] for i in range(A.n)]
    table = _candidates_by_norm(B, diag, cache_dir, use_cache)
    # equal determinants make any exact Gram match unimodular automatically
    return _match_rows(A, B, table, False, False)


def norm_fingerprint(L, top=None, cache_dir=None, use_cache=True):
    """Counts of vectors of each norm up to a bound; isometry invariant."""
    if top is None:
        top = max(L.rows[i][i] for i in range(L.n))
    slices = get_slices(L, top, cache_dir, use_cache)
    return tuple(slices.count(t) for t in range(1, top + 1))


def is_isometric(A, B, cache_dir=None, use_cache=True):
    if A.n != B.n or A.det != B.det:
        return False
    top = max(max(A.rows[i][i] for i in range(A.n)), max(B.rows[i][i] for i in range(B.n)))
    if norm_fingerprint(A, top, cache_dir, use_cache) != norm_fingerprint(B, top, cache_dir, use_cache):
        return False
    return find_isometry(A, B, cache_dir, use_cache) is not None
