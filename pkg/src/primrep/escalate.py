"""Candidate generation by truant escalation.

Starting from the root binary section, each lattice that fails to be
primitively 2-universal is extended by one basis vector.  The new diagonal
entry runs from the current last diagonal up to the largest diagonal of the
truant, cross terms satisfy the reduced-basis bound |2 B(e_i, e)| <= Q(e_i),
and extensions must stay positive definite.  Exceptions only shrink along a
chain of sections, so each node rechecks just its parent's exception list.
"""

import json
import os
import tempfile
from itertools import product

from .enum_vectors import (
    clear_memory_cache,
    default_cache_dir,
    drop_cached,
    exceptions_up_to,
    get_slices,
    primitively_represents_binary,
)
from .gram import GramMatrix, ReducedBinaryForm, eye, reduced_forms_up_to
from .isometry import is_isometric, norm_fingerprint
from .tables import candidate_grid

ROOT_RANK = 2
TARGET_RANK = 6
PRUNE_CMAX = 64
_LEVEL_CACHE_VERSION = 1


class CandidateRecord:
    """A generated candidate with its grid identity (label is None if no match)."""

    __slots__ = ("gram", "label", "family", "variant", "k")

    def __init__(self, gram, label=None, family=None, variant=None, k=None):
        self.gram = gram
        self.label = label
        self.family = family
        self.variant = variant
        self.k = k

    def __repr__(self):
        return "CandidateRecord(%s)" % (self.label or self.gram.rows,)


def truant(L, search_cmax=PRUNE_CMAX, cache_dir=None, use_cache=True):
    """Least primitive binary exception with c <= search_cmax, or None."""
    slices = get_slices(L, search_cmax, cache_dir, use_cache)
    for f in reduced_forms_up_to(search_cmax):
        if primitively_represents_binary(L, f, slices) is None:
            return f
    return None


def escalations(L, tmax):
    """One-step extensions of the Gram matrix, sign-normalized on cross terms."""
    k = L.n
    lo = L.rows[k - 1][k - 1]
    ranges = [range(-(L.rows[i][i] // 2), L.rows[i][i] // 2 + 1) for i in range(k)]
    out = []
    for t in range(lo, tmax + 1):
        for b in product(*ranges):
            first = next((x for x in b if x != 0), 0)
            if first < 0:
                continue
            rows = [list(L.rows[i]) + [b[i]] for i in range(k)]
            rows.append(list(b) + [t])
            G = GramMatrix(rows)
            # leading minors are L's, so positive determinant means definite
            if G.det > 0:
                out.append(G)
    return out


def surviving_exceptions(child, parent_exceptions, stop_early=False,
                         cache_dir=None, use_cache=True):
    """Forms from the parent's exception list still missed by the child.

    The list must be ascending in the (c, a, b) order; slice tables grow on
    demand so early failures stay cheap.
    """
    out = []
    slices = None
    for f in parent_exceptions:
        if slices is None or slices.bound < f.c:
            grow = max(f.c, 2 * slices.bound if slices is not None else f.c)
            slices = get_slices(child, grow, cache_dir, use_cache)
        if primitively_represents_binary(child, f, slices) is None:
            out.append(f)
            if stop_early:
                return out
    return out


def _level_cache_path(cache_dir, rank, prune_cmax):
    name = "escalation_r%d_c%d_v%d.json" % (rank, prune_cmax, _LEVEL_CACHE_VERSION)
    return os.path.join(cache_dir, name)


def _save_level(path, nodes):
    payload = [[G.rows, [f.coeffs() for f in exc]] for G, exc in nodes]
    try:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)
    except OSError:
        pass


def _load_level(path, rank):
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, ValueError):
        return None
    try:
        nodes = []
        for rows, exc in payload:
            G = GramMatrix(rows)
            if G.n != rank or G.det <= 0:
                return None
            nodes.append((G, [ReducedBinaryForm(a, b, c) for a, b, c in exc]))
        return nodes
    except (TypeError, ValueError):
        return None


def _dedup_isometry_classes(grams):
    """Group by cheap invariants, then isometry; keeps first representative."""
    if not grams:
        return []
    # one shared fingerprint depth keeps the bucket key isometry-invariant
    top = max(max(G.rows[i][i] for i in range(G.n)) for G in grams)
    buckets = {}
    kept = []
    for G in grams:
        key = (G.det, norm_fingerprint(G, top, use_cache=False))
        bucket = buckets.setdefault(key, [])
        if not any(is_isometric(G, H, use_cache=False) for H in bucket):
            bucket.append(G)
            kept.append(G)
    return kept


def generate_candidates(prune_cmax=PRUNE_CMAX, cache_dir=None, use_cache=True,
                        progress=None):
    """Run the full escalation and return a report dict.

    Keys: "candidates" (CandidateRecord list in grid order, unmatched last),
    "missing" (grid labels never generated), "extra" (unmatched Gram matrices),
    "levels" (rank -> class count), "total".
    """

    def note(msg):
        if progress:
            progress(msg)

    level_dir = None
    if use_cache:
        level_dir = cache_dir if cache_dir is not None else default_cache_dir()

    def load_level(rank):
        if level_dir is None:
            return None
        return _load_level(_level_cache_path(level_dir, rank, prune_cmax), rank)

    def save_level(rank, nodes):
        if level_dir is not None:
            _save_level(_level_cache_path(level_dir, rank, prune_cmax), nodes)

    nodes = load_level(ROOT_RANK)
    if nodes is None:
        root = eye(ROOT_RANK)
        note("scanning root exceptions to %d" % prune_cmax)
        nodes = [(root, exceptions_up_to(root, prune_cmax,
                                         cache_dir=cache_dir, use_cache=use_cache))]
        save_level(ROOT_RANK, nodes)
    levels = {ROOT_RANK: 1}
    for rank in range(ROOT_RANK, TARGET_RANK):
        final = rank + 1 == TARGET_RANK
        cached = load_level(rank + 1)
        if cached is not None:
            note("rank %d: %d classes from cache" % (rank + 1, len(cached)))
            nodes = cached
            levels[rank + 1] = len(nodes)
            continue
        children = []
        for L, exc in nodes:
            if not exc:
                raise RuntimeError(
                    "rank %d node with no exceptions up to %d" % (L.n, prune_cmax))
            tmax = exc[0].c
            children.extend((G, exc) for G in escalations(L, tmax))
        seen = set()
        unique = []
        for G, exc in children:
            if G.rows in seen:
                continue
            seen.add(G.rows)
            unique.append((G, exc))
        classes = _dedup_isometry_classes([G for G, _ in unique])
        keep_exc = {}
        for G, exc in unique:
            keep_exc.setdefault(G.rows, exc)
        note("rank %d: %d extensions, %d classes" % (rank + 1, len(unique), len(classes)))
        next_nodes = []
        for G in classes:
            exc = surviving_exceptions(G, keep_exc[G.rows], stop_early=final,
                                       cache_dir=cache_dir,
                                       use_cache=use_cache and final)
            if final:
                if not exc:
                    next_nodes.append((G, exc))
                else:
                    drop_cached(G)
            else:
                next_nodes.append((G, exc))
        nodes = next_nodes
        levels[rank + 1] = len(nodes)
        save_level(rank + 1, nodes)
    note("rank %d survivors: %d" % (TARGET_RANK, len(nodes)))

    grid = candidate_grid()
    records = []
    missing = []
    unmatched = [G for G, _ in nodes]
    for entry in grid:
        hit = None
        for G in unmatched:
            if G.det == entry.gram.det and is_isometric(G, entry.gram,
                                                        cache_dir=cache_dir,
                                                        use_cache=use_cache):
                hit = G
                break
        if hit is None:
            missing.append(entry.label)
        else:
            unmatched.remove(hit)
            records.append(CandidateRecord(entry.gram, entry.label, entry.family,
                                           entry.variant, entry.k))
    for G in unmatched:
        records.append(CandidateRecord(G))
    clear_memory_cache()
    return {
        "candidates": records,
        "missing": missing,
        "extra": unmatched,
        "levels": levels,
        "total": len(nodes),
    }
