"""Short-vector tables and primitive representation of binary forms.

A NormSlices object holds every sign-normalized vector of norm up to a bound
for one positive definite lattice, grouped by norm and lexicographically
ordered inside each group.  Witness searches scan that fixed order, so the
returned witness is deterministic: first admissible v, then first admissible
w, with w negated when the pairing comes out as -b.
"""

import hashlib
import os
import tempfile
from collections import OrderedDict

import numpy as np

from .gram import (
    GramMatrix,
    ReducedBinaryForm,
    SpanWitness,
    is_primitive_span,
    reduced_forms_up_to,
    short_vectors_raw,
)

ENV_CACHE_DIR = "PRIMREP_CACHE_DIR"

# LRU over slice tables, bounded by total stored vector elements: sweeps
# over hundreds of lattices must not accumulate every table in memory
_MEM_CACHE = OrderedDict()
_MEM_BUDGET = 30_000_000


def _cache_get(key):
    got = _MEM_CACHE.get(key)
    if got is not None:
        _MEM_CACHE.move_to_end(key)
    return got


def _cache_put(key, slices):
    _MEM_CACHE[key] = slices
    _MEM_CACHE.move_to_end(key)
    total = sum(s.vecs.size for s in _MEM_CACHE.values())
    while total > _MEM_BUDGET and len(_MEM_CACHE) > 1:
        _, old = _MEM_CACHE.popitem(last=False)
        total -= old.vecs.size


def default_cache_dir():
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return env
    return os.path.join(os.path.expanduser("~"), ".cache", "primrep")


class NormSlices:
    """Vectors of each norm 1..bound for one lattice, with cached pairings."""

    def __init__(self, lattice, bound, vecs, norms):
        self.lattice = lattice
        self.bound = int(bound)
        self.vecs = vecs
        self.norms = norms
        self._index = {}
        start = 0
        total = len(norms)
        while start < total:
            t = int(norms[start])
            end = start
            while end < total and norms[end] == t:
                end += 1
            self._index[t] = (start, end)
            start = end
        self._pairings = {}
        self._prim = {}
        self._gram_np = np.array(lattice.rows, dtype=np.int64)

    @classmethod
    def build(cls, lattice, bound):
        found = short_vectors_raw(lattice, bound)
        n = lattice.n
        if found:
            vecs = np.array([v for v, _ in found], dtype=np.int64)
            norms = np.array([t for _, t in found], dtype=np.int64)
        else:
            vecs = np.zeros((0, n), dtype=np.int64)
            norms = np.zeros((0,), dtype=np.int64)
        return cls(lattice, bound, vecs, norms)

    def matrix(self, norm):
        """(k, n) array of the vectors of this exact norm, lex ascending."""
        if norm > self.bound:
            raise ValueError("norm %d beyond table bound %d" % (norm, self.bound))
        se = self._index.get(int(norm))
        if se is None:
            return self.vecs[0:0]
        return self.vecs[se[0]:se[1]]

    def pairings(self, norm):
        """Rows M v for each vector v of the given norm."""
        key = int(norm)
        got = self._pairings.get(key)
        if got is None:
            got = self.matrix(norm) @ self._gram_np
            self._pairings[key] = got
        return got

    def primitive_mask(self, norm):
        key = int(norm)
        got = self._prim.get(key)
        if got is None:
            m = self.matrix(norm)
            if len(m):
                got = np.gcd.reduce(np.abs(m), axis=1) == 1
            else:
                got = np.zeros((0,), dtype=bool)
            self._prim[key] = got
        return got

    def count(self, norm):
        se = self._index.get(int(norm))
        return 0 if se is None else se[1] - se[0]


def _lattice_digest(lattice):
    return hashlib.sha256(repr(lattice.rows).encode()).hexdigest()[:24]


def get_slices(lattice, bound, cache_dir=None, use_cache=True):
    """Slice table for the lattice covering at least the requested bound.

    Tables already in memory or on disk with a larger bound are reused.
    Disk files live under cache_dir (default from PRIMREP_CACHE_DIR or
    ~/.cache/primrep); use_cache=False skips disk entirely.
    """
    mem = _cache_get(lattice.rows)
    if mem is not None and mem.bound >= bound:
        return mem
    digest = _lattice_digest(lattice)
    if use_cache:
        if cache_dir is None:
            cache_dir = default_cache_dir()
        try:
            names = os.listdir(cache_dir)
        except OSError:
            names = []
        best = None
        for name in names:
            if name.startswith(digest + "_") and name.endswith(".npz"):
                try:
                    b = int(name[len(digest) + 1:-4])
                except ValueError:
                    continue
                if b >= bound and (best is None or b < best):
                    best = b
        if best is not None:
            try:
                data = np.load(os.path.join(cache_dir, "%s_%d.npz" % (digest, best)))
                slices = NormSlices(lattice, best, data["vecs"], data["norms"])
                _cache_put(lattice.rows, slices)
                return slices
            except Exception:
                pass
    slices = NormSlices.build(lattice, bound)
    _cache_put(lattice.rows, slices)
    if use_cache:
        try:
            os.makedirs(cache_dir, exist_ok=True)
            path = os.path.join(cache_dir, "%s_%d.npz" % (digest, bound))
            fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
            os.close(fd)
            with open(tmp, "wb") as fh:
                np.savez_compressed(fh, vecs=slices.vecs, norms=slices.norms)
            os.replace(tmp, path)
        except OSError:
            pass
    return slices


def clear_memory_cache():
    _MEM_CACHE.clear()


def drop_cached(lattice):
    _MEM_CACHE.pop(lattice.rows, None)


def short_vectors(lattice, bound, cache_dir=None, use_cache=True):
    """List of (vector, norm), 0 < norm <= bound, one per +-pair, (norm, lex) order."""
    slices = get_slices(lattice, bound, cache_dir, use_cache)
    keep = slices.norms <= bound
    return [(tuple(int(x) for x in v), int(t)) for v, t in zip(slices.vecs[keep], slices.norms[keep])]


def witness_pairs(lattice, a, b, c, slices=None, cache_dir=None, use_cache=True):
    """Yield primitive pairs (v, w) with Q(v) = a, B(v, w) = b, Q(w) = c.

    Unlike the reduced-form search this accepts any coefficients, in
    particular b < 0 and a > c, as long as a and c are positive.  The scan
    order is: primitive v of norm a in lex order, then w of norm c in lex
    order with |B(v, w)| = |b|, negating w when the pairing is -b.
    """
    if a <= 0 or c <= 0:
        return
    if slices is None:
        slices = get_slices(lattice, max(a, c), cache_dir, use_cache)
    Wc = slices.matrix(c)
    if len(Wc) == 0 or slices.count(a) == 0:
        return
    prim = slices.primitive_mask(a)
    Va = slices.matrix(a)
    Pa = slices.pairings(a)
    for i in np.flatnonzero(prim):
        dots = Wc @ Pa[i]
        hits = np.flatnonzero(np.abs(dots) == abs(b)) if b else np.flatnonzero(dots == 0)
        if len(hits) == 0:
            continue
        v = tuple(int(x) for x in Va[i])
        for j in hits:
            w = Wc[j] if dots[j] == b else -Wc[j]
            w = tuple(int(x) for x in w)
            if is_primitive_span([v, w]):
                yield v, w


def primitively_represents_binary(lattice, form, slices=None, cache_dir=None, use_cache=True):
    """Least witness pair realizing the form on a primitive rank-2 span, or None.

    The scan order is: primitive v of norm a in lex order, then w of norm c in
    lex order with |B(v, w)| = b, negating w when the pairing is -b.
    """
    if slices is None:
        slices = get_slices(lattice, form.c, cache_dir, use_cache)
    for v, w in witness_pairs(lattice, form.a, form.b, form.c, slices):
        return SpanWitness(lattice, (v, w))
    return None


def check_forms(lattice, forms, slices=None, cache_dir=None, use_cache=True):
    """[(form, witness-or-None)] for each form, reusing one slice table."""
    if not forms:
        return []
    top = max(f.c for f in forms)
    if slices is None or slices.bound < top:
        slices = get_slices(lattice, top, cache_dir, use_cache)
    return [(f, primitively_represents_binary(lattice, f, slices)) for f in forms]


def exceptions_up_to(lattice, cmax, slices=None, cache_dir=None, use_cache=True):
    """Reduced forms with c <= cmax not primitively represented, (c, a, b) order."""
    forms = reduced_forms_up_to(cmax)
    if slices is None or slices.bound < cmax:
        slices = get_slices(lattice, cmax, cache_dir, use_cache)
    return [f for f in forms
            if primitively_represents_binary(lattice, f, slices) is None]


def first_exception(lattice, cmax, slices=None, cache_dir=None, use_cache=True):
    """Least non-represented reduced form with c <= cmax, or None."""
    if slices is None or slices.bound < cmax:
        slices = get_slices(lattice, cmax, cache_dir, use_cache)
    for f in reduced_forms_up_to(cmax):
        if primitively_represents_binary(lattice, f, slices) is None:
            return f
    return None
