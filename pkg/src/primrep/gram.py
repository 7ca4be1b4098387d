"""Exact integer arithmetic for Gram matrices of small-rank lattices.

A lattice is presented by the Gram matrix of some basis.  Entries are plain
python ints, the bilinear form is B(u, v) = u^T M v, and the quadratic form
is Q(v) = B(v, v), so diagonal entries are the norms of the basis vectors.
Binary forms (a, b, c) mean a*x^2 + 2*b*x*y + c*y^2, i.e. Gram [[a, b], [b, c]].
"""

from itertools import combinations
from math import gcd, isqrt

RANK_CAP = 8


def _bareiss_det(rows):
    """Integer determinant by fraction-free elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


class GramMatrix:
    """Symmetric integer matrix; not required to be definite."""

    __slots__ = ("rows", "n", "_det")

    def __init__(self, rows):
        rows = tuple(tuple(int(x) for x in row) for row in rows)
        n = len(rows)
        if not 1 <= n <= RANK_CAP:
            raise ValueError("rank %d out of supported range" % n)
        for row in rows:
            if len(row) != n:
                raise ValueError("matrix is not square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("matrix is not symmetric")
        self.rows = rows
        self.n = n
        self._det = None

    @property
    def det(self):
        if self._det is None:
            self._det = _bareiss_det(self.rows)
        return self._det

    def leading_minors(self):
        """Determinants of the leading principal k x k blocks, k = 1..n."""
        return [_bareiss_det([r[:k] for r in self.rows[:k]]) for k in range(1, self.n + 1)]

    def is_positive_definite(self):
        return all(m > 0 for m in self.leading_minors())

    def bilinear(self, u, v):
        rows = self.rows
        return sum(u[i] * sum(rows[i][j] * v[j] for j in range(self.n)) for i in range(self.n))

    def quadratic(self, v):
        return self.bilinear(v, v)

    def apply(self, v):
        """The vector M v (pairings of v against the basis)."""
        return tuple(sum(row[j] * v[j] for j in range(self.n)) for row in self.rows)

    def transform(self, U):
        """Gram matrix U M U^T of the vectors given by the rows of U."""
        m = len(U)
        out = [[0] * m for _ in range(m)]
        images = [self.apply(u) for u in U]
        for i in range(m):
            for j in range(i + 1):
                val = sum(U[i][k] * images[j][k] for k in range(self.n))
                out[i][j] = val
                out[j][i] = val
        return GramMatrix(out)

    def scale(self, a):
        a = int(a)
        if a == 0:
            raise ValueError("scale factor must be nonzero")
        return GramMatrix([[a * x for x in row] for row in self.rows])

    def key(self):
        return self.rows

    def __eq__(self, other):
        return isinstance(other, GramMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return "GramMatrix(%r)" % (list(list(r) for r in self.rows),)


def diag_lattice(*entries):
    """Diagonal Gram matrix <d1, ..., dk>."""
    n = len(entries)
    return GramMatrix([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])


def eye(n):
    return diag_lattice(*([1] * n))


def orthogonal_sum(A, B):
    n, m = A.n, B.n
    rows = []
    for i in range(n):
        rows.append(list(A.rows[i]) + [0] * m)
    for i in range(m):
        rows.append([0] * n + list(B.rows[i]))
    return GramMatrix(rows)


def osum(*mats):
    out = mats[0]
    for m in mats[1:]:
        out = orthogonal_sum(out, m)
    return out


def section(A, k):
    """Leading k x k block, the sublattice spanned by the first k basis vectors."""
    if not 1 <= k <= A.n:
        raise ValueError("section size out of range")
    return GramMatrix([row[:k] for row in A.rows[:k]])


def determinant(A):
    return A.det


HYPERBOLIC = GramMatrix([[0, 1], [1, 0]])
EVEN_ANISO = GramMatrix([[2, 1], [1, 2]])


class ReducedBinaryForm:
    """Positive definite binary form with 0 <= 2b <= a <= c."""

    __slots__ = ("a", "b", "c")

    def __init__(self, a, b, c):
        a, b, c = int(a), int(b), int(c)
        if not (0 <= 2 * b <= a <= c):
            raise ValueError("coefficients are not reduced")
        if a * c - b * b <= 0:
            raise ValueError("form is not positive definite")
        self.a = a
        self.b = b
        self.c = c

    @property
    def det(self):
        return self.a * self.c - self.b * self.b

    def gram(self):
        return GramMatrix([[self.a, self.b], [self.b, self.c]])

    def key(self):
        # total order used to pick least exceptions: c first, then a, then b
        return (self.c, self.a, self.b)

    def coeffs(self):
        return (self.a, self.b, self.c)

    @classmethod
    def from_coeffs(cls, a, b, c):
        """Gauss-reduce an arbitrary positive definite (a, b, c)."""
        a, b, c = int(a), int(b), int(c)
        if a <= 0 or a * c - b * b <= 0:
            raise ValueError("form is not positive definite")
        while True:
            if a > c:
                a, c = c, a
                continue
            if 2 * abs(b) > a:
                # shear second generator by the nearest multiple of the first
                t = (2 * b + a) // (2 * a)
                b, c = b - t * a, c - 2 * t * b + t * t * a
                continue
            break
        return cls(a, abs(b), c)

    @classmethod
    def from_gram(cls, G):
        if G.n != 2:
            raise ValueError("binary form needs a 2 x 2 matrix")
        return cls.from_coeffs(G.rows[0][0], G.rows[0][1], G.rows[1][1])

    def __eq__(self, other):
        return isinstance(other, ReducedBinaryForm) and self.coeffs() == other.coeffs()

    def __hash__(self):
        return hash(self.coeffs())

    def __lt__(self, other):
        return self.key() < other.key()

    def __le__(self, other):
        return self.key() <= other.key()

    def __repr__(self):
        return "ReducedBinaryForm(%d, %d, %d)" % (self.a, self.b, self.c)


def binary_cmp(f, g):
    """-1, 0, or 1 comparing in the (c, a, b) order."""
    kf, kg = f.key(), g.key()
    return (kf > kg) - (kf < kg)


def reduced_forms_up_to(cmax):
    """All reduced binary forms with c <= cmax, ascending in the (c, a, b) order."""
    out = []
    for c in range(1, cmax + 1):
        for a in range(1, c + 1):
            for b in range(0, a // 2 + 1):
                if a * c - b * b > 0:
                    out.append(ReducedBinaryForm(a, b, c))
    return out


def minor_gcd(rows):
    """gcd of all maximal minors of an integer m x n matrix, m <= n."""
    m = len(rows)
    n = len(rows[0])
    if m > n:
        raise ValueError("more rows than columns")
    g = 0
    for cols in combinations(range(n), m):
        sub = [[rows[i][j] for j in cols] for i in range(m)]
        g = gcd(g, _bareiss_det(sub))
        if g == 1:
            return 1
    return g


def is_primitive_vector(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return g == 1


def is_primitive_span(rows):
    """True when the rows span a direct summand of Z^n (all maximal minors coprime)."""
    return minor_gcd(rows) == 1


class SpanWitness:
    """Rows of coeffs are lattice vectors realizing a target Gram matrix."""

    __slots__ = ("lattice", "coeffs")

    def __init__(self, lattice, coeffs):
        self.lattice = lattice
        self.coeffs = tuple(tuple(int(x) for x in row) for row in coeffs)

    def induced_gram(self):
        return self.lattice.transform(self.coeffs)

    def is_primitive(self):
        return is_primitive_span(self.coeffs)

    def validate(self, target):
        """Exact recheck: right Gram matrix and a primitively embedded span."""
        return self.induced_gram() == target and self.is_primitive()

    def __repr__(self):
        return "SpanWitness(%r)" % (list(list(r) for r in self.coeffs),)


def _scaled_cholesky(M):
    """Fraction-free Cholesky data for a positive definite M.

    Returns (P, R, C, c) with P the leading principal minors (P[0] = 1 padded
    in front), R integer upper-triangular rows from fraction-free elimination
    (R[i][i] = P[i+1]), C = prod P[i] * P[i+1], and c[i] = C // (P[i] * P[i+1]),
    so that C * Q(x) = sum_i c[i] * y_i^2 with y_i = sum_{j>=i} R[i][j] * x_j.
    """
    n = M.n
    a = [list(row) for row in M.rows]
    P = [1] * (n + 1)
    R = [None] * n
    prev = 1
    for k in range(n):
        if a[k][k] <= 0:
            raise ValueError("matrix is not positive definite")
        R[k] = tuple(a[k][k:])
        P[k + 1] = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    C = 1
    for i in range(n):
        C *= P[i] * P[i + 1]
    c = [C // (P[i] * P[i + 1]) for i in range(n)]
    return P, R, C, c


def short_vectors_raw(M, bound):
    """All x != 0 with Q(x) <= bound, one of each +-x pair, sorted by (norm, x).

    The sign representative has positive first nonzero coordinate.  All
    arithmetic is integer; bounds per coordinate come from exact isqrt.
    """
    n = M.n
    P, R, C, c = _scaled_cholesky(M)
    out = []
    x = [0] * n
    rows = M.rows

    def descend(i, budget):
        # y = P[i+1]*x_i + shift must satisfy c[i]*y^2 <= budget
        ci = c[i]
        pii = P[i + 1]
        Ri = R[i]
        shift = sum(Ri[j - i] * x[j] for j in range(i + 1, n))
        ymax = isqrt(budget // ci)
        lo = -((ymax + shift) // pii)
        hi = (ymax - shift) // pii
        for xi in range(lo, hi + 1):
            x[i] = xi
            y = pii * xi + shift
            rem = budget - ci * y * y
            if i == 0:
                for v in x:
                    if v > 0:
                        # total spent scaled weight is C * Q(x), so rem = C * (bound - Q)
                        out.append((tuple(x), bound - rem // C))
                        break
                    if v < 0:
                        break
            else:
                descend(i - 1, rem)
        x[i] = 0

    descend(n - 1, C * bound)
    out.sort(key=lambda t: (t[1], t[0]))
    return out


def _extend_basis_step(chosen, candidates):
    """First candidate whose span with the chosen rows is primitive of full rank."""
    for v, norm in candidates:
        rows = list(chosen) + [v]
        if minor_gcd(rows) == 1:
            return v, norm
    return None, None


def minkowski_reduce(A):
    """Greedy reduced basis: each new vector has least norm among all vectors
    that extend the current ones to a primitive sublattice, ties broken by
    lexicographic order of the sign-normalized coordinate vector.

    Returns (reduced Gram matrix, transform) with transform rows the new basis.
    """
    if not A.is_positive_definite():
        raise ValueError("reduction needs a positive definite matrix")
    n = A.n
    bound = max(A.rows[i][i] for i in range(n))
    vecs = short_vectors_raw(A, bound)
    chosen = []
    while len(chosen) < n:
        v, _ = _extend_basis_step(chosen, vecs)
        if v is None:
            bound *= 2
            vecs = short_vectors_raw(A, bound)
            continue
        chosen.append(v)
    U = tuple(tuple(v) for v in chosen)
    return A.transform(U), U
