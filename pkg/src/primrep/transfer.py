"""Witness transfer between lattices through frozen embedding rules.

Each rule in rules.json fixes an auxiliary lattice N, a scale q, a linear
correction family D(k), and a rational lift matrix stored as an integer
matrix over a common denominator.  The defining identity, checked again
every time the registry loads, is

    q * lift^t * G_L * lift == den^2 * (G_N perp D(k))

for every target L the rule covers.  Consequently, whenever a pair in N
realizes the corrected form q*f - T D T^t and the lifted coordinates are
integral, the lifted pair realizes f inside L.  Nothing here trusts the
rule data beyond that identity: every produced witness is revalidated
exactly (Gram match and primitive span) before it is returned.
"""

import json
from importlib import resources
from itertools import product

from .enum_vectors import get_slices, witness_pairs
from .gram import GramMatrix, ReducedBinaryForm, SpanWitness, is_primitive_span


class TransferError(Exception):
    pass


class RuleDataError(TransferError):
    pass


class ParityError(TransferError):
    """Correction with both diagonal entries even where one must be odd."""


class RuleTarget:
    __slots__ = ("label", "k", "gram")

    def __init__(self, label, k, gram):
        self.label = label
        self.k = k
        self.gram = gram

    def __repr__(self):
        return "RuleTarget(%r)" % self.label


def _matmul(A, B):
    return [[sum(A[i][t] * B[t][j] for t in range(len(B)))
             for j in range(len(B[0]))] for i in range(len(A))]


def _transpose(A):
    return [list(col) for col in zip(*A)]


class TransferRule:
    """One frozen embedding rule with its validated matrices."""

    def __init__(self, data):
        self.name = data["name"]
        self.op = data["op"]
        self.q = int(data["q"])
        self.aux = GramMatrix(data["aux"])
        self.corr_const = [[int(x) for x in row] for row in data["corr_const"]]
        self.corr_k = [[int(x) for x in row] for row in data["corr_k"]]
        self.lift_num = [[int(x) for x in row] for row in data["lift_num"]]
        self.lift_den = int(data["lift_den"])
        self.parity = bool(data["parity"])
        self.targets = tuple(
            RuleTarget(t["label"], int(t["k"]), GramMatrix(t["gram"]))
            for t in data["targets"])
        self.jdim = len(self.corr_const)

    def correction(self, k):
        j = self.jdim
        return [[self.corr_const[i][t] + k * self.corr_k[i][t]
                 for t in range(j)] for i in range(j)]

    def target(self, label):
        for t in self.targets:
            if t.label == label:
                return t
        raise KeyError("rule %s has no target %r" % (self.name, label))

    def validate(self):
        n = self.aux.n
        den2 = self.lift_den * self.lift_den
        for t in self.targets:
            d = self.correction(t.k)
            if any(d[i][i] <= 0 for i in range(self.jdim)):
                raise RuleDataError("%s: correction for %s not positive"
                                    % (self.name, t.label))
            lhs = _matmul(_matmul(_transpose(self.lift_num), t.gram.rows),
                          self.lift_num)
            size = n + self.jdim
            if t.gram.n != size or len(self.lift_num) != size:
                raise RuleDataError("%s: shape mismatch for %s"
                                    % (self.name, t.label))
            for i in range(size):
                for j in range(size):
                    if i < n and j < n:
                        want = self.aux.rows[i][j]
                    elif i >= n and j >= n:
                        want = d[i - n][j - n]
                    else:
                        want = 0
                    if self.q * lhs[i][j] != den2 * want:
                        raise RuleDataError("%s: identity fails for %s at %d,%d"
                                            % (self.name, t.label, i, j))

    def lift_pair(self, pair, svec, tvec):
        """Lift ((v, s), (w, t)) into target coordinates, or None if the
        lifted coordinates are not integral."""
        v, w = pair
        x = list(v) + list(svec)
        y = list(w) + list(tvec)
        den = self.lift_den
        rows = []
        for vec in (x, y):
            out = []
            for row in self.lift_num:
                s = sum(row[i] * vec[i] for i in range(len(vec)))
                if s % den:
                    return None
                out.append(s // den)
            rows.append(out)
        return rows


_REGISTRY = None


def load_rules():
    """Load, validate and freeze the rule registry (idempotent)."""
    global _REGISTRY
    if _REGISTRY is None:
        with resources.files("primrep").joinpath("rules.json").open() as fh:
            data = json.load(fh)
        if data.get("schema") != 1:
            raise RuleDataError("unknown rules schema %r" % data.get("schema"))
        rules = tuple(TransferRule(r) for r in data["rules"])
        from .tables import grid_by_label
        grid = grid_by_label()
        for rule in rules:
            rule.validate()
            for t in rule.targets:
                if t.label in grid and grid[t.label].gram != t.gram:
                    raise RuleDataError("%s: %s disagrees with the candidate grid"
                                        % (rule.name, t.label))
        _REGISTRY = rules
    return _REGISTRY


def rule_by_name(name):
    for rule in load_rules():
        if rule.name == name:
            return rule
    raise KeyError(name)


def rules_for_label(label):
    return [rule for rule in load_rules()
            if any(t.label == label for t in rule.targets)]


def _corr_entries(svec, tvec, d):
    j = len(d)
    a = sum(svec[i] * d[i][t] * svec[t] for i in range(j) for t in range(j))
    b = sum(svec[i] * d[i][t] * tvec[t] for i in range(j) for t in range(j))
    c = sum(tvec[i] * d[i][t] * tvec[t] for i in range(j) for t in range(j))
    return a, b, c


def _vectors_within(d, bound):
    """All integer vectors x with x^t d x <= bound, d positive definite."""
    j = len(d)
    if bound < 0:
        return []
    if j == 1:
        top = int((bound // d[0][0]) ** 0.5)
        while (top + 1) * (top + 1) * d[0][0] <= bound:
            top += 1
        return [(s,) for s in range(-top, top + 1)]
    tr = d[0][0] + d[1][1]
    det = d[0][0] * d[1][1] - d[0][1] * d[1][0]
    lam = (tr - (tr * tr - 4 * det) ** 0.5) / 2
    top = int((bound / max(lam * 0.999, 1e-9)) ** 0.5) + 1
    out = []
    for s1 in range(-top, top + 1):
        for s2 in range(-top, top + 1):
            val = d[0][0] * s1 * s1 + 2 * d[0][1] * s1 * s2 + d[1][1] * s2 * s2
            if val <= bound:
                out.append((s1, s2))
    return out


def corrected_pairs(rule, k, a, c):
    """Correction choices (svec, tvec, A, B, C), smallest corrections first.

    For parity rules, pairs where both A and C are even are filtered out;
    those corrections land outside the auxiliary construction's reach.
    """
    d = rule.correction(k)
    q = rule.q
    svecs = _vectors_within(d, q * a - 1)
    tvecs = _vectors_within(d, q * c - 1)
    out = []
    for svec, tvec in product(svecs, tvecs):
        ca, cb, cc = _corr_entries(svec, tvec, d)
        if rule.parity and ca % 2 == 0 and cc % 2 == 0:
            continue
        out.append((svec, tvec, ca, cb, cc))
    out.sort(key=lambda item: (item[2] + item[4], item[2], item[0], item[1]))
    return out


def find_transfer_witness(rule, target, form, slices=None, cache_dir=None,
                          use_cache=True, pair_budget=None):
    """Search a witness for `form` in `target` through `rule`.

    Every correction choice is tried smallest first; for each, primitive
    pairs realizing the corrected form in the auxiliary lattice are lifted
    until one lands on integral coordinates with a primitive span.  Returns
    a revalidated SpanWitness or None (the rule gives no verdict then).
    """
    if isinstance(target, str):
        target = rule.target(target)
    if isinstance(form, ReducedBinaryForm):
        a, b, c = form.a, form.b, form.c
    else:
        a, b, c = form
    if slices is None:
        slices = get_slices(rule.aux, rule.q * max(a, c), cache_dir, use_cache)
    goal = GramMatrix([[a, b], [b, c]])
    tried = 0
    for svec, tvec, ca, cb, cc in corrected_pairs(rule, target.k, a, c):
        a2, b2, c2 = rule.q * a - ca, rule.q * b - cb, rule.q * c - cc
        if a2 <= 0 or c2 <= 0 or a2 * c2 - b2 * b2 <= 0:
            continue
        if pair_budget is not None:
            tried += 1
            if tried > pair_budget:
                return None
        for pair in witness_pairs(rule.aux, a2, b2, c2, slices=slices):
            rows = rule.lift_pair(pair, svec, tvec)
            if rows is None:
                continue
            witness = SpanWitness(target.gram, rows)
            if witness.validate(goal):
                return witness
    return None


def _apply_checked(rule, target, pair, svec, tvec):
    """One lift attempt with the sign retry: (s, t) first, then (-s, -t)."""
    if isinstance(target, str):
        target = rule.target(target)
    d = rule.correction(target.k)
    ca, cb, cc = _corr_entries(svec, tvec, d)
    if rule.parity and ca % 2 == 0 and cc % 2 == 0:
        raise ParityError("%s: corrections %d, %d are both even"
                          % (rule.name, ca, cc))
    g = rule.aux.transform(pair)
    qa, qb, qc = g.rows[0][0] + ca, g.rows[0][1] + cb, g.rows[1][1] + cc
    if qa % rule.q or qb % rule.q or qc % rule.q:
        raise TransferError("%s: corrected Gram is not divisible by %d"
                            % (rule.name, rule.q))
    goal = GramMatrix([[qa // rule.q, qb // rule.q], [qb // rule.q, qc // rule.q]])
    for sgn in (1, -1):
        rows = rule.lift_pair(pair, [sgn * x for x in svec], [sgn * x for x in tvec])
        if rows is None:
            continue
        witness = SpanWitness(target.gram, rows)
        if witness.validate(goal):
            return witness
    raise TransferError("%s: pair does not lift to a primitive witness" % rule.name)


def _scalar_vec(x):
    if isinstance(x, (int,)):
        return (x,)
    return tuple(int(v) for v in x)


def transfer_scaled(rule, target, pair, s, t):
    """Lift through a q-scaled section rule; s, t scale the correction line."""
    if rule.op != "scaled":
        raise TransferError("rule %s is not a scaled rule" % rule.name)
    return _apply_checked(rule, target, pair, _scalar_vec(s), _scalar_vec(t))


def transfer_d2h(rule, target, pair, s, t):
    """Lift through a doubled-diagonal rule (auxiliary 2I_m + <4, 1>)."""
    if rule.op != "d2h":
        raise TransferError("rule %s is not a d2h rule" % rule.name)
    return _apply_checked(rule, target, pair, _scalar_vec(s), _scalar_vec(t))


def transfer_hn(rule, target, pair, svec, tvec):
    """Lift through a two-slot corrected rule; raises ParityError when the
    rule demands an odd corrected entry and both are even."""
    if rule.op != "hn":
        raise TransferError("rule %s is not an hn rule" % rule.name)
    return _apply_checked(rule, target, pair, _scalar_vec(svec), _scalar_vec(tvec))


def transfer_d3(rule, target, pair, s, t):
    """Lift through the unit-cube rule; the lift is integral only when the
    witness coordinates meet its parity congruence, so callers retry with
    other witnesses (coordinate permutations) when this raises."""
    if rule.op != "d3":
        raise TransferError("rule %s is not a d3 rule" % rule.name)
    return _apply_checked(rule, target, pair, _scalar_vec(s), _scalar_vec(t))


def transfer_genus_mate(rule, target, pair, svec, tvec):
    """Lift a witness found in a genus mate through an integral surgery map."""
    if rule.op not in ("genus_mate", "shift"):
        raise TransferError("rule %s is not a genus-mate rule" % rule.name)
    return _apply_checked(rule, target, pair, _scalar_vec(svec), _scalar_vec(tvec))


def parity_class_analysis(x, y):
    """Parity structure of a coordinate pair, for the unit-cube rule.

    Returns a dict with the per-index parity classes, the set of pairwise
    parity sums, whether that set is proper (misses some parity pattern),
    and which of the three constrained class patterns applies:
      'a' for {(1,0),(0,1)}, 'b' for {(1,0),(1,1)}, 'c' for {(0,1),(1,1)}.
    """
    classes = [(xi % 2, yi % 2) for xi, yi in zip(x, y)]
    pair_set = set()
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            pair_set.add(((classes[i][0] + classes[j][0]) % 2,
                          (classes[i][1] + classes[j][1]) % 2))
    proper = len(pair_set) < 4
    cases = {
        frozenset(((1, 0), (0, 1))): "a",
        frozenset(((1, 0), (1, 1))): "b",
        frozenset(((0, 1), (1, 1))): "c",
    }
    return {
        "classes": sorted(set(classes)),
        "pair_set": sorted(pair_set),
        "proper": proper,
        "case": cases.get(frozenset(set(classes) - {(0, 0)}))
        if proper else None,
    }


def extend_with_complement(lattice, rows, y):
    """Append a complement vector to a witness, fixing primitivity by sign.

    Tries rows + [y] and rows + [-y]; one sign restores a primitive span
    except when the obstruction involves the prime 2, which no sign flip
    can repair, so that case raises.
    """
    for sgn in (1, -1):
        cand = list(rows) + [[sgn * v for v in y]]
        if is_primitive_span(cand):
            return SpanWitness(lattice, cand)
    raise TransferError("no sign of the complement vector gives a primitive span")
