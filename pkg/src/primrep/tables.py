"""Reference data: the candidate grid, core-prime table, and the local
structure patterns used by the verification suites.

Candidate labels concatenate the family letter, a roman-numeral variant for
families with several constructions, and the parameter k: "A_1", "Bii_3",
"Kiv_25".  Constructions are written so that the leading 5 x 5 block of each
Gram matrix is the family's common quinary section.
"""

from .gram import GramMatrix, diag_lattice, eye, osum

EVEN_PLANE = GramMatrix([[2, 1], [1, 2]])


def _b2(a, b, k):
    return GramMatrix([[a, b], [b, k]])


FIVE_SECTIONS = {
    "A": eye(5),
    "B": osum(eye(4), diag_lattice(2)),
    "C": osum(eye(4), diag_lattice(3)),
    "D": osum(eye(3), diag_lattice(2, 2)),
    "E": osum(eye(3), EVEN_PLANE),
    "F": osum(eye(3), diag_lattice(2, 3)),
    "G": osum(eye(3), GramMatrix([[2, 1], [1, 3]])),
    "H": osum(eye(2), EVEN_PLANE, diag_lattice(2)),
    "I": osum(eye(2), GramMatrix([[2, 1, 1], [1, 2, 1], [1, 1, 2]])),
    "J": osum(eye(2), EVEN_PLANE, diag_lattice(3)),
    "K": osum(eye(2), GramMatrix([[2, 1, 1], [1, 2, 1], [1, 1, 3]])),
}

# family -> list of (variant, k values, gram builder)
_GRID_SPEC = {
    "A": [("", (1, 2), lambda k: osum(eye(5), diag_lattice(k)))],
    "B": [
        ("i", range(2, 6), lambda k: osum(eye(4), diag_lattice(2, k))),
        ("ii", (2, 3, 5, 6), lambda k: osum(eye(4), _b2(2, 1, k))),
    ],
    "C": [("", (3,), lambda k: osum(eye(4), _b2(3, 1, k)))],
    "D": [
        ("i", range(2, 7), lambda k: osum(eye(3), diag_lattice(2, 2, k))),
        ("ii", range(3, 9), lambda k: osum(eye(3), diag_lattice(2), _b2(2, 1, k))),
        ("iii", (3, 5, 6, 7),
         lambda k: osum(eye(3), GramMatrix([[2, 0, 1], [0, 2, 1], [1, 1, k]]))),
    ],
    "E": [
        ("i", (2, 3, 4, 5, 7, 8), lambda k: osum(eye(3), EVEN_PLANE, diag_lattice(k))),
        ("ii", range(2, 10),
         lambda k: osum(eye(3), GramMatrix([[2, 1, 1], [1, 2, 1], [1, 1, k]]))),
    ],
    "F": [("", (3,), lambda k: osum(eye(3), diag_lattice(2), _b2(3, 1, k)))],
    "G": [
        ("i", (3, 4) + tuple(range(6, 19)),
         lambda k: osum(eye(3), _b2(2, 1, 3), diag_lattice(k))),
        ("ii", range(3, 20),
         lambda k: osum(eye(3), GramMatrix([[2, 1, 0], [1, 3, 1], [0, 1, k]]))),
        ("iii", range(3, 20),
         lambda k: osum(eye(3), GramMatrix([[2, 1, 1], [1, 3, 1], [1, 1, k]]))),
    ],
    "H": [
        ("i", range(3, 6), lambda k: osum(eye(2), EVEN_PLANE, diag_lattice(2, k))),
        ("ii", (2, 4, 5), lambda k: osum(eye(2), EVEN_PLANE, _b2(2, 1, k))),
        ("iii", range(3, 7),
         lambda k: osum(eye(2), GramMatrix(
             [[2, 1, 0, 1], [1, 2, 0, 1], [0, 0, 2, 0], [1, 1, 0, k]]))),
        ("iv", (3, 4, 6),
         lambda k: osum(eye(2), GramMatrix(
             [[2, 1, 0, 1], [1, 2, 0, 1], [0, 0, 2, 1], [1, 1, 1, k]]))),
    ],
    "I": [
        ("i", (2,),
         lambda k: osum(eye(2), GramMatrix([[2, 1, 1], [1, 2, 1], [1, 1, 2]]),
                        diag_lattice(k))),
        ("ii", range(2, 6),
         lambda k: osum(eye(2), GramMatrix(
             [[2, 1, 1, 1], [1, 2, 1, 1], [1, 1, 2, 0], [1, 1, 0, k]]))),
        ("iii", range(2, 5),
         lambda k: osum(eye(2), GramMatrix(
             [[2, 1, 1, 1], [1, 2, 1, 1], [1, 1, 2, 1], [1, 1, 1, k]]))),
    ],
    "J": [("", (3,), lambda k: osum(eye(2), EVEN_PLANE, _b2(3, 1, k)))],
    "K": [
        ("i", tuple(range(3, 21)) + (22, 23, 24),
         lambda k: osum(eye(2), GramMatrix([[2, 1, 1], [1, 2, 1], [1, 1, 3]]),
                        diag_lattice(k))),
        ("ii", range(3, 25),
         lambda k: osum(eye(2), GramMatrix(
             [[2, 1, 1, 0], [1, 2, 1, 0], [1, 1, 3, 1], [0, 0, 1, k]]))),
        ("iii", range(3, 26),
         lambda k: osum(eye(2), GramMatrix(
             [[2, 1, 1, 1], [1, 2, 1, 1], [1, 1, 3, 0], [1, 1, 0, k]]))),
        ("iv", range(3, 26),
         lambda k: osum(eye(2), GramMatrix(
             [[2, 1, 1, 1], [1, 2, 1, 1], [1, 1, 3, 1], [1, 1, 1, k]]))),
    ],
}

FAMILIES = tuple(_GRID_SPEC)


class GridEntry:
    __slots__ = ("label", "family", "variant", "k", "gram")

    def __init__(self, label, family, variant, k, gram):
        self.label = label
        self.family = family
        self.variant = variant
        self.k = k
        self.gram = gram

    def __repr__(self):
        return "GridEntry(%s)" % self.label


def candidate_grid():
    """The 201 published candidates in table order."""
    out = []
    for family, rows in _GRID_SPEC.items():
        for variant, ks, build in rows:
            for k in ks:
                label = "%s%s_%d" % (family, variant, k)
                out.append(GridEntry(label, family, variant, k, build(k)))
    return out


def grid_by_label():
    return {e.label: e for e in candidate_grid()}


# ---------------------------------------------------------------------------
# local exception patterns

from .padic import (  # noqa: E402
    DiagPattern,
    EvenPattern,
    HyperbolicSpacePattern,
    NormBound,
    ScaleBound,
    UnimodularPattern,
)

U2 = frozenset((1, 3, 5, 7))
UODD = frozenset((1, -1))


class ExceptionRule:
    """Necessary local conditions on the exceptions of one lattice.

    Every reduced binary form the lattice represents but not primitively
    must match at least one of the patterns; each pattern is paired with
    the prime where it applies.  The converse is not claimed.
    """

    __slots__ = ("label", "section", "core_prime", "patterns")

    def __init__(self, label, section, core_prime, patterns):
        self.label = label
        self.section = section
        self.core_prime = core_prime
        self.patterns = tuple(patterns)

    def matches(self, form):
        from .padic import matches_any_pattern

        for q in sorted({p for p, _ in self.patterns}):
            pats = [pat for p, pat in self.patterns if p == q]
            if matches_any_pattern(form, q, pats) is not None:
                return True
        return False

    def __repr__(self):
        return "ExceptionRule(%s, q=%d)" % (self.label, self.core_prime)


# families whose escalations exhaust the candidate grid: exceptions of the
# quinary section are constrained at the single core prime
QUINARY_EXCEPTION_RULES = {
    "A": ExceptionRule("A", FIVE_SECTIONS["A"], 2, [
        (2, DiagPattern(2, 0, (1,), 3, U2, exact2=False)),
        (2, NormBound(2, 2)),
    ]),
    "B": ExceptionRule("B", FIVE_SECTIONS["B"], 2, [
        (2, DiagPattern(2, 1, (1,), 4, U2, exact2=False)),
        (2, NormBound(2, 3)),
    ]),
    "D": ExceptionRule("D", FIVE_SECTIONS["D"], 2, [
        (2, DiagPattern(2, 0, (1,), 4, U2, exact2=False)),
        (2, DiagPattern(2, 2, (1,), 4, U2, exact2=False)),
        (2, DiagPattern(2, 2, (5,), 4, U2, exact2=False)),
        (2, NormBound(2, 4)),
    ]),
    "E": ExceptionRule("E", FIVE_SECTIONS["E"], 3, [
        (3, DiagPattern(3, 1, (1,), 2, UODD, exact2=False)),
        (3, ScaleBound(3, 2)),
    ]),
    "G": ExceptionRule("G", FIVE_SECTIONS["G"], 5, [
        (5, DiagPattern(5, 1, (1,), 2, UODD, exact2=False)),
        (5, ScaleBound(5, 2)),
    ]),
    "I": ExceptionRule("I", FIVE_SECTIONS["I"], 2, [
        (2, DiagPattern(2, 0, (1,), 5, U2, exact2=False)),
        (2, DiagPattern(2, 0, (5,), 4, U2, exact2=True)),
        (2, DiagPattern(2, 2, (1,), 5, U2, exact2=False)),
        (2, NormBound(2, 4)),
    ]),
    "K": ExceptionRule("K", FIVE_SECTIONS["K"], 7, [
        (7, DiagPattern(7, 1, (1,), 2, UODD, exact2=False)),
        (7, ScaleBound(7, 2)),
    ]),
}

# families whose sections have smaller exception sets; X is the auxiliary
# quinary lattice with trailing plane [[3, 1], [1, 3]]
AUX_SECTION_X = osum(eye(3), GramMatrix([[3, 1], [1, 3]]))

SMALL_EXCEPTION_RULES = {
    "C": ExceptionRule("C", FIVE_SECTIONS["C"], 2, [
        (2, DiagPattern(2, 0, (3,), 3, U2, exact2=False)),
        (2, NormBound(2, 2)),
    ]),
    "F": ExceptionRule("F", FIVE_SECTIONS["F"], 3, [
        (2, DiagPattern(2, 2, U2, 2, U2)),
        (2, EvenPattern("A", 0)),
        # the scale 1 even plane is also obstructed: forms in that class
        # land in the even codimension 1 sublattice mod 2, which forces
        # every witness pair to span imprimitively
        (2, EvenPattern("A", 1)),
        (3, DiagPattern(3, 1, (-1,), 2, UODD, exact2=False)),
        (3, ScaleBound(3, 2)),
    ]),
    "J": ExceptionRule("J", FIVE_SECTIONS["J"], 2, [
        (2, DiagPattern(2, 0, (1,), 3, U2, exact2=False)),
        (2, NormBound(2, 2)),
    ]),
    "X": ExceptionRule("X", AUX_SECTION_X, 2, [
        (2, DiagPattern(2, 0, (3,), 0, (7,))),
        (2, DiagPattern(2, 0, (7,), 2, (1,))),
        (2, DiagPattern(2, 1, (1,), 1, (1,))),
        (2, DiagPattern(2, 1, (1,), 6, U2, exact2=False)),
        (2, DiagPattern(2, 1, (5,), 5, U2, exact2=True)),
        (2, DiagPattern(2, 3, (1,), 6, U2, exact2=False)),
        (2, ScaleBound(2, 4)),
    ]),
}

CORE_PRIME_EXPECTED = {
    "quinary": {lbl: r.core_prime for lbl, r in QUINARY_EXCEPTION_RULES.items()},
    "small": {lbl: r.core_prime for lbl, r in SMALL_EXCEPTION_RULES.items()},
}

# quaternary sections analyzed at 2: same rule shape, no single core prime
QUATERNARY_EXCEPTION_RULES = {
    "I4": ExceptionRule("I4", eye(4), 2, [
        (2, DiagPattern(2, 0, U2, 2, U2, exact2=False)),
        (2, DiagPattern(2, 1, (1,), 1, (3,))),
        (2, DiagPattern(2, 1, U2, 3, U2, exact2=False)),
        (2, NormBound(2, 2)),
        (2, HyperbolicSpacePattern()),
    ]),
    "1122": ExceptionRule("1122", diag_lattice(1, 1, 2, 2), 2, [
        (2, DiagPattern(2, 0, U2, 2, U2, prod8=3)),
        (2, DiagPattern(2, 0, U2, 4, U2, exact2=False)),
        (2, DiagPattern(2, 1, U2, 3, U2, exact2=False)),
        (2, DiagPattern(2, 2, U2, 2, U2, prod8=3)),
        (2, DiagPattern(2, 2, U2, 4, U2, exact2=False)),
        (2, EvenPattern("A", 0)),
        (2, NormBound(2, 3)),
        (2, HyperbolicSpacePattern()),
    ]),
    "1224": ExceptionRule("1224", diag_lattice(1, 2, 2, 4), 2, [
        (2, UnimodularPattern()),
        (2, DiagPattern(2, 0, U2, 4, U2, exact2=False)),
        (2, DiagPattern(2, 1, U2, 3, U2, prod8=3)),
        (2, DiagPattern(2, 1, U2, 5, U2, exact2=False)),
        (2, DiagPattern(2, 2, U2, 4, U2, exact2=False)),
        (2, DiagPattern(2, 3, U2, 3, U2, prod8=3)),
        (2, DiagPattern(2, 3, U2, 5, U2, exact2=False)),
        (2, EvenPattern("A", 1)),
        (2, NormBound(2, 4)),
        (2, HyperbolicSpacePattern()),
    ]),
    "12B33": ExceptionRule(
        "12B33", osum(diag_lattice(1, 2), GramMatrix([[3, 1], [1, 3]])), 2, [
            # the unit scale even plane is obstructed: completing at 2 gives
            # <1,2,3,24>, where even-norm vectors have matching first and
            # third parities, so pairings on even-norm pairs are all even
            (2, EvenPattern("A", 0)),
            (2, DiagPattern(2, 0, (1,), 0, (1,))),
            (2, DiagPattern(2, 0, (3,), 0, (7,))),
            (2, DiagPattern(2, 0, (1,), 2, (5,))),
            (2, DiagPattern(2, 0, (7,), 2, (7,))),
            (2, DiagPattern(2, 0, U2, 4, U2, prod8=3)),
            (2, DiagPattern(2, 0, U2, 6, U2, exact2=False)),
            (2, DiagPattern(2, 1, (1,), 1, (1,))),
            (2, DiagPattern(2, 1, (1,), 1, (3,))),
            (2, DiagPattern(2, 1, (1,), 1, (5,))),
            (2, DiagPattern(2, 1, (1, 5), 4, U2, exact2=False)),
            (2, DiagPattern(2, 1, (3, 7), 5, U2, exact2=False)),
            (2, DiagPattern(2, 2, (3,), 2, (3,))),
            (2, DiagPattern(2, 2, (1,), 2, (5,))),
            (2, DiagPattern(2, 2, U2, 4, U2, prod8=3)),
            (2, DiagPattern(2, 2, U2, 6, U2, exact2=False)),
            (2, NormBound(2, 3)),
            (2, HyperbolicSpacePattern()),
        ]),
}

# pairs of distinct lattices lying in one genus, used by transfer steps
# that swap a convenient genus mate in for an awkward complement
GENUS_PAIRS = [
    ("Diii_5",
     osum(diag_lattice(1), GramMatrix([[2, 0, 1], [0, 2, 1], [1, 1, 5]])),
     osum(eye(3), diag_lattice(16))),
    ("Iii_5",
     GramMatrix([[2, 1, 1, 1], [1, 2, 1, 1], [1, 1, 2, 0], [1, 1, 0, 5]]),
     osum(eye(2), GramMatrix([[4, 2], [2, 5]]))),
    ("H",
     osum(eye(2), EVEN_PLANE, diag_lattice(2)),
     osum(eye(4), diag_lattice(6))),
]

# quaternary complements with anisotropy conditions spread across primes:
# the det 12 lattice needs its complement checked at 2, 3 and p = 5, 7
# mod 12; the det 13 variant at 2, 13 and quadratic nonresidues of 13
THM_QUATERNARY_12 = GramMatrix(
    [[2, 1, 1, 1], [1, 2, 1, 1], [1, 1, 2, 0], [1, 1, 0, 4]])
THM_QUATERNARY_13 = GramMatrix(
    [[2, 1, 1, 1], [1, 2, 1, 1], [1, 1, 2, 1], [1, 1, 1, 4]])

# the ten grid members of class number one, with their determinants
CLASS_NUMBER_ONE = (
    ("A_1", 1), ("A_2", 2), ("Bi_2", 4), ("Bii_2", 3), ("Bii_3", 5),
    ("Diii_3", 8), ("Eii_2", 4), ("Eii_3", 7), ("Iii_2", 4), ("Iii_3", 8),
)

# determinant of family members as a linear function of k: det = m*k + c
DET_FORMULAS = {
    "Kii": (7, -3),
    "Kiii": (7, -6),
    "Kiv": (7, -5),
}

# positive definite quaternaries whose completion at p is the unique
# anisotropic quaternary space over Q_p
ANISOTROPIC_QUATERNARY = {
    3: diag_lattice(1, 1, 3, 3),
    5: diag_lattice(1, 2, 5, 10),
    7: diag_lattice(1, 1, 7, 7),
}

# expected cell counts of the candidate grid, per family and variant
EXPECTED_GRID_COUNTS = {
    "A": 2, "Bi": 4, "Bii": 4, "C": 1, "Di": 5, "Dii": 6, "Diii": 4,
    "Ei": 6, "Eii": 8, "F": 1, "Gi": 15, "Gii": 17, "Giii": 17,
    "Hi": 3, "Hii": 3, "Hiii": 4, "Hiv": 3, "Ii": 1, "Iii": 4,
    "Iiii": 3, "J": 1, "Ki": 21, "Kii": 22, "Kiii": 23, "Kiv": 23,
}
