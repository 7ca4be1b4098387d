"""Reference data consistency: grid shape, determinants, rule tables."""

from primrep.gram import minkowski_reduce
from primrep.padic import genus_agree
from primrep.tables import (
    ANISOTROPIC_QUATERNARY,
    AUX_SECTION_X,
    CLASS_NUMBER_ONE,
    DET_FORMULAS,
    EXPECTED_GRID_COUNTS,
    FIVE_SECTIONS,
    GENUS_PAIRS,
    QUATERNARY_EXCEPTION_RULES,
    QUINARY_EXCEPTION_RULES,
    SMALL_EXCEPTION_RULES,
    THM_QUATERNARY_12,
    THM_QUATERNARY_13,
    candidate_grid,
    grid_by_label,
)


def _is_positive_definite(G):
    # leading principal minors via iterated sections
    from primrep.gram import section

    for k in range(1, G.n + 1):
        if section(G, k).det <= 0:
            return False
    return True


def test_grid_has_201_entries():
    assert len(candidate_grid()) == 201


def test_grid_labels_are_unique():
    grid = candidate_grid()
    labels = [e.label for e in grid]
    assert len(set(labels)) == len(labels)
    assert grid_by_label()["A_1"].k == 1


def test_grid_per_variant_counts():
    grid = candidate_grid()
    counts = {}
    for e in grid:
        counts[e.family + e.variant] = counts.get(e.family + e.variant, 0) + 1
    assert counts == EXPECTED_GRID_COUNTS
    assert sum(EXPECTED_GRID_COUNTS.values()) == 201


def test_grid_k_family_counts():
    # the four K variants carry 21, 22, 23, 23 members
    grid = candidate_grid()
    ks = [len([e for e in grid if e.family == "K" and e.variant == v])
          for v in ("i", "ii", "iii", "iv")]
    assert ks == [21, 22, 23, 23]


def test_grid_k_gaps():
    # Ki skips k = 21, all K variants stop at their published ends
    grid = candidate_grid()
    ki = sorted(e.k for e in grid if e.family == "K" and e.variant == "i")
    assert 21 not in ki and ki[0] == 3 and ki[-1] == 24
    kii = sorted(e.k for e in grid if e.family == "K" and e.variant == "ii")
    assert kii == list(range(3, 25))
    for v in ("iii", "iv"):
        kv = sorted(e.k for e in grid if e.family == "K" and e.variant == v)
        assert kv == list(range(3, 26))


def test_grid_grams_are_positive_definite_senary():
    for e in candidate_grid():
        assert e.gram.n == 6, e.label
        assert _is_positive_definite(e.gram), e.label


def test_grid_grams_lead_with_family_section():
    from primrep.gram import section

    for e in candidate_grid():
        assert section(e.gram, 5).rows == FIVE_SECTIONS[e.family].rows, e.label


def test_det_formulas_hold_on_all_members():
    grid = candidate_grid()
    for key, (m, c) in DET_FORMULAS.items():
        family, variant = key[0], key[1:]
        members = [e for e in grid if e.family == family and e.variant == variant]
        assert members
        for e in members:
            assert e.gram.det == m * e.k + c, e.label


def test_class_number_one_dets():
    by_label = grid_by_label()
    for label, det in CLASS_NUMBER_ONE:
        assert by_label[label].gram.det == det, label


def test_five_sections_are_rank_five_definite():
    for name, G in FIVE_SECTIONS.items():
        assert G.n == 5, name
        assert _is_positive_definite(G), name
    assert AUX_SECTION_X.n == 5
    assert _is_positive_definite(AUX_SECTION_X)
    assert AUX_SECTION_X.det == 8


def test_quaternary_theorem_lattice_dets():
    assert THM_QUATERNARY_12.det == 12
    assert THM_QUATERNARY_13.det == 13


def test_rule_sections_match_keys():
    for label, rule in QUINARY_EXCEPTION_RULES.items():
        assert rule.label == label
        assert rule.section.rows == FIVE_SECTIONS[label].rows
    for label, rule in SMALL_EXCEPTION_RULES.items():
        assert rule.label == label
    assert SMALL_EXCEPTION_RULES["X"].section.rows == AUX_SECTION_X.rows
    assert set(QUATERNARY_EXCEPTION_RULES) == {"I4", "1122", "1224", "12B33"}


def test_genus_pairs_have_equal_invariants_distinct_classes():
    from primrep.isometry import is_isometric

    for label, sub, mate in GENUS_PAIRS:
        assert sub.det == mate.det, label
        assert genus_agree(sub, mate), label
        assert not is_isometric(sub, mate, use_cache=False), label


def test_anisotropic_quaternaries_are_definite():
    for p, M in ANISOTROPIC_QUATERNARY.items():
        assert M.n == 4
        assert _is_positive_definite(M)


def test_grid_grams_are_minkowski_stable():
    # grid matrices are published in reduced shape up to the first two rows
    for e in candidate_grid()[:12]:
        R, U = minkowski_reduce(e.gram)
        assert R.det == e.gram.det
