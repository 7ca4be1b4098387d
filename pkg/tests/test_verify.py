"""Verification suite plumbing and the fast whole-suite checks.

Slow sweeps (grid regeneration, universality, transfer soundness) run in
the acceptance tests; here the quick suites and report mechanics are
covered.
"""

from primrep.verify import (
    REPORT_SCHEMA,
    _item,
    _report,
    _spread,
    check_anisotropic_exclusions,
    check_core_primes,
    check_determinants,
    check_genus_pairs,
    check_genus_witnesses,
    check_hilbert_reciprocity,
    check_quaternary_conditions,
)

REPORT_KEYS = {"schema", "version", "check", "status", "elapsed", "params", "items"}


def test_item_status_mapping():
    assert _item("x", True)["status"] == "pass"
    assert _item("x", False)["status"] == "fail"
    assert _item("x", None)["status"] == "undetermined"
    assert _item("x", True, {"k": 1})["detail"] == {"k": 1}
    assert "detail" not in _item("x", True)


def test_report_aggregation_order():
    mk = lambda *oks: _report("t", [_item("i%d" % n, ok) for n, ok in enumerate(oks)],
                              elapsed=0.0)
    assert mk(True, True)["status"] == "pass"
    assert mk(True, None)["status"] == "undetermined"
    assert mk(True, None, False)["status"] == "fail"
    assert mk()["status"] == "pass"
    assert REPORT_KEYS <= set(mk(True))


def test_spread_picks_extremes_and_middle():
    assert _spread([1, 2, 3, 4, 5], 3) == [1, 3, 5]
    assert _spread([1, 2], 3) == [1, 2]
    assert _spread([7], 2) == [7]


def test_core_primes_suite_passes():
    rep = check_core_primes()
    assert rep["status"] == "pass"
    assert rep["check"] == "core-primes"
    assert REPORT_KEYS <= set(rep)
    assert rep["schema"] == REPORT_SCHEMA
    # one item per rank five rule section
    assert len(rep["items"]) == 11


def test_determinants_suite_passes():
    rep = check_determinants()
    assert rep["status"] == "pass"
    names = [it["item"] for it in rep["items"]]
    assert any("Kii" in n for n in names)


def test_genus_pairs_suite_passes():
    rep = check_genus_pairs()
    assert rep["status"] == "pass"


def test_genus_witnesses_suite_passes():
    rep = check_genus_witnesses()
    assert rep["status"] == "pass"


def test_anisotropic_suite_passes():
    rep = check_anisotropic_exclusions()
    assert rep["status"] == "pass"
    assert len(rep["items"]) == 4


def test_hilbert_suite_passes_and_is_deterministic():
    rep1 = check_hilbert_reciprocity(count=120, seed=7)
    rep2 = check_hilbert_reciprocity(count=120, seed=7)
    assert rep1["status"] == "pass"
    assert rep1["items"] == rep2["items"]
    assert rep1["params"]["count"] == 120


def test_quaternary_conditions_suite_passes_quickly():
    rep = check_quaternary_conditions(which="det13", cmax=10)
    assert rep["status"] == "pass"
    assert rep["params"]["which"] == "det13"


def test_universality_parallel_matches_serial(tmp_path):
    from primrep.verify import check_universality

    labels = ("A_1", "A_2")
    serial = check_universality(labels=labels, cmax=6, jobs=1, use_cache=False)
    pooled = check_universality(labels=labels, cmax=6, jobs=2, use_cache=False,
                                resume_dir=str(tmp_path / "resume"))
    strip = lambda rep: [(it["item"], it["status"], it["detail"]["exceptions"])
                         for it in rep["items"]]
    assert strip(serial) == strip(pooled)
    # second run resumes from the per-lattice records
    again = check_universality(labels=labels, cmax=6, jobs=1, use_cache=False,
                               resume_dir=str(tmp_path / "resume"))
    assert all(it["detail"]["resumed"] for it in again["items"])
    assert strip(again) == strip(serial)
    # a larger request invalidates the stored sweeps
    deeper = check_universality(labels=("A_1",), cmax=8, jobs=1, use_cache=False,
                                resume_dir=str(tmp_path / "resume"))
    assert not deeper["items"][0]["detail"]["resumed"]
