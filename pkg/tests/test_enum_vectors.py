import itertools

from primrep.enum_vectors import (check_forms, exceptions_up_to,
                                  first_exception, get_slices,
                                  primitively_represents_binary,
                                  witness_pairs)
from primrep.gram import (GramMatrix, ReducedBinaryForm, eye, diag_lattice,
                          is_primitive_span, osum, reduced_forms_up_to)

A_PLANE = GramMatrix([[2, 1], [1, 2]])
I5 = eye(5)


def brute_witness(L, a, b, c, box=4):
    """Exhaustive primitive-span pair search over a coordinate box."""
    n = L.n
    rng = range(-box, box + 1)
    for v in itertools.product(rng, repeat=n):
        if L.quadratic(v) != a:
            continue
        for w in itertools.product(rng, repeat=n):
            if L.quadratic(w) != c or L.bilinear(v, w) != b:
                continue
            if is_primitive_span([list(v), list(w)]):
                return (v, w)
    return None


def test_witness_pairs_against_box_oracle():
    lat = osum(eye(1), A_PLANE)
    for f in reduced_forms_up_to(6):
        a, b, c = f.coeffs()
        got = next(witness_pairs(lat, a, b, c, use_cache=False), None)
        want = brute_witness(lat, a, b, c)
        assert (got is None) == (want is None), f.coeffs()
        if got is not None:
            v, w = got
            assert lat.quadratic(v) == a
            assert lat.bilinear(v, w) == b
            assert lat.quadratic(w) == c
            assert is_primitive_span([list(v), list(w)])


def test_witness_pairs_accepts_unreduced_coefficients():
    # negative pairing and a > c are realized exactly as requested
    v, w = next(witness_pairs(eye(3), 2, -1, 1, use_cache=False))
    assert eye(3).quadratic(v) == 2
    assert eye(3).bilinear(v, w) == -1
    assert eye(3).quadratic(w) == 1


def test_known_misses_of_the_five_cube():
    assert primitively_represents_binary(I5, ReducedBinaryForm(4, 0, 4)) is None
    assert primitively_represents_binary(I5, ReducedBinaryForm(4, 2, 4)) is None
    hit = primitively_represents_binary(I5, ReducedBinaryForm(3, 1, 3))
    assert hit is not None


def test_exception_order_is_c_then_a_then_b():
    exc = exceptions_up_to(I5, 8, use_cache=False)
    keys = [f.key() for f in exc]
    assert keys == sorted(keys)
    assert exc[0].coeffs() == (4, 0, 4)
    assert (1, 0, 8) in [f.coeffs() for f in exc]
    assert first_exception(I5, 8, use_cache=False).coeffs() == (4, 0, 4)


def test_check_forms_matches_single_queries():
    forms = reduced_forms_up_to(5)
    results = check_forms(I5, forms, use_cache=False)
    assert len(results) == len(forms)
    for f, wit in results:
        single = primitively_represents_binary(I5, f, use_cache=False)
        assert (wit is None) == (single is None)


def test_slice_tables_round_trip_through_disk(tmp_path):
    lat = diag_lattice(1, 2, 5)
    fresh = get_slices(lat, 12, cache_dir=str(tmp_path))
    again = get_slices(lat, 12, cache_dir=str(tmp_path))
    assert fresh.bound >= 12 and again.bound >= 12
    assert (fresh.vecs == again.vecs).all()
    assert (fresh.norms == again.norms).all()
    assert list(tmp_path.iterdir()), "expected a cache file on disk"


def test_primitive_mask_matches_gcd():
    import math

    lat = osum(eye(2), A_PLANE)
    slices = get_slices(lat, 10, use_cache=False)
    for norm in (1, 2, 4):
        rows = slices.matrix(norm)
        mask = slices.primitive_mask(norm)
        assert len(rows) == len(mask) == slices.count(norm)
        for row, flag in zip(rows, mask):
            assert flag == (math.gcd(*[int(x) for x in row]) == 1)
