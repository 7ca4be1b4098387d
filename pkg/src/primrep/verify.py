"""Verification suites over the frozen tables, rules, and generators.

Every suite recomputes one family of claims from scratch and returns a
report dict: {"schema", "check", "status", "elapsed", "params", "items"}.
Item statuses are "pass", "fail", or "undetermined"; a failing item always
carries enough data to replay the counterexample by hand.  Suites never
mutate the tables they check.
"""

import json
import os
import time

from .enum_vectors import (exceptions_up_to, get_slices,
                           primitively_represents_binary, witness_pairs)
from .escalate import generate_candidates
from .gram import (GramMatrix, ReducedBinaryForm, SpanWitness, diag_lattice,
                   osum, reduced_forms_up_to)
from .isometry import find_embedding, is_isometric
from .padic import (LocalTester, anisotropic_exclusion_holds,
                    classify_binary_local, core_primes, genus_agree,
                    hilbert_symbol, jordan_decompose, least_nonresidue,
                    legendre, prime_factors, represents_square_class,
                    represents_unit, represents_value, z2_invariants)
from .tables import (ANISOTROPIC_QUATERNARY, CLASS_NUMBER_ONE, DET_FORMULAS,
                     EVEN_PLANE, EXPECTED_GRID_COUNTS, GENUS_PAIRS,
                     QUATERNARY_EXCEPTION_RULES, QUINARY_EXCEPTION_RULES,
                     SMALL_EXCEPTION_RULES, THM_QUATERNARY_12,
                     THM_QUATERNARY_13, candidate_grid, grid_by_label)
from .transfer import find_transfer_witness, load_rules

REPORT_SCHEMA = 1
VERSION = "0.1.0"


def _item(name, ok, detail=None):
    status = "pass" if ok else "fail" if ok is not None else "undetermined"
    if ok is None:
        status = "undetermined"
    out = {"item": name, "status": status}
    if detail is not None:
        out["detail"] = detail
    return out


def _report(check, items, params=None, elapsed=None, t0=None):
    if elapsed is None and t0 is not None:
        elapsed = time.time() - t0
    statuses = {it["status"] for it in items}
    if "fail" in statuses:
        status = "fail"
    elif statuses <= {"pass"}:
        status = "pass"
    else:
        status = "undetermined"
    return {
        "schema": REPORT_SCHEMA,
        "version": VERSION,
        "check": check,
        "status": status,
        "elapsed": round(elapsed or 0.0, 3),
        "params": params or {},
        "items": items,
    }


def _coeffs(form):
    if isinstance(form, ReducedBinaryForm):
        return list(form.coeffs())
    return list(form)


# ---------------------------------------------------------------------------
# candidate grid regeneration


def check_candidate_grid(prune_cmax=64, cache_dir=None, use_cache=True,
                         progress=None):
    """Regenerate the rank-6 classification and compare it with the grid."""
    t0 = time.time()
    res = generate_candidates(prune_cmax=prune_cmax, cache_dir=cache_dir,
                              use_cache=use_cache, progress=progress)
    items = [
        _item("total is 201", res["total"] == 201, {"total": res["total"]}),
        _item("no grid member missing", not res["missing"],
              {"missing": sorted(res["missing"])}),
        _item("no candidate outside the grid", not res["extra"],
              {"extra": [list(map(list, g)) for g in res["extra"]]}),
    ]
    counts = {}
    for rec in res["candidates"]:
        if rec.label is None:
            continue
        key = rec.family + rec.variant
        counts[key] = counts.get(key, 0) + 1
    items.append(_item("per-variant cell counts", counts == EXPECTED_GRID_COUNTS,
                       {"counts": counts}))
    return _report("candidate-grid", items, {"prune_cmax": prune_cmax}, t0=t0)


# ---------------------------------------------------------------------------
# witness sweep


def _resume_path(resume_dir, label):
    return os.path.join(resume_dir, "sweep-%s.json" % label)


_SWEEP_ENV = {}


def _sweep_init(cmax, cache_dir, use_cache):
    _SWEEP_ENV["cmax"] = cmax
    _SWEEP_ENV["cache_dir"] = cache_dir
    _SWEEP_ENV["use_cache"] = use_cache


def _sweep_eval(task):
    """One (lattice, form) task; workers keep slice tables warm per lattice."""
    rows, coeffs = task
    G = GramMatrix(rows)
    slices = get_slices(G, _SWEEP_ENV["cmax"], _SWEEP_ENV["cache_dir"],
                        _SWEEP_ENV["use_cache"])
    form = ReducedBinaryForm(*coeffs)
    return primitively_represents_binary(G, form, slices) is not None


def _sweep_exceptions(pending, forms, cmax, cache_dir, use_cache, jobs):
    """Exception lists per label, over a fixed pool of (lattice, form) tasks.

    Tasks go out in (lattice, form) order; the merge consumes results in
    that same order on this thread, so output is independent of scheduling.
    """
    out = {label: [] for label, _ in pending}
    meta = [(label, f) for label, gram in pending for f in forms]
    tasks = [(gram.rows, f.coeffs())
             for label, gram in pending for f in forms]
    if jobs > 1 and len(tasks) > 1:
        import multiprocessing

        with multiprocessing.Pool(jobs, initializer=_sweep_init,
                                  initargs=(cmax, cache_dir, use_cache)) as pool:
            results = pool.imap(_sweep_eval, tasks, chunksize=64)
            for (label, f), ok in zip(meta, results):
                if not ok:
                    out[label].append(f.coeffs())
    else:
        _sweep_init(cmax, cache_dir, use_cache)
        for (label, f), task in zip(meta, tasks):
            if not _sweep_eval(task):
                out[label].append(f.coeffs())
    return out


def check_universality(labels=None, cmax=32, cache_dir=None, use_cache=True,
                       resume_dir=None, progress=None, jobs=1):
    """Primitive witnesses for every reduced form with c <= cmax, per lattice.

    With resume_dir set, finished lattices persist one small JSON each and
    are skipped on rerun as long as their recorded cmax is sufficient.
    """
    t0 = time.time()
    grid = grid_by_label()
    if labels is None:
        labels = [e.label for e in candidate_grid()]
    if resume_dir:
        os.makedirs(resume_dir, exist_ok=True)
    resumed = {}
    pending = []
    for label in labels:
        cached = None
        if resume_dir:
            path = _resume_path(resume_dir, label)
            if os.path.exists(path):
                with open(path) as fh:
                    rec = json.load(fh)
                if rec.get("cmax", 0) >= cmax:
                    cached = rec
        if cached is not None:
            resumed[label] = [tuple(x) for x in cached["exceptions"]]
        else:
            pending.append((label, grid[label].gram))
    computed = {}
    if pending:
        forms = reduced_forms_up_to(cmax)
        if jobs > 1:
            computed = _sweep_exceptions(pending, forms, cmax, cache_dir,
                                         use_cache, jobs)
        else:
            for label, gram in pending:
                computed[label] = [
                    f.coeffs() for f in
                    exceptions_up_to(gram, cmax, cache_dir=cache_dir,
                                     use_cache=use_cache)]
                if progress:
                    progress("%s: %d exceptions"
                             % (label, len(computed[label])))
        if resume_dir:
            for label, exc in computed.items():
                with open(_resume_path(resume_dir, label), "w") as fh:
                    json.dump({"label": label, "cmax": cmax,
                               "exceptions": [list(e) for e in exc]}, fh)
    items = []
    for label in labels:
        was_resumed = label in resumed
        exc = resumed[label] if was_resumed else computed[label]
        items.append(_item(label, not exc,
                           {"exceptions": [list(e) for e in exc],
                            "resumed": was_resumed}))
    return _report("universality-sweep", items,
                   {"cmax": cmax, "lattices": len(labels), "jobs": jobs},
                   t0=t0)


# ---------------------------------------------------------------------------
# core primes and exception patterns


def check_core_primes():
    t0 = time.time()
    items = []
    for group, rules in (("quinary", QUINARY_EXCEPTION_RULES),
                         ("small", SMALL_EXCEPTION_RULES)):
        for label in sorted(rules):
            rule = rules[label]
            found = core_primes(rule.section)
            items.append(_item("%s %s" % (group, label),
                               found == [rule.core_prime],
                               {"expected": rule.core_prime, "found": found}))
    return _report("core-primes", items, t0=t0)


def check_exception_patterns(cmax=24, cache_dir=None, use_cache=True,
                             progress=None):
    """Every global exception of each tabulated section matches a listed
    local pattern at its core prime (the necessary direction only)."""
    t0 = time.time()
    items = []
    for group, rules in (("quinary", QUINARY_EXCEPTION_RULES),
                         ("small", SMALL_EXCEPTION_RULES)):
        for label in sorted(rules):
            rule = rules[label]
            exc = exceptions_up_to(rule.section, cmax, cache_dir=cache_dir,
                                   use_cache=use_cache)
            unmatched = [f.coeffs() for f in exc if not rule.matches(f)]
            items.append(_item("%s %s" % (group, label), not unmatched,
                               {"exceptions": len(exc),
                                "unmatched": [list(u) for u in unmatched]}))
            if progress:
                progress("%s %s: %d exceptions, %d unmatched"
                         % (group, label, len(exc), len(unmatched)))
    return _report("exception-patterns", items, {"cmax": cmax}, t0=t0)


# ---------------------------------------------------------------------------
# determinants and genus pairs


def check_determinants():
    t0 = time.time()
    grid = grid_by_label()
    items = []
    for prefix in sorted(DET_FORMULAS):
        m, c = DET_FORMULAS[prefix]
        bad = []
        n = 0
        for entry in candidate_grid():
            if entry.family + entry.variant != prefix:
                continue
            n += 1
            if entry.gram.det != m * entry.k + c:
                bad.append(entry.label)
        items.append(_item("det(%s_k) = %dk%+d" % (prefix, m, c),
                           n > 0 and not bad, {"members": n, "mismatch": bad}))
    dets = [grid[label].gram.det for label, _ in CLASS_NUMBER_ONE]
    want = [d for _, d in CLASS_NUMBER_ONE]
    items.append(_item("class-number-one determinant list", dets == want,
                       {"labels": [l for l, _ in CLASS_NUMBER_ONE],
                        "expected": want, "found": dets}))
    return _report("determinants", items, t0=t0)


def check_genus_pairs():
    """Each tabulated pair lies in one genus without being isometric."""
    t0 = time.time()
    items = []
    for label, left, right in GENUS_PAIRS:
        same_genus = genus_agree(left, right)
        distinct = not is_isometric(left, right)
        items.append(_item(label, same_genus and distinct,
                           {"genus_agree": same_genus,
                            "isometric": not distinct}))
    return _report("genus-pairs", items, t0=t0)


def check_genus_witnesses(cache_dir=None, use_cache=True, progress=None):
    """The class-number-two sublattice and its mate both embed primitively
    in the senary lattice whose label names the pair."""
    t0 = time.time()
    grid = grid_by_label()
    items = []
    for label, left, right in GENUS_PAIRS:
        if label not in grid:
            continue
        host = grid[label].gram
        for tag, sub in (("sublattice", left), ("mate", right)):
            rows = find_embedding(sub, host, require_primitive=True,
                                  cache_dir=cache_dir, use_cache=use_cache)
            ok = rows is not None
            detail = {"rows": [list(r) for r in rows]} if ok else None
            if ok:
                wit = SpanWitness(host, rows)
                ok = wit.induced_gram() == sub and wit.is_primitive()
            items.append(_item("%s %s embeds primitively" % (label, tag),
                               ok, detail))
            if progress:
                progress("%s %s: %s" % (label, tag, "ok" if ok else "MISSING"))
    return _report("genus-witnesses", items, t0=t0)


# ---------------------------------------------------------------------------
# transfer soundness


def _spread(values, count):
    vals = sorted(set(values))
    if len(vals) <= count:
        return vals
    picks = {vals[0], vals[-1], vals[len(vals) // 2]}
    i = 0
    while len(picks) < count:
        picks.add(vals[i % len(vals)])
        i += 1
    return sorted(picks)


def check_transfer_soundness(cmax=24, targets_per_rule=3, cache_dir=None,
                             use_cache=True, progress=None):
    """Whenever a rule fires on a form, the witness revalidates exactly and
    the global search confirms the representation independently."""
    t0 = time.time()
    forms = reduced_forms_up_to(cmax)
    items = []
    for rule in load_rules():
        ks = _spread([t.k for t in rule.targets], targets_per_rule)
        chosen = []
        for t in rule.targets:
            if t.k in ks and all(c.label != t.label for c in chosen):
                chosen.append(t)
        aux_slices = get_slices(rule.aux, rule.q * cmax, cache_dir, use_cache)
        for target in chosen:
            fired = 0
            bad = []
            tgt_slices = get_slices(target.gram, cmax, cache_dir, use_cache)
            for form in forms:
                witness = find_transfer_witness(rule, target, form,
                                                slices=aux_slices)
                if witness is None:
                    continue
                fired += 1
                goal = form.gram()
                if not witness.validate(goal):
                    bad.append({"form": _coeffs(form), "reason": "revalidation"})
                    continue
                if primitively_represents_binary(target.gram, form,
                                                 tgt_slices) is None:
                    bad.append({"form": _coeffs(form), "reason": "global-miss"})
            items.append(_item("%s -> %s" % (rule.name, target.label),
                               not bad,
                               {"forms": len(forms), "fired": fired,
                                "failures": bad}))
            if progress:
                progress("%s -> %s: fired %d/%d"
                         % (rule.name, target.label, fired, len(forms)))
    return _report("transfer-soundness", items,
                   {"cmax": cmax, "targets_per_rule": targets_per_rule}, t0=t0)


# ---------------------------------------------------------------------------
# local arithmetic suites


def check_anisotropic_exclusions():
    """No primitive vector lands deep in pZ_p for the anisotropic cases."""
    t0 = time.time()
    items = [_item("even plane at 2", anisotropic_exclusion_holds(EVEN_PLANE, 2))]
    for p in sorted(ANISOTROPIC_QUATERNARY):
        lat = ANISOTROPIC_QUATERNARY[p]
        items.append(_item("quaternary at %d" % p,
                           anisotropic_exclusion_holds(lat, p),
                           {"gram": [list(r) for r in lat.rows]}))
    return _report("anisotropic-exclusions", items, t0=t0)


def check_hilbert_reciprocity(count=500, seed=20260816):
    """Product of local symbols over all places is 1 on random pairs."""
    import random

    t0 = time.time()
    rng = random.Random(seed)
    bad = []
    for _ in range(count):
        a = rng.randint(-10**6, 10**6) or 1
        b = rng.randint(-10**6, 10**6) or -1
        prod = hilbert_symbol(a, b, "inf")
        for p in sorted(prime_factors(2 * abs(a) * abs(b))):
            prod *= hilbert_symbol(a, b, p)
        if prod != 1:
            bad.append([a, b])
    items = [_item("product over places is 1", not bad,
                   {"pairs": count, "violations": bad})]
    return _report("hilbert-reciprocity", items,
                   {"count": count, "seed": seed}, t0=t0)


DEFAULT_LOCAL_GLOBAL_LABELS = (
    "A_1", "A_2", "Bi_5", "Bii_6", "C_3", "Di_6", "Dii_8", "Diii_5",
    "Ei_8", "Eii_9", "F_3", "Gi_18", "Gii_19", "Hii_5", "Hiv_6", "Ii_2",
    "Iii_5", "J_3", "Kii_24", "Kiv_25",
)


def check_local_global(labels=DEFAULT_LOCAL_GLOBAL_LABELS, cmax=24,
                       efforts=(0, 2), cache_dir=None, use_cache=True,
                       progress=None):
    """Local verdicts never contradict global witnesses, and positive
    verdicts are stable under extra effort."""
    t0 = time.time()
    grid = grid_by_label()
    forms = reduced_forms_up_to(cmax)
    items = []
    for label in labels:
        entry = grid[label]
        tester = LocalTester(entry.gram)
        primes = sorted(set([2]) | set(prime_factors(entry.gram.det)))
        slices = get_slices(entry.gram, cmax, cache_dir, use_cache)
        false_against_witness = []
        unstable = []
        statuses = {"true": 0, "false": 0, "undetermined": 0}
        for form in forms:
            witness = primitively_represents_binary(entry.gram, form, slices)
            for p in primes:
                v0 = tester.test(form, p, effort=efforts[0])
                statuses[v0.status] += 1
                if witness is not None and v0.status == "false":
                    false_against_witness.append({"form": _coeffs(form), "p": p})
                if len(efforts) > 1:
                    v1 = tester.test(form, p, effort=efforts[1])
                    if v0.status == "true" and v1.status != "true":
                        unstable.append({"form": _coeffs(form), "p": p})
                    if v0.status == "false" and v1.status != "false":
                        unstable.append({"form": _coeffs(form), "p": p})
        items.append(_item(label, not false_against_witness and not unstable,
                           {"primes": primes, "statuses": statuses,
                            "false_with_witness": false_against_witness,
                            "unstable": unstable}))
        if progress:
            progress("%s: %r" % (label, statuses))
    return _report("local-global", items,
                   {"cmax": cmax, "lattices": len(labels),
                    "efforts": list(efforts)}, t0=t0)


# ---------------------------------------------------------------------------
# quaternary local tables


def _canonical_binary_reps(max_scale_val):
    """Representative binary forms of the 2-adic classes with scale
    valuation up to the bound: split diagonal classes plus scaled even
    planes of both determinant types."""
    reps = []
    for r in range(max_scale_val + 1):
        for s in range(r, max_scale_val + 1):
            for u1 in (1, 3, 5, 7):
                for u2 in (1, 3, 5, 7):
                    if r == s and u2 < u1:
                        continue
                    reps.append(((2**r) * u1, 0, (2**s) * u2))
    for r in range(max_scale_val + 1):
        reps.append((2**r * 2, 2**r, 2**r * 2))      # scaled plane, det 3 type
        reps.append((0, 2**r, 0))                    # scaled plane, det -1 type
    return reps


def check_quaternary_local(max_scale_val=8, true_cbound=112, cache_dir=None,
                           use_cache=True, progress=None):
    """Every 2-adic class with bounded scale is classified; classes the
    reachability test excludes must match a listed pattern, and classes
    matching a pattern must not carry a small global witness."""
    t0 = time.time()
    reps = _canonical_binary_reps(max_scale_val)
    items = []
    for label in sorted(QUATERNARY_EXCEPTION_RULES):
        rule = QUATERNARY_EXCEPTION_RULES[label]
        tester = LocalTester(rule.section)
        depth = tester._depth(2, 2)
        reach = tester.reach(2, depth)
        m = 2**depth
        unclassified = []
        excluded_unmatched = []
        contradicted = []
        excluded = matched = 0
        slices = get_slices(rule.section, true_cbound, cache_dir, use_cache)
        for (a, b, c) in reps:
            form = GramMatrix([[a, b], [b, c]])
            try:
                classify_binary_local(form, 2)
            except Exception as exc:  # noqa: BLE001 - report, never raise
                unclassified.append({"form": [a, b, c], "error": repr(exc)})
                continue
            is_matched = rule.matches(form)
            if is_matched:
                matched += 1
            if not reach[4, a % m, b % m, c % m]:
                excluded += 1
                if not is_matched:
                    excluded_unmatched.append([a, b, c])
            if is_matched and 0 < a <= true_cbound and 0 < c <= true_cbound:
                found = next(witness_pairs(rule.section, a, b, c, slices), None)
                if found is not None:
                    contradicted.append([a, b, c])
        ok = not unclassified and not excluded_unmatched and not contradicted
        items.append(_item(label, ok,
                           {"classes": len(reps), "excluded": excluded,
                            "matched": matched,
                            "unclassified": unclassified,
                            "excluded_unmatched": excluded_unmatched,
                            "witness_contradicts": contradicted}))
        if progress:
            progress("%s: %d classes, %d excluded, %d matched"
                     % (label, len(reps), excluded, matched))
    return _report("quaternary-local", items,
                   {"max_scale_val": max_scale_val,
                    "true_cbound": true_cbound}, t0=t0)


# ---------------------------------------------------------------------------
# quaternary complement conditions


def _symbols_match(a, b, p):
    return jordan_decompose(a, p).symbol() == jordan_decompose(b, p).symbol()


def conditions_det12(form):
    """Sufficient local conditions for the determinant-12 quaternary."""
    f = form.gram() if isinstance(form, ReducedBinaryForm) else form
    a = f.rows[0][0]
    c = f.rows[1][1]
    # norm ideal inside 2Z_2: the diagonal values generate it
    if a % 2 or c % 2:
        return False
    if not any(represents_value(f, 2, t) for t in (6, -2, 4, 20)):
        return False
    d3 = least_nonresidue(3)
    if not (represents_square_class(f, 3, d3) or represents_square_class(f, 3, 3)):
        return False
    det = f.det
    for p in prime_factors(2 * det):
        if p % 12 in (5, 7) and not represents_unit(f, p):
            return False
    return True


def conditions_det13(form):
    """Sufficient local conditions for the determinant-13 quaternary."""
    f = form.gram() if isinstance(form, ReducedBinaryForm) else form
    a = f.rows[0][0]
    c = f.rows[1][1]
    if a % 2 or c % 2:
        return False
    if not any(represents_square_class(f, 2, 2 * u) for u in (1, 3, 5, 7)):
        return False
    if not (represents_square_class(f, 13, 1) or
            represents_square_class(f, 13, 13)):
        return False
    det = f.det
    for p in prime_factors(2 * det):
        if p not in (2, 13) and legendre(13, p) == -1 and not represents_unit(f, p):
            return False
    return True


def check_quaternary_conditions(which="det12", cmax=24, cache_dir=None,
                                use_cache=True, progress=None):
    """The sufficient-condition bundle implies a global witness on the
    c <= cmax corpus, and the stated local splittings hold."""
    t0 = time.time()
    items = []
    H = GramMatrix([[0, 1], [1, 0]])
    if which == "det12":
        N = THM_QUATERNARY_12
        M = osum(GramMatrix([[2]]), N)
        conds = conditions_det12
        items.append(_item("det N = 12", N.det == 12, {"det": N.det}))
        items.append(_item("det M = 24", M.det == 24, {"det": M.det}))
        split2 = jordan_decompose(N, 2)
        sym2 = split2.symbol()
        shape_ok = (split2.scales() == (0, 1)
                    and sym2[0][0] == 2 and sym2[0][1] == "even"
                    and sym2[1][0] == 2 and sym2[1][1] == "odd")
        items.append(_item(
            "N at 2: even unimodular plane + rank 2 at scale 1", shape_ok,
            {"scales": list(split2.scales())}))
        alt_a = osum(EVEN_PLANE, diag_lattice(-2, -2))
        alt_h = osum(H, diag_lattice(6, -2))
        items.append(_item("N at 2 matches plane + <-2, -2> on invariants",
                           z2_invariants(N) == z2_invariants(alt_a)))
        items.append(_item("the two stated 2-adic shapes agree on invariants",
                           z2_invariants(alt_a) == z2_invariants(alt_h)))
        d3 = least_nonresidue(3)
        items.append(_item(
            "N at 3 splits as plane + <nonresidue, 3>",
            _symbols_match(N, osum(H, GramMatrix([[d3, 0], [0, 3]])), 3)))
        items.append(_item(
            "M at 3 splits as plane + <1, 1, 3>",
            _symbols_match(M, osum(H, GramMatrix([[1, 0, 0], [0, 1, 0], [0, 0, 3]])), 3)))
        gate = all((p % 12 in (5, 7)) == (legendre(3, p) == -1)
                   for p in range(5, 200)
                   if prime_factors(p) == [p] and p != 3)
        items.append(_item("mod-12 gate matches the symbol for p < 200", gate))
    elif which == "det13":
        N = THM_QUATERNARY_13
        conds = conditions_det13
        items.append(_item("det N = 13", N.det == 13, {"det": N.det}))
        gate = all(legendre(13, p) == legendre(p, 13)
                   for p in range(3, 200)
                   if prime_factors(p) == [p] and p != 13)
        items.append(_item("reciprocity gate for the 13 symbol, p < 200", gate))
    else:
        raise ValueError("which must be det12 or det13")
    forms = reduced_forms_up_to(cmax)
    slices = get_slices(N, cmax, cache_dir, use_cache)
    satisfied = 0
    missed = []
    for form in forms:
        if not conds(form):
            continue
        satisfied += 1
        if primitively_represents_binary(N, form, slices) is None:
            missed.append(_coeffs(form))
    items.append(_item("conditions imply a global witness", not missed,
                       {"forms": len(forms), "satisfied": satisfied,
                        "missed": missed}))
    if progress:
        progress("%s: %d/%d satisfied" % (which, satisfied, len(forms)))
    return _report("quaternary-conditions", items,
                   {"which": which, "cmax": cmax}, t0=t0)
