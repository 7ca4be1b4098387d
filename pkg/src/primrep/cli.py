"""Command line interface for the lattice representation toolkit.

Subcommands map one to one onto the verification suites and the local
decision procedures.  Every run can emit a JSON report (and optionally a
CSV summary); exit codes are 0 for pass, 1 for any failure, 2 when the
only non-passing items are undetermined, 3 for usage errors.
"""

import argparse
import csv
import json
import os
import sys

from . import verify
from .enum_vectors import exceptions_up_to, primitively_represents_binary
from .gram import GramMatrix
from .padic import (LocalTester, core_primes, jordan_decompose,
                    prime_factors)
from .tables import AUX_SECTION_X, FIVE_SECTIONS, grid_by_label

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_UNDETERMINED = 2
EXIT_USAGE = 3


class UsageError(Exception):
    pass


def load_config(path):
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError("cannot read config %s: %s" % (path, exc))
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return cfg


def resolve_settings(args, cfg):
    """Flags beat config; the cache env var beats both, for the cache root only."""
    cache_dir = args.cache_dir or cfg.get("cache_dir")
    env = os.environ.get("PRIMREP_CACHE_DIR")
    if env:
        cache_dir = env
    jobs = args.jobs if args.jobs is not None else cfg.get("jobs", 1)
    cmax = getattr(args, "cmax", None)
    if cmax is None:
        cmax = cfg.get("cmax")
    return {"cache_dir": cache_dir, "jobs": jobs, "cmax": cmax}


def parse_lattice(text):
    """A grid label like Kiv_3, a section letter like F, or a path to
    JSON {"label", "gram"}."""
    grid = grid_by_label()
    if text in grid:
        return text, grid[text].gram
    if text in FIVE_SECTIONS:
        return text, FIVE_SECTIONS[text]
    if text == "X":
        return "X", AUX_SECTION_X
    if os.path.exists(text):
        with open(text) as fh:
            data = json.load(fh)
        try:
            gram = GramMatrix(data["gram"])
        except Exception as exc:
            raise UsageError("bad lattice file %s: %s" % (text, exc))
        return data.get("label", os.path.basename(text)), gram
    raise UsageError("unknown lattice %r (not a grid label, section, or file)" % text)


def exit_code_for(report):
    if report["status"] == "pass":
        return EXIT_PASS
    if report["status"] == "undetermined":
        return EXIT_UNDETERMINED
    return EXIT_FAIL


def emit(report, args):
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["check", "item", "status"])
            for rep in report.get("reports", [report]):
                for item in rep["items"]:
                    writer.writerow([rep["check"], item["item"], item["status"]])
    return exit_code_for(report)


def combine(reports, check="combined"):
    statuses = {r["status"] for r in reports}
    status = ("fail" if "fail" in statuses
              else "pass" if statuses <= {"pass"} else "undetermined")
    return {
        "schema": verify.REPORT_SCHEMA,
        "version": verify.VERSION,
        "check": check,
        "status": status,
        "elapsed": round(sum(r["elapsed"] for r in reports), 3),
        "params": {},
        "items": [{"item": r["check"], "status": r["status"]} for r in reports],
        "reports": reports,
    }


def progress_printer(quiet):
    if quiet:
        return None
    return lambda msg: print(msg, file=sys.stderr, flush=True)


def cmd_gen_candidates(args, settings):
    report = verify.check_candidate_grid(
        cache_dir=settings["cache_dir"],
        progress=progress_printer(args.quiet))
    if args.diff:
        # nonzero exit when the regenerated list disagrees with the file
        with open(args.diff) as fh:
            want = json.load(fh)
        got = [it["item"] for it in report["items"]]
        ok = (report["status"] == "pass"
              and want.get("total") == 201
              and not want.get("missing") and not want.get("extra"))
        report["items"].append(
            {"item": "diff against %s" % args.diff,
             "status": "pass" if ok else "fail",
             "detail": {"expected_items": got}})
        if not ok:
            report["status"] = "fail"
    return emit(report, args)


def cmd_check_universal(args, settings):
    label, gram = parse_lattice(args.lattice)
    cmax = settings["cmax"] or 32
    jobs = settings["jobs"] or 1
    if jobs > 1:
        from .gram import reduced_forms_up_to

        got = verify._sweep_exceptions([(label, gram)],
                                       reduced_forms_up_to(cmax), cmax,
                                       settings["cache_dir"], True, jobs)
        exc_coeffs = [list(e) for e in got[label]]
    else:
        exc = exceptions_up_to(gram, cmax, cache_dir=settings["cache_dir"])
        exc_coeffs = [list(f.coeffs()) for f in exc]
    items = [{"item": "%s represents all forms with c <= %d" % (label, cmax),
              "status": "pass" if not exc_coeffs else "fail",
              "detail": {"exceptions": exc_coeffs}}]
    report = verify._report("check-universal", items,
                            {"lattice": label, "cmax": cmax})
    return emit(report, args)


TABLE_GROUPS = {
    "2": "quinary", "quinary": "quinary",
    "3": "genus", "genus": "genus",
    "4": "quaternary", "quaternary": "quaternary",
    "5": "small", "small": "small",
    "all": "all",
}


def cmd_tables(args, settings):
    group = TABLE_GROUPS.get(args.which)
    if group is None:
        raise UsageError("unknown table group %r" % args.which)
    progress = progress_printer(args.quiet)
    cache = settings["cache_dir"]
    reports = []
    if group in ("quinary", "small", "all"):
        reports.append(verify.check_core_primes())
        reports.append(verify.check_exception_patterns(
            cache_dir=cache, progress=progress))
    if group in ("genus", "all"):
        reports.append(verify.check_genus_pairs())
        reports.append(verify.check_genus_witnesses(
            cache_dir=cache, progress=progress))
    if group in ("quaternary", "all"):
        reports.append(verify.check_quaternary_local(
            cache_dir=cache, progress=progress))
    if group in ("quinary", "small"):
        # keep the single-group reports focused on the requested sections
        keep = {"quinary", "small"} & {group}
        for rep in reports:
            if rep["check"] in ("core-primes", "exception-patterns"):
                rep["items"] = [it for it in rep["items"]
                                if it["item"].split()[0] in keep]
    report = combine(reports, "tables-%s" % group)
    return emit(report, args)


def cmd_local_test(args, settings):
    label, gram = parse_lattice(args.lattice)
    a, b, c = args.form
    form = GramMatrix([[a, b], [b, c]])
    primes = [args.p] if args.p else sorted(
        set([2]) | set(prime_factors(gram.det)))
    tester = LocalTester(gram)
    items = []
    for p in primes:
        verdict = tester.test(form, p, effort=args.effort)
        items.append({"item": "%s represents (%d,%d,%d) over Z_%d"
                      % (label, a, b, c, p),
                      "status": {"true": "pass", "false": "fail"}.get(
                          verdict.status, "undetermined"),
                      "detail": {"verdict": verdict.status,
                                 "note": verdict.detail}})
    report = verify._report("local-test", items,
                            {"lattice": label, "form": [a, b, c],
                             "effort": args.effort})
    return emit(report, args)


def cmd_core_prime(args, settings):
    label, gram = parse_lattice(args.lattice)
    try:
        primes = core_primes(gram)
    except ValueError as exc:
        raise UsageError(str(exc))
    items = [{"item": "core primes of %s" % label,
              "status": "pass",
              "detail": {"primes": primes}}]
    report = verify._report("core-prime", items, {"lattice": label})
    return emit(report, args)


def cmd_jordan(args, settings):
    label, gram = parse_lattice(args.lattice)
    primes = [args.p] if args.p else sorted(
        set([2]) | set(prime_factors(gram.det)))
    items = []
    for p in primes:
        split = jordan_decompose(gram, p)
        items.append({"item": "%s at %d" % (label, p),
                      "status": "pass",
                      "detail": {
                          "scales": list(split.scales()),
                          "blocks": [repr(b) for b in split.blocks],
                          "symbol": {str(s): list(v) for s, v
                                     in split.symbol().items()}}})
    report = verify._report("jordan", items, {"lattice": label})
    return emit(report, args)


def cmd_thm_conditions(args, settings):
    which = args.which
    if which == "all":
        reports = [verify.check_quaternary_conditions(
            w, cache_dir=settings["cache_dir"]) for w in ("det12", "det13")]
        report = combine(reports, "thm-conditions")
    else:
        report = verify.check_quaternary_conditions(
            which, cache_dir=settings["cache_dir"])
    return emit(report, args)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="write the JSON report here")
    common.add_argument("--csv", help="write a CSV summary here")
    common.add_argument("--cache-dir", help="cache root for vector tables")
    common.add_argument("--jobs", type=int, help="worker count for sweeps")
    common.add_argument("--quiet", action="store_true",
                        help="suppress progress output")

    parser = argparse.ArgumentParser(
        prog="primrep", parents=[common],
        description="Primitive representation of binary forms by integral lattices")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("gen-candidates", parents=[common],
                       help="regenerate the candidate classification")
    p.add_argument("--diff", help="JSON file of expected totals to compare")
    p.set_defaults(func=cmd_gen_candidates)

    p = sub.add_parser("check-universal", parents=[common],
                       help="exception sweep for one lattice")
    p.add_argument("lattice", help="grid label or JSON lattice file")
    p.add_argument("--cmax", type=int, help="largest c to test (default 32)")
    p.set_defaults(func=cmd_check_universal)

    p = sub.add_parser("tables", parents=[common],
                       help="verify one group of published tables")
    p.add_argument("--which", default="all",
                   help="2|quinary, 3|genus, 4|quaternary, 5|small, or all")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("local-test", parents=[common],
                       help="local primitive representation verdict")
    p.add_argument("lattice", help="grid label or JSON lattice file")
    p.add_argument("form", nargs=3, type=int, metavar=("A", "B", "C"),
                   help="binary form coefficients a b c")
    p.add_argument("-p", type=int, help="single prime (default: p | 2 det)")
    p.add_argument("--effort", type=int, default=0,
                   help="extra residue depth for the exclusion test")
    p.set_defaults(func=cmd_local_test)

    p = sub.add_parser("core-prime", parents=[common],
                       help="core primes of a quinary lattice")
    p.add_argument("lattice", help="grid label or JSON lattice file")
    p.set_defaults(func=cmd_core_prime)

    p = sub.add_parser("jordan", parents=[common],
                       help="Jordan decomposition at p")
    p.add_argument("lattice", help="grid label or JSON lattice file")
    p.add_argument("-p", type=int, help="single prime (default: p | 2 det)")
    p.set_defaults(func=cmd_jordan)

    p = sub.add_parser("thm-conditions", parents=[common],
                       help="sufficient-condition checks for the quaternary complements")
    p.add_argument("--which", default="all", choices=("det12", "det13", "all"))
    p.set_defaults(func=cmd_thm_conditions)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_help()
        return EXIT_USAGE
    try:
        cfg = load_config(args.config)
        settings = resolve_settings(args, cfg)
        return args.func(args, settings)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
