"""Command line surface: argument precedence, exit codes, report output."""

import json
import types

import pytest

from primrep.cli import (
    EXIT_FAIL,
    EXIT_PASS,
    EXIT_UNDETERMINED,
    EXIT_USAGE,
    UsageError,
    combine,
    exit_code_for,
    load_config,
    main,
    parse_lattice,
    resolve_settings,
)


def _args(**kw):
    base = {"cache_dir": None, "jobs": None, "cmax": None}
    base.update(kw)
    return types.SimpleNamespace(**base)


def test_settings_flag_beats_config(monkeypatch):
    monkeypatch.delenv("PRIMREP_CACHE_DIR", raising=False)
    cfg = {"cache_dir": "/from/config", "jobs": 4, "cmax": 48}
    got = resolve_settings(_args(cache_dir="/from/flag", jobs=2), cfg)
    assert got["cache_dir"] == "/from/flag"
    assert got["jobs"] == 2
    assert got["cmax"] == 48


def test_settings_env_beats_flag_for_cache_only(monkeypatch):
    monkeypatch.setenv("PRIMREP_CACHE_DIR", "/from/env")
    cfg = {"cache_dir": "/from/config", "jobs": 4}
    got = resolve_settings(_args(cache_dir="/from/flag", jobs=2), cfg)
    assert got["cache_dir"] == "/from/env"
    # env var must not touch the other knobs
    assert got["jobs"] == 2


def test_settings_defaults(monkeypatch):
    monkeypatch.delenv("PRIMREP_CACHE_DIR", raising=False)
    got = resolve_settings(_args(), {})
    assert got["cache_dir"] is None
    assert got["jobs"] == 1
    assert got["cmax"] is None


def test_load_config_roundtrip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"jobs": 3}))
    assert load_config(str(path)) == {"jobs": 3}
    assert load_config(None) == {}
    with pytest.raises(UsageError):
        load_config(str(tmp_path / "missing.json"))


def test_parse_lattice_sources(tmp_path):
    label, gram = parse_lattice("A_1")
    assert label == "A_1" and gram.n == 6
    label, gram = parse_lattice("F")
    assert gram.n == 5
    label, gram = parse_lattice("X")
    assert gram.det == 8
    path = tmp_path / "lat.json"
    path.write_text(json.dumps({"label": "two", "gram": [[1, 0], [0, 1]]}))
    label, gram = parse_lattice(str(path))
    assert label == "two" and gram.n == 2
    with pytest.raises(UsageError):
        parse_lattice("definitely-not-a-label")


def test_exit_codes_from_reports():
    assert exit_code_for({"status": "pass"}) == EXIT_PASS
    assert exit_code_for({"status": "fail"}) == EXIT_FAIL
    assert exit_code_for({"status": "undetermined"}) == EXIT_UNDETERMINED


def test_combine_merges_subreports():
    a = {"schema": 1, "check": "a", "status": "pass", "elapsed": 0.0,
         "params": {}, "items": []}
    b = dict(a, check="b", status="undetermined")
    rep = combine([a, b], "both")
    assert rep["status"] == "undetermined"
    assert [s["check"] for s in rep["reports"]] == ["a", "b"]


def test_main_without_command_is_usage(capsys):
    assert main([]) == EXIT_USAGE


def test_main_unknown_lattice_is_usage(capsys):
    code = main(["core-prime", "definitely-not-a-label", "--quiet"])
    assert code == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_main_core_prime_senary_is_usage(capsys):
    # core primes are defined for quinary sections only
    code = main(["core-prime", "A_1", "--quiet"])
    assert code == EXIT_USAGE


def test_main_local_test_true_verdict(tmp_path, capsys):
    out = tmp_path / "rep.json"
    code = main(["local-test", "A", "1", "0", "1", "-p", "2",
                 "--quiet", "--out", str(out)])
    assert code == EXIT_PASS
    rep = json.loads(out.read_text())
    assert rep["status"] == "pass"


def test_main_local_test_exclusion(tmp_path):
    # (1, 0, 8) fails at 2 for the unit cube section: verdict false -> exit 1
    out = tmp_path / "rep.json"
    code = main(["local-test", "A", "1", "0", "8", "-p", "2",
                 "--quiet", "--out", str(out)])
    assert code == EXIT_FAIL
    rep = json.loads(out.read_text())
    assert rep["items"][0]["detail"]["verdict"] == "false"


def test_main_check_universal_finds_known_exception(tmp_path):
    out = tmp_path / "rep.json"
    code = main(["check-universal", "A", "--cmax", "8",
                 "--quiet", "--out", str(out)])
    assert code == EXIT_FAIL
    rep = json.loads(out.read_text())
    failing = [it for it in rep["items"] if it["status"] == "fail"]
    assert failing
    coeffs = [tuple(c) for c in failing[0]["detail"]["exceptions"]]
    assert (1, 0, 8) in coeffs


def test_main_jordan_report(tmp_path):
    out = tmp_path / "rep.json"
    code = main(["jordan", "A_1", "-p", "2", "--quiet", "--out", str(out)])
    assert code == EXIT_PASS
    rep = json.loads(out.read_text())
    assert rep["check"] == "jordan"


def test_main_global_flags_after_subcommand(tmp_path):
    out = tmp_path / "rep.json"
    code = main(["thm-conditions", "--which", "det13", "--quiet",
                 "--out", str(out)])
    assert code in (EXIT_PASS, EXIT_FAIL)
    assert out.exists()


def test_main_csv_summary(tmp_path):
    out = tmp_path / "rep.json"
    csv_path = tmp_path / "rep.csv"
    code = main(["local-test", "A", "1", "0", "1", "-p", "2", "--quiet",
                 "--out", str(out), "--csv", str(csv_path)])
    assert code == EXIT_PASS
    text = csv_path.read_text()
    assert "check" in text.splitlines()[0]


def test_env_cache_dir_is_used_end_to_end(tmp_path, monkeypatch):
    from primrep.enum_vectors import clear_memory_cache

    clear_memory_cache()
    cache = tmp_path / "cachehome"
    monkeypatch.setenv("PRIMREP_CACHE_DIR", str(cache))
    out = tmp_path / "rep.json"
    code = main(["check-universal", "A", "--cmax", "4", "--quiet",
                 "--out", str(out), "--cache-dir", str(tmp_path / "ignored")])
    assert code == EXIT_FAIL
    assert cache.exists()
    assert not (tmp_path / "ignored").exists()
