"""Config validation, artifact layout, reruns, and the CLI surface."""

import json

import pytest

from horolab.harness import (
    ConfigError,
    ReportError,
    list_presets,
    load_config,
    report,
    resolve_config,
    run,
    validate_config,
)
from horolab.harness import cli, runner
from horolab.dirichlet import SearchBudgetError


GOOD = {"kind": "basic-lemma-fuzz", "variant": "parts", "seed": 1, "samples": 5,
        "modules": ["standard"], "n": 1}


# -- validation ---------------------------------------------------------------


def test_good_config_normalises():
    cfg = validate_config(GOOD)
    assert cfg.kind == "basic-lemma-fuzz"
    assert cfg.variant == "parts"
    assert cfg.samples == 5


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="extra"):
        validate_config({**GOOD, "extra": True})


def test_unknown_kind_rejected():
    with pytest.raises(ConfigError, match="kind"):
        validate_config({**GOOD, "kind": "numerology"})


def test_seed_mandatory_for_stochastic_kinds():
    bad = {k: v for k, v in GOOD.items() if k != "seed"}
    with pytest.raises(ConfigError, match="seed"):
        validate_config(bad)
    # deterministic kinds do not need one
    validate_config({"kind": "identity-suite", "n": 2})


def test_variant_must_match_kind():
    with pytest.raises(ConfigError, match="variant"):
        validate_config({**GOOD, "variant": "qfixed"})
    with pytest.raises(ConfigError, match="takes no variant"):
        validate_config({"kind": "identity-suite", "variant": "parts"})


def test_variant_defaults_to_first_allowed():
    cfg = validate_config({k: v for k, v in GOOD.items() if k != "variant"})
    assert cfg.variant == "parts"


def test_load_config_diagnostics(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(ConfigError, match="not found"):
        load_config(missing)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="JSON"):
        load_config(bad)


def test_all_presets_validate():
    names = [name for name, _ in list_presets()]
    assert len(names) == 11
    assert "acceptance-01" in names and "curve-frames-demo" in names
    for name in names:
        cfg = resolve_config(name)
        assert cfg.kind


# -- run artifacts --------------------------------------------------------------


def test_run_writes_expected_files(tmp_path):
    out = run(resolve_config("acceptance-01"), tmp_path / "a")
    assert out.exit_code == 0
    produced = {p.name for p in (tmp_path / "a").iterdir()}
    assert {"manifest.json", "summary.json", "identities.csv"} <= produced
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["config"]["kind"] == "identity-suite"
    assert "timestamp" not in manifest


def test_corrupted_predicate_hook_fails_loud(tmp_path):
    raw = {**GOOD, "samples": 10,
           "test_hooks": {"corrupt_sk_predicate": True}}
    out = run(validate_config(raw), tmp_path / "bad")
    assert out.exit_code == 3
    assert not out.summary["all_pass"]
    recorded = json.loads((tmp_path / "bad" / "failures.json").read_text())
    instances = recorded["failures"][0]["instances"]
    assert instances
    assert {"module", "n", "coords"} <= set(instances[0])


def test_rerun_is_byte_identical(tmp_path):
    raw = {"kind": "equidistribution", "seed": 7, "samples": 300,
           "t_ladder": [4.0], "n": 1}
    cfg = validate_config(raw)
    run(cfg, tmp_path / "one")
    run(cfg, tmp_path / "two")
    for p in sorted((tmp_path / "one").iterdir()):
        assert p.read_bytes() == (tmp_path / "two" / p.name).read_bytes(), p.name


def test_budget_exhaustion_exit_code(tmp_path, monkeypatch):
    def explode(cfg):
        raise SearchBudgetError("grid too large for the configured budget")

    monkeypatch.setitem(runner._DISPATCH, ("identity-suite", ""), explode)
    out = run(resolve_config("acceptance-01"), tmp_path / "b")
    assert out.exit_code == 4
    assert out.summary["checks"]["acceptance-01"]["budget_exceeded"]


# -- report ---------------------------------------------------------------------


def test_report_digest_contents(tmp_path):
    run(resolve_config("acceptance-01"), tmp_path / "art")
    digest = report(tmp_path / "art")
    assert "identity-suite" in digest
    assert "[ok ]" in digest
    assert "ones_factorization" in digest
    assert "\u2014" not in digest  # prose stays plain


def test_report_needs_manifest(tmp_path):
    with pytest.raises(ReportError, match="manifest"):
        report(tmp_path)


def test_report_flags_failures_and_instances(tmp_path):
    raw = {**GOOD, "samples": 8, "test_hooks": {"corrupt_sk_predicate": True}}
    run(validate_config(raw), tmp_path / "fl")
    digest = report(tmp_path / "fl")
    assert "[FAIL]" in digest
    assert "failing instances serialized" in digest


# -- CLI -------------------------------------------------------------------------


def test_cli_run_and_report(tmp_path, capsys):
    rc = cli.main(["run", "--config", "acceptance-01",
                   "--out", str(tmp_path / "c")])
    assert rc == 0
    assert "artifact written" in capsys.readouterr().out
    rc = cli.main(["report", str(tmp_path / "c")])
    assert rc == 0
    assert "exact operator identities" in capsys.readouterr().out


def test_cli_rejects_unknown_preset(tmp_path, capsys):
    rc = cli.main(["run", "--config", "no-such-thing",
                   "--out", str(tmp_path / "d")])
    assert rc == 2
    assert "config error" in capsys.readouterr().err


def test_cli_seed_override(tmp_path):
    rc = cli.main(["run", "--config", "acceptance-02", "--out",
                   str(tmp_path / "s1"), "--seed", "31"])
    assert rc == 0
    manifest = json.loads((tmp_path / "s1" / "manifest.json").read_text())
    assert manifest["seed"] == 31


def test_cli_list_presets(capsys):
    assert cli.main(["list-presets"]) == 0
    out = capsys.readouterr().out
    assert out.count("acceptance-") >= 10


def test_cli_report_error_path(tmp_path, capsys):
    rc = cli.main(["report", str(tmp_path / "missing")])
    assert rc == 2
    assert "report error" in capsys.readouterr().err


def test_cli_propagates_check_failure(tmp_path):
    cfg_path = tmp_path / "corrupt.json"
    cfg_path.write_text(json.dumps(
        {**GOOD, "samples": 8, "test_hooks": {"corrupt_sk_predicate": True}}
    ))
    rc = cli.main(["run", "--config", str(cfg_path),
                   "--out", str(tmp_path / "e")])
    assert rc == 3
