import json

import numpy as np
import pytest

from heraldw import cli


def _write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_minimal_config_defaults():
    cfg, echo = cli.config_from_dict({"n": 3, "model": "rwa", "g": 0.6155})
    assert cfg.arm_count == 3
    assert cfg.arms[0].detuning == 0.0
    assert cfg.arms[0].envelope.area == pytest.approx(0.6155)
    np.testing.assert_allclose(np.abs(cfg.atomic_amplitudes), 1 / np.sqrt(3))
    assert echo["sideband_cut"] == 2 and echo["delta"] == 0.0


def test_config_errors_are_distinct():
    msgs = []
    for doc in (
        {"model": "rwa", "g": 0.5},
        {"n": 3, "g": 0.5, "amplitudes": [0.6, 0.6, np.sqrt(0.18)]},
        {"n": 3, "g": 0.5, "model": "full"},
    ):
        with pytest.raises(cli.ConfigError) as exc:
            cli.config_from_dict(doc)
        msgs.append(str(exc.value))
    assert "missing" in msgs[0]
    assert "normalized" in msgs[1] and "0.9" in msgs[1]
    assert "carrier" in msgs[2]
    assert len(set(msgs)) == 3


def test_config_other_rejections():
    for doc in ([], {"n": 3, "g": 1, "bogus": 1}, {"n": 0, "g": 1}, {"n": 2, "g": 1, "phases": [0]},
                {"n": 2, "g": 1, "omega": 1.0}, {"n": 2, "g": 1, "amplitudes": ["x", 1]},
                {"n": 2, "g": 1, "model": "full", "omega": 1.0, "omega0": 1.0, "delta": 0.4}):
        with pytest.raises(cli.ConfigError):
            cli.config_from_dict(doc)


def test_full_config_derives_delta():
    cfg, echo = cli.config_from_dict({"n": 2, "g": 0.6, "model": "full", "omega": 1.1, "omega0": 1.0, "window": 20})
    assert echo["delta"] == pytest.approx(1.0)
    assert cfg.arms[0].detuning == pytest.approx(0.1)


def test_complex_amplitudes_and_load(tmp_path):
    path = _write(tmp_path, {"n": 2, "g": 0.4, "amplitudes": [[0.6, 0.0], [0.0, 0.8]]})
    cfg = cli.load_config(path)
    assert cfg.atomic_amplitudes[1] == pytest.approx(0.8j)
    with pytest.raises(cli.ConfigError, match="not found"):
        cli.load_config(str(tmp_path / "none.json"))
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(cli.ConfigError, match="valid JSON"):
        cli.load_config(str(tmp_path / "bad.json"))


def test_optimize_prints_closed_form(tmp_path, capsys):
    assert cli.run(["optimize", "--n", "3", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "g_opt=0.61548" in out and "P_max=0.14815" in out
    man = json.loads((tmp_path / "optimize.json").read_text())
    assert man["subcommand"] == "optimize"
    assert (tmp_path / "optimize.csv").read_text().startswith("n,g_opt_numeric")


def test_manifest_round_trip_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.run(["sweep-area", "--n", "2", "--points", "6", "--out", str(a)]) == 0
    assert cli.run(["sweep-area", "--config", str(a / "sweep-area.json"), "--out", str(b)]) == 0
    assert (a / "sweep-area.csv").read_bytes() == (b / "sweep-area.csv").read_bytes()


def test_config_file_drives_scan(tmp_path):
    path = _write(tmp_path, {"n": 2, "g": 0.7, "delta": 0.2})
    assert cli.run(["sweep-detuning", "--config", path, "--points", "3", "--out", str(tmp_path)]) == 0
    man = json.loads((tmp_path / "sweep-detuning.json").read_text())
    assert man["params"]["g_fixed"] == 0.7
    assert man["config"]["n"] == 2
    # flags override the file
    assert cli.run(["mismatch", "--config", path, "--n", "3", "--points", "3", "--kind", "detuning",
                    "--out", str(tmp_path)]) == 0
    man = json.loads((tmp_path / "mismatch.json").read_text())
    assert man["params"]["n"] == 3 and man["params"]["kind"] == "detuning"


def test_usage_errors_exit_2(capsys):
    assert cli.run(["sweep-area", "--bogus"]) == 2
    assert cli.run(["nonsense"]) == 2
    assert cli.run(["sweep-area", "--model", "semi"]) == 2
    assert cli.run(["sweep-area", "--points", "1"]) == 2
    assert cli.run([]) == 2
    assert "usage" in capsys.readouterr().err


def test_validation_errors_exit_1(tmp_path, capsys):
    path = _write(tmp_path, {"n": 3, "g": 0.5, "amplitudes": [0.6, 0.6, 0.1]})
    assert cli.run(["sweep-area", "--config", path, "--out", str(tmp_path)]) == 1
    assert "normalized" in capsys.readouterr().err
    assert cli.run(["sweep-area", "--config", str(tmp_path / "missing.json")]) == 1
    bad = _write(tmp_path, {"scan": "nope", "params": {}}, "m.json")
    assert cli.run(["sweep-area", "--config", bad]) == 1


def test_svg_output(tmp_path):
    pytest.importorskip("matplotlib")
    assert cli.run(["time-trace", "--points", "5", "--svg", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "time-trace.svg").read_text().lstrip().startswith("<?xml")


def test_gaussian_writes_two_tables(tmp_path, monkeypatch):
    from heraldw import scans

    calls = {}
    orig_w, orig_d = scans.gaussian_width_scan, scans.gaussian_detuning_scan
    monkeypatch.setattr(scans, "gaussian_width_scan",
                        lambda **kw: calls.setdefault("w", orig_w(tau_grid=[0.5, 1.0], **kw)))
    monkeypatch.setattr(scans, "gaussian_detuning_scan",
                        lambda **kw: calls.setdefault("d", orig_d(delta_grid=[0.0, 1.0], **kw)))
    assert cli.run(["gaussian", "--tau", "0.8", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "gaussian-width.csv").exists() and (tmp_path / "gaussian-detuning.csv").exists()
    assert json.loads((tmp_path / "gaussian-detuning.json").read_text())["params"]["tau"] == 0.8


def test_verify_reports_and_exit_codes(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(cli, "verify_checks", lambda spec: iter([("a", 1e-9, 1e-6), ("b", 0.0, 1e-3)]))
    assert cli.run(["verify", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "PASS  a" in out and "2/2 checks passed" in out
    assert (tmp_path / "verify.csv").read_text().splitlines()[0] == "check,value,tolerance,pass"
    monkeypatch.setattr(cli, "verify_checks", lambda spec: iter([("a", 1.0, 1e-6), ("nan", float("nan"), 1.0)]))
    assert cli.run(["verify", "--out", str(tmp_path)]) == 1
    assert "FAIL  a" in capsys.readouterr().out
    checks = json.loads((tmp_path / "verify.json").read_text())["checks"]
    assert [c["pass"] for c in checks] == [False, False]
