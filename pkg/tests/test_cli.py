import json

import pytest

from collimator.cli import main
from collimator.config import EngineConfig, save_config
from collimator.session import read_records_csv


def test_gen_targets_default_counts(tmp_path):
    out = tmp_path / "targets.json"
    assert main(["gen-targets", "--seed", "4", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert len(data["training"]) == 32
    assert len(data["mandible"]) == 16
    assert len(data["maxilla"]) == 16


def test_gen_targets_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["gen-targets", "--seed", "9", "--out", str(a)])
    main(["gen-targets", "--seed", "9", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_gen_targets_invalid_group(tmp_path):
    with pytest.raises(SystemExit):
        main(["gen-targets", "--seed", "1", "--out", str(tmp_path / "x.json"),
              "--group", "bogus"])


def test_simulate_row_count(tmp_path):
    out = tmp_path / "trials.csv"
    assert main(["simulate", "--seed", "2", "--out", str(out),
                 "--participants", "1"]) == 0
    records = read_records_csv(str(out))
    # one participant: 2 widgets x (16 + 16) arch targets
    assert len(records) == 64
    assert all(r.simulated for r in records)


def test_simulate_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["simulate", "--seed", "31", "--out", str(a), "--participants", "2"])
    main(["simulate", "--seed", "31", "--out", str(b), "--participants", "2"])
    assert a.read_bytes() == b.read_bytes()


def test_analyze_exclusion_arithmetic(tmp_path, capsys):
    csv_path = tmp_path / "trials.csv"
    main(["simulate", "--seed", "5", "--out", str(csv_path), "--participants", "30"])
    records = read_records_csv(str(csv_path))
    assert len(records) == 1920
    out = tmp_path / "report"
    assert main(["analyze", str(csv_path), "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "analyzed 1800 records" in stdout
    text = (tmp_path / "report.txt").read_text()
    assert text.count("Mann-Whitney U") >= 10   # one line per metric


def test_analyze_empty_csv_clean_error(tmp_path, capsys):
    bad = tmp_path / "empty.csv"
    bad.write_text("")
    assert main(["analyze", str(bad)]) == 1
    assert "error:" in capsys.readouterr().err


def test_analyze_header_only_csv(tmp_path, capsys):
    bad = tmp_path / "header.csv"
    from collimator.session import write_records_csv
    write_records_csv(str(bad), [])
    assert main(["analyze", str(bad)]) == 1


def test_missing_file_clean_error(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "nope.csv")]) == 1
    assert "error:" in capsys.readouterr().err


def test_config_file_respected(tmp_path):
    cfg = EngineConfig(training_count=8)
    cfg_path = tmp_path / "cfg.json"
    save_config(cfg, str(cfg_path))
    out = tmp_path / "t.json"
    main(["--config", str(cfg_path), "gen-targets", "--seed", "1", "--out", str(out)])
    assert len(json.loads(out.read_text())["training"]) == 8


def test_env_config_fallback(tmp_path, monkeypatch):
    cfg_path = tmp_path / "cfg.json"
    save_config(EngineConfig(training_count=4), str(cfg_path))
    monkeypatch.setenv("COLLIMATOR_CONFIG", str(cfg_path))
    out = tmp_path / "t.json"
    main(["gen-targets", "--seed", "1", "--out", str(out)])
    assert len(json.loads(out.read_text())["training"]) == 4
