import argparse
import csv
import json

import numpy as np
import pytest

from lseprec.cli import main, parse_alpha, parse_constraint


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def read_csv(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(lines))


def test_parse_constraint_kinds():
    assert parse_constraint("none").kind == "unconstrained"
    c = parse_constraint("disk:0.5")
    assert c.kind == "disk" and c.power == 0.5
    c = parse_constraint("psk:8")
    assert c.kind == "mpsk" and c.order == 8 and c.power == 1.0
    c = parse_constraint("psk:4:2.0")
    assert c.power == 2.0
    for bad in ("disk", "psk:x", "hexagon:1", "circle:-1"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_constraint(bad)


def test_parse_alpha_forms():
    assert parse_alpha("2.5").tolist() == [2.5]
    np.testing.assert_allclose(parse_alpha("1:3:5"),
                               [1.0, 1.5, 2.0, 2.5, 3.0])
    for bad in ("1:3", "3:1:4", "a", "1:2:0"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_alpha(bad)


def test_rs_bpsk_reference_row(capsys):
    code, out = run(capsys, ["rs", "--constraint", "psk:2", "--alpha", "2"])
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 1
    assert float(rows[0]["D_dB"]) == pytest.approx(-4.2037, abs=1e-3)
    assert float(rows[0]["q"]) == pytest.approx(1.0, abs=1e-8)
    assert rows[0]["converged"] == "true"


def test_csv_runs_are_byte_identical(tmp_path):
    args = ["rs", "--constraint", "disk:1", "--alpha", "1:3:3",
            "--lam", "0.05"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_db_column_consistent_with_linear(capsys):
    code, out = run(capsys, ["rs", "--constraint", "psk:4",
                             "--alpha", "1:2:3"])
    assert code == 0
    for row in read_csv(out):
        d = float(row["D_linear"])
        assert float(row["D_dB"]) == pytest.approx(10 * np.log10(d), abs=1e-9)


def test_json_mirrors_csv(capsys):
    args = ["rs", "--constraint", "psk:2", "--alpha", "2"]
    _, out_csv = run(capsys, args)
    _, out_json = run(capsys, args + ["--format", "json"])
    doc = json.loads(out_json)
    assert doc["meta"]["constraint"] == "psk:2"
    row_c = read_csv(out_csv)[0]
    row_j = doc["rows"][0]
    assert float(row_c["D_linear"]) == pytest.approx(row_j["D_linear"],
                                                     rel=1e-12)
    assert row_j["converged"] is True


def test_simulate_emits_empirical_columns(capsys):
    code, out = run(capsys, ["simulate", "--constraint", "none",
                             "--alpha", "2", "--lam", "0.1", "--K", "50",
                             "--trials", "5"])
    assert code == 0
    row = read_csv(out)[0]
    emp = float(row["D_emp_mean"])
    pred = float(row["D_linear"])
    assert emp > 0 and float(row["D_emp_stderr"]) > 0
    assert abs(10 * np.log10(emp) - 10 * np.log10(pred)) < 1.0


def test_rate_command_outputs_optimum(capsys):
    code, out = run(capsys, ["rate", "--constraint", "circle:1",
                             "--alpha", "2", "--sigma-n2", "1",
                             "--gamma-lo", "0.05", "--gamma-hi", "20"])
    assert code == 0
    row = read_csv(out)[0]
    assert float(row["rate_bits"]) > 0
    assert 0.05 <= float(row["gamma_opt"]) <= 20


def test_papr_requires_target_q(capsys):
    code = main(["rs", "--alpha", "2", "--papr-db", "3"])
    assert code == 2
    code, out = run(capsys, ["rs", "--alpha", "2", "--papr-db", "3",
                             "--target-q", "0.5", "--sigma-n2", "1"])
    assert code == 0
    row = read_csv(out)[0]
    assert float(row["q"]) == pytest.approx(0.5, abs=1e-6)


def test_ofdm_check_exit_codes(capsys):
    code, out = run(capsys, ["ofdm-check", "--L", "4", "--K", "20",
                             "--N", "20", "--seeds", "2"])
    assert code == 0
    assert "ks_statistic=" in out
    code, _ = run(capsys, ["ofdm-check", "--L", "4", "--K", "20",
                           "--N", "20", "--seeds", "2",
                           "--ks-threshold", "0.0001"])
    assert code == 1


def test_config_file_merges_under_flags(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "rs", "constraint": "psk:2",
                               "alpha": "2"}))
    code, out = run(capsys, ["--config", str(cfg)])
    assert code == 0
    assert float(read_csv(out)[0]["D_dB"]) == pytest.approx(-4.2037, abs=1e-3)
    # explicit flags override the config
    code, out = run(capsys, ["--config", str(cfg), "rs",
                             "--constraint", "psk:4"])
    assert code == 0
    assert float(read_csv(out)[0]["D_dB"]) != pytest.approx(-4.2037, abs=1e-3)


def test_missing_config_exits_2(capsys):
    assert main(["--config", "/nonexistent.json", "rs"]) == 2
