"""Command-line runs: full config validation, output formats, exit codes.

Every invocation goes through main(argv) in process; files land in a
temporary directory. Exit convention: 0 success, 2 configuration or
precondition, 3 numerical domain, 4 I/O.
"""

import json

import pytest

from dysonflow.cli import main


def run(tmp_path, *argv):
    out = tmp_path / "out.csv"
    code = main(["--out", str(out), *argv])
    return code, out


def read_rows(path):
    lines = path.read_text().splitlines()
    header = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#")]
    return header, body[0].split(","), [l.split(",") for l in body[1:]]


# ===== basic runs ==========================================================


def test_density_csv(tmp_path):
    code, out = run(
        tmp_path, "--command", "density", "--source=-1:2,1:2",
        "--tau", "0.25", "--grid", "lambda=-2:2:9",
    )
    assert code == 0
    header, cols, rows = read_rows(out)
    assert cols == ["lambda", "rho"]
    assert len(rows) == 9
    assert header[0].startswith("# config: ")
    assert header[1].startswith("# version: ")
    assert header[2].startswith("# seed: ")
    # midpoint of the gap at tau < a^2: exactly zero
    mid = [r for r in rows if r[0] == "0.0"][0]
    assert float(mid[1]) == 0.0


def test_json_format(tmp_path):
    out = tmp_path / "d.json"
    code = main([
        "--command", "density", "--n", "2", "--tau", "1.0",
        "--grid", "lambda=0:1:3", "--format", "json", "--out", str(out),
    ])
    assert code == 0
    doc = json.loads(out.read_text())
    assert sorted(doc) == ["columns", "config", "rows", "seed", "version"]
    assert doc["columns"] == ["lambda", "rho"]
    assert len(doc["rows"]) == 3
    assert "out" not in doc["config"] and "format" not in doc["config"]


def test_simulate_shape_and_determinism(tmp_path):
    args = [
        "--command", "simulate", "--n", "3", "--tau-range", "0:1:4",
        "--trials", "2", "--seed", "9",
    ]
    code1 = main([*args, "--out", str(tmp_path / "a.csv")])
    code2 = main([*args, "--out", str(tmp_path / "b.csv")])
    assert code1 == code2 == 0
    a = (tmp_path / "a.csv").read_bytes()
    b = (tmp_path / "b.csv").read_bytes()
    assert a == b  # identical seed, identical bytes, any output path
    _, cols, rows = read_rows(tmp_path / "a.csv")
    assert cols == ["path", "tau", "index", "lambda"]
    assert len(rows) == 2 * 4 * 3


def test_acp_scan_includes_source_points(tmp_path):
    code, out = run(
        tmp_path, "--command", "acp-scan", "--source=-1:2,1:2",
        "--tau", "0.5", "--grid", "re=-2:2:5",
    )
    assert code == 0
    _, cols, rows = read_rows(out)
    assert cols == ["re_z", "im_z", "re_mantissa", "im_mantissa", "log_scale", "method"]
    # value at z = 1: heat polynomial -0.453125 = mantissa e^{log_scale}
    import math

    row = [r for r in rows if r[0] == "1.0"][0]
    val = float(row[2]) * math.exp(float(row[4]))
    assert val == pytest.approx(-0.453125, abs=1e-10)


def test_pde_check(tmp_path):
    code, out = run(
        tmp_path, "--command", "pde-check", "--n", "4", "--tau", "1.0",
        "--grid", "re=0.3:0.7:3", "--grid", "im=0.6:1.2:3",
    )
    assert code == 0
    _, cols, rows = read_rows(out)
    assert len(rows) == 18  # both evaluators over the 9 grid points
    worst = max(float(r[cols.index("abs_residual")]) for r in rows)
    floor = min(float(r[cols.index("abs_wrong_sign")]) for r in rows)
    assert worst < 1e-6
    assert floor > 1e-2


def test_green_scan_and_landscape(tmp_path):
    code, out = run(
        tmp_path, "--command", "green-scan", "--source=-1:2,1:2", "--tau", "0.5",
        "--grid", "re=-1:1:3", "--grid", "im=0.5:1:2",
    )
    assert code == 0
    _, cols, rows = read_rows(out)
    assert len(rows) == 6
    code, out2 = run(
        tmp_path, "--command", "green-scan", "--source=-1:2,1:2", "--tau", "0.5",
        "--grid", "re=0.5:0.5:1", "--grid", "im=1:1:1",
        "--grid", "p_re=-1:1:4", "--grid", "p_im=-1:1:4",
    )
    assert code == 0
    _, cols2, rows2 = read_rows(out2)
    assert "re_f" in cols2 and len(rows2) == 16


def test_caustics_flag_flip(tmp_path):
    code, out = run(
        tmp_path, "--command", "caustics", "--source=-1:2,1:2",
        "--tau-range", "0.5:1.5:3",
    )
    assert code == 0
    _, cols, rows = read_rows(out)
    merged = {r[0]: r[cols.index("merged")] for r in rows}
    assert merged["0.5"] == "false"
    assert merged["1.5"] == "true"


def test_airy_profile(tmp_path):
    code, out = run(
        tmp_path, "--command", "airy-profile", "--n", "64", "--tau", "1.0",
        "--grid", "eta=-1:1:3",
    )
    assert code == 0
    _, cols, rows = read_rows(out)
    assert len(rows) == 6  # acp and aicp-upper families
    assert all(float(r[cols.index("rel_dev")]) < 0.6 for r in rows)


def test_pearcey_profile_default_source(tmp_path):
    code, out = run(
        tmp_path, "--command", "pearcey-profile", "--n", "64",
        "--grid", "kappa=0:1:2", "--grid", "eta=-1:1:2",
    )
    assert code == 0
    _, cols, rows = read_rows(out)
    assert len(rows) == 8
    assert all(float(r[cols.index("rel_dev")]) < 0.6 for r in rows)


def test_kernel_commands(tmp_path):
    code, out = run(
        tmp_path, "--command", "kernel-verify", "--source=-1:2,1:2",
        "--tau", "1.0", "--grid", "x=-0.5:0.5:2", "--grid", "y=-0.5:0.5:2",
    )
    assert code == 0
    _, cols, rows = read_rows(out)
    assert all(float(r[cols.index("rel_err")]) < 1e-6 for r in rows)
    code, out2 = run(
        tmp_path, "--command", "kernel-grid", "--source=-1:2,1:2",
        "--tau", "1.0", "--grid", "x=0:1:2", "--grid", "y=0:1:2",
    )
    assert code == 0


def test_mc_compare(tmp_path):
    code, out = run(
        tmp_path, "--command", "mc-compare", "--n", "2", "--tau", "1.0",
        "--grid", "re=0:2:2", "--grid", "im=0.8:0.8:1",
        "--trials", "4000", "--seed", "5",
    )
    assert code == 0
    _, cols, rows = read_rows(out)
    assert all(abs(float(r[cols.index("z_score")])) < 4.0 for r in rows)


# ===== config file and validation ==========================================


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "command": "density", "source": "-1:2,1:2", "tau": 0.25,
        "grid": {"lambda": "-2:2:5"},
    }))
    out1 = tmp_path / "base.csv"
    out2 = tmp_path / "over.csv"
    assert main(["--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["--config", str(cfg), "--tau", "1.0", "--out", str(out2)]) == 0
    _, cols, rows1 = read_rows(out1)
    _, _, rows2 = read_rows(out2)
    mid1 = [r for r in rows1 if r[0] == "0.0"][0]
    mid2 = [r for r in rows2 if r[0] == "0.0"][0]
    assert float(mid1[1]) == 0.0  # two islands at tau = 0.25
    assert float(mid2[1]) > 0.0  # merged support at tau = 1.0


def test_unknown_config_field(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"command": "density", "n": 2, "tau": 1.0, "bogus": 3}')
    assert main(["--config", str(cfg)]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["exit"] == 2
    assert "bogus" in err["message"]


def test_unconsumed_field_rejected(tmp_path, capsys):
    code, _ = run(
        tmp_path, "--command", "airy-profile", "--n", "64", "--tau", "1.0",
        "--grid", "eta=0:1:2", "--source=-1:2,1:2",
    )
    assert code == 2
    assert "does not consume" in json.loads(capsys.readouterr().err)["message"]


def test_missing_required(tmp_path, capsys):
    code, _ = run(tmp_path, "--command", "density", "--tau", "1.0")
    assert code == 2


def test_source_n_exclusive(tmp_path):
    code, _ = run(
        tmp_path, "--command", "density", "--source=0:4", "--n", "4",
        "--tau", "1.0", "--grid", "lambda=0:1:2",
    )
    assert code == 2


def test_bad_grid_spec(tmp_path):
    code, _ = run(
        tmp_path, "--command", "density", "--n", "2", "--tau", "1.0",
        "--grid", "lambda=2:-2:5",
    )
    assert code == 2
    code, _ = run(
        tmp_path, "--command", "density", "--n", "2", "--tau", "1.0",
        "--grid", "lambda=0:1:0",
    )
    assert code == 2


def test_domain_failure_exit_three(tmp_path, capsys):
    # stencil points inside the axis band: numerical domain, not config
    code, _ = run(
        tmp_path, "--command", "pde-check", "--n", "4", "--tau", "1.0",
        "--grid", "re=0:1:2", "--grid", "im=0.2:0.2:1",
    )
    assert code == 3
    assert json.loads(capsys.readouterr().err)["exit"] == 3


def test_unwritable_output(tmp_path, capsys):
    code = main([
        "--command", "density", "--n", "2", "--tau", "1.0",
        "--grid", "lambda=0:1:2", "--out", "/nonexistent/dir/x.csv",
    ])
    assert code == 4
