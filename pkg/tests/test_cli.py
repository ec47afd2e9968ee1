import contextlib
import io
import json

import pytest

import fracstab
from fracstab.cli import main
from fracstab.errors import CriterionOracleMismatch


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = None
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        try:
            code = main(list(argv))
        except SystemExit as exc:  # argparse paths (usage errors, --version)
            code = exc.code if exc.code is not None else 0
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def ex3(config_dir):
    return str(config_dir / "example3.toml")


@pytest.fixture
def ex13(config_dir):
    return str(config_dir / "example13.toml")


@pytest.fixture
def quad(config_dir):
    return str(config_dir / "example13_quadratic.toml")


# ----------------------------------------------------------------- classify


def test_classify_text(ex3):
    code, out, err = run_cli("classify", ex3)
    assert code == 0 and err == ""
    assert "structural exponents: (0.4, 0.7, 0.8)" in out
    assert "case 15" in out
    assert "agrees with structural" in out


def test_classify_json(ex3):
    code, out, _ = run_cli("classify", ex3, "--json")
    assert code == 0
    doc = json.loads(out)
    (match,) = doc["matches"]
    assert match["case"] == 15
    assert match["agrees_with_structural"] is True
    assert doc["manifest"]["command"] == "classify"
    assert doc["manifest"]["version"] == fracstab.__version__


def test_classify_reports_every_match(ex13):
    code, out, _ = run_cli("classify", ex13, "--json")
    assert code == 0
    doc = json.loads(out)
    assert [m["case"] for m in doc["matches"]] == [1, 2, 3, 5, 6, 8, 9, 11, 14, 17]


# ------------------------------------------------------------- print-charfn


def test_print_charfn_text(ex13):
    code, out, _ = run_cli("print-charfn", ex13)
    assert code == 0
    assert "characteristic function: s^1.2 - 0.2 s^0.5 + 0.1" in out
    assert "slots: p1=0.5 p2=0.5 p3=0.5 p4=1.2" in out


def test_print_charfn_json(ex13):
    code, out, _ = run_cli("print-charfn", ex13, "--json")
    doc = json.loads(out)
    assert doc["reduced"]["exponents"] == [0.5, 0.5, 0.5, 1.2]
    assert doc["reduced"]["coefficients"]["c"] == pytest.approx(0.2)
    assert doc["reduced"]["coefficients"]["d"] == pytest.approx(-0.1)
    assert doc["sine_ratios"]["direct"][0] == pytest.approx(0.7434960689203689)


# ---------------------------------------------------------------- analyze


def test_analyze_stable_system(ex3):
    code, out, err = run_cli("analyze", ex3)
    assert code == 0 and err == ""
    assert "overall: stable" in out
    assert "zero count (right half-plane): 0" in out
    assert "nonpositive_gap_bounded" in out


def test_analyze_json_is_deterministic(ex13):
    first = run_cli("analyze", ex13, "--json")
    second = run_cli("analyze", ex13, "--json")
    assert first == second
    doc = json.loads(first[1])
    assert doc["overall"] == "stable"
    assert doc["oracle_zero_count"] == 0
    by_name = {c["criterion"]: c for c in doc["criteria"]}
    assert by_name["one_term_low"]["witness"]["threshold"] == pytest.approx(
        -0.04802821686494662
    )


def test_analyze_no_oracle(ex13):
    code, out, _ = run_cli("analyze", ex13, "--no-oracle", "--json")
    assert code == 0
    assert json.loads(out)["oracle_zero_count"] is None


# ----------------------------------------------------------------- oracle


def test_oracle_json(ex3):
    code, out, _ = run_cli("oracle", ex3, "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["zero_count"] == 0
    assert doc["residual"] <= 0.01
    assert set(doc["segment_turning"]) == {
        "axis_upper", "inner_arc", "axis_lower", "outer_arc",
    }


def test_oracle_dump_contour(ex13, tmp_path):
    path = tmp_path / "contour.csv"
    code, out, _ = run_cli("oracle", ex13, "--dump-contour", str(path))
    assert code == 0
    assert f"wrote {path}" in out
    lines = path.read_text().splitlines()
    assert lines[0] == "segment,re_s,im_s,re_q,im_q"
    assert len(lines) > 100
    segs = {row.split(",")[0] for row in lines[1:]}
    assert segs == {"axis_upper", "inner_arc", "axis_lower", "outer_arc"}
    assert not any(p.name.startswith(".partial-") for p in tmp_path.iterdir())


def test_oracle_origin_zero_reports_boundary(tmp_path):
    cfg = tmp_path / "singular.toml"
    cfg.write_text(
        "alpha = [0.4, 0.3, 0.5]\n"
        "matrix = [[0.0, 1.0, -1.0], [0.2, 0.0, 0.0], [0.4, 0.0, 0.0]]\n"
    )
    code, out, _ = run_cli("oracle", str(cfg))
    assert code == 0
    assert "zero count unavailable" in out
    assert "not asymptotically stable" in out


# ---------------------------------------------------------------- simulate


def test_simulate_writes_csv_and_svg(ex13, tmp_path):
    csv = tmp_path / "traj.csv"
    svg = tmp_path / "traj.svg"
    code, out, err = run_cli(
        "simulate", ex13, "--step", "0.25", "--t-end", "50",
        "--out", str(csv), "--svg", str(svg), "--stride", "10",
        "--diag", "--nu", "0.3", "--window", "5,50",
    )
    assert code == 0, err
    assert "integrated to t=50 in 200 steps" in out
    assert "decay check" in out
    lines = csv.read_text().splitlines()
    assert lines[0] == "t,x1,x2,x3"
    first = [float(v) for v in lines[1].split(",")]
    assert first == pytest.approx([0.0, 1.0, -2.0, 2.0])
    assert float(lines[-1].split(",")[0]) == pytest.approx(50.0)
    assert len(lines) == 22  # 21 strided samples plus the header
    body = svg.read_text()
    assert body.startswith("<svg") and body.rstrip().endswith("</svg>")
    assert "t^0.3 |x|" in body


def test_simulate_csv_is_deterministic(ex13, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, _, _ = run_cli(
            "simulate", ex13, "--step", "0.25", "--t-end", "10", "--out", str(path)
        )
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_x0_override(ex3, tmp_path):
    csv = tmp_path / "traj.csv"
    code, out, _ = run_cli(
        "simulate", ex3, "--step", "0.1", "--t-end", "1",
        "--x0", "0.5,0,0", "--out", str(csv), "--json",
    )
    assert code == 0
    doc = json.loads(out)
    first = [float(v) for v in csv.read_text().splitlines()[1].split(",")]
    assert first[1:] == pytest.approx([0.5, 0.0, 0.0])
    assert doc["final_norm"] > 0.0


def test_simulate_misaligned_forcing_exits_one(ex13):
    code, _, err = run_cli("simulate", ex13, "--step", "0.3", "--t-end", "0.9")
    assert code == 1
    assert "GridMisaligned" in err


# ------------------------------------------------------------------- basin


def test_basin_command(quad, tmp_path):
    csv = tmp_path / "basin.csv"
    svg = tmp_path / "basin.svg"
    code, out, err = run_cli(
        "basin", quad, "--radii", "1e-3,1e-2", "--step", "0.05", "--t-end", "40",
        "--nu", "0.5", "--window", "4,40", "--out", str(csv), "--svg", str(svg),
    )
    assert code == 0, err
    assert "radius 0.001" in out and "radius 0.01" in out
    lines = csv.read_text().splitlines()
    assert lines[0] == "radius,sup_scaled,sup_q3,sup_q4,plateau"
    assert len(lines) == 3
    assert svg.read_text().startswith("<svg")


def test_basin_rejects_unstable_linear_part(tmp_path):
    cfg = tmp_path / "unstable.toml"
    cfg.write_text(
        "alpha = [0.4, 0.3, 0.5]\n"
        "matrix = [[0.5, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.5]]\n"
        "x0 = [1.0, 0.0, 0.0]\n"
    )
    code, _, err = run_cli(
        "basin", str(cfg), "--radii", "1e-3", "--step", "0.1", "--t-end", "10",
        "--window", "1,10",
    )
    assert code == 1
    assert "LinearPartNotCertified" in err


# ------------------------------------------------------------------- sweep


def test_sweep_verdict_flip(ex13):
    code, out, err = run_cli(
        "sweep", ex13, "--param", "matrix.1.3", "--values=-0.40,-0.44,-0.48,-0.52",
        "--json",
    )
    assert code == 0, err
    doc = json.loads(out)
    rows = doc["rows"]
    assert [r["verdict"] for r in rows] == [
        "inconclusive", "inconclusive", "inconclusive", "stable",
    ]
    assert [r["zero_count"] for r in rows] == [2, 2, 2, 0]
    assert rows[3]["fired"] == ["one_term_low"]
    assert doc["verdict_changes"] == [[-0.48, -0.52]]


def test_sweep_text_mentions_flip(ex13):
    code, out, _ = run_cli(
        "sweep", ex13, "--param", "matrix.1.3", "--values=-0.44,-0.52",
    )
    assert code == 0
    assert "verdict changes between matrix.1.3=-0.44 and -0.52" in out


def test_sweep_alpha_without_oracle(ex3):
    code, out, _ = run_cli(
        "sweep", ex3, "--param", "alpha.1", "--values", "0.4,0.45", "--no-oracle",
        "--json",
    )
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 2
    assert all(r["zero_count"] is None for r in rows)


def test_sweep_bad_param_exits_one(ex3):
    code, _, err = run_cli("sweep", ex3, "--param", "bogus", "--values", "1,2")
    assert code == 1
    assert "sweep parameter" in err


def test_sweep_thread_cap_env(ex3, monkeypatch):
    monkeypatch.setenv("FRACSTAB_THREADS", "1")
    code, out, _ = run_cli(
        "sweep", ex3, "--param", "alpha.1", "--values", "0.4,0.45", "--no-oracle",
    )
    assert code == 0
    monkeypatch.setenv("FRACSTAB_THREADS", "zero")
    code, _, err = run_cli(
        "sweep", ex3, "--param", "alpha.1", "--values", "0.4", "--no-oracle",
    )
    assert code == 1
    assert "FRACSTAB_THREADS" in err


# ------------------------------------------------------------- exit codes


def test_usage_errors_exit_one(ex3):
    assert run_cli("frobnicate", ex3)[0] == 1          # unknown command
    assert run_cli("sweep", ex3)[0] == 1               # missing required options
    code, _, err = run_cli("classify", "/nonexistent/system.toml")
    assert code == 1 and "classify" in err
    code, _, err = run_cli(
        "simulate", ex3, "--step", "0.1", "--t-end", "1", "--x0", "1,2"
    )
    assert code == 1 and "initial state" in err


def test_consistency_violation_exits_two(ex3, monkeypatch):
    def boom(*args, **kwargs):
        raise CriterionOracleMismatch("forced disagreement for the exit contract")

    monkeypatch.setattr("fracstab.cli.assess", boom)
    code, out, err = run_cli("analyze", ex3)
    assert code == 2
    diag = json.loads(err)
    assert diag["error"] == "CriterionOracleMismatch"
    assert diag["command"] == "analyze"
    assert diag["config"].endswith("example3.toml")


def test_version_flag():
    code, out, _ = run_cli("--version")
    assert code == 0
    assert f"fracstab {fracstab.__version__}" in out
