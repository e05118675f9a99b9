import csv
import hashlib
import json

import pytest

from mnqc import cli, m2o
from mnqc.bench.executor import LinkUnavailableError
from mnqc.cli import main

SMALL = """
[run]
benchmarks = ghz

[grids]
pe = 0.2, 0.5
max_rounds = 1
gap_times = 1e-8, 1e-6
gap_infidelities = 1e-3, 0.3
dqpe_t1 = 1e-3
dqpe_link_times = 1e-7
"""


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.ini"
    p.write_text(SMALL)
    return p


def run(tmp_path, *argv):
    out = tmp_path / "out"
    code = main([*argv, "--out", str(out)])
    return code, out


def load(path):
    return json.loads(path.read_text())


def test_manifest_schema_and_hashes(tmp_path):
    code, out = run(tmp_path, "roofline")
    assert code == 0
    man = load(out / "manifest.json")
    assert set(man) == {"command", "config_echo", "seed", "outputs", "runtime_s", "versions"}
    assert man["command"] == "roofline"
    assert {"mnqc", "python", "numpy", "scipy"} <= set(man["versions"])
    for entry in man["outputs"]:
        data = (out / entry["path"]).read_bytes()
        assert entry["bytes"] == len(data)
        assert entry["sha256"] == hashlib.sha256(data).hexdigest()
    roof = load(out / "roofline.json")
    assert roof["benchmarks"]["qft"]["reference"]["bound"] == "communication"
    assert roof["distillation_shift"]["recurrence"] == pytest.approx([10.41, 28.82, 55.64])


def test_gate_with_perfect_pair(tmp_path):
    code, out = run(tmp_path, "gate", "--perfect-ep")
    assert code == 0
    rec = load(out / "gate.json")
    assert rec["f_ll"] == pytest.approx(1.0, abs=1e-9)
    assert rec["t_ll_seconds"] == pytest.approx(2e-7)


def test_gate_at_operating_point(tmp_path):
    code, out = run(tmp_path, "gate")
    rec = load(out / "gate.json")
    assert code == 0
    assert rec["t_ll_seconds"] == pytest.approx(1.239e-6, rel=1e-3)
    assert rec["f_ll"] == pytest.approx(0.806, abs=1e-3)


def test_pipeline_outputs(tmp_path):
    code, out = run(tmp_path, "pipeline")
    assert code == 0
    link = load(out / "link.json")
    assert 1e-7 <= link["t_ll_seconds"] <= 1e-5 and 0.7 <= link["f_ll"] <= 0.95
    rows = list(csv.DictReader((out / "benchmarks.csv").open()))
    assert [r["benchmark"] for r in rows] == ["ghz", "bv"]
    assert all(0 < float(r["score"]) <= 1 for r in rows)


def test_qcpa_outputs(tmp_path):
    code, out = run(tmp_path, "qcpa")
    assert code == 0
    rows = list(csv.DictReader((out / "qcpa.csv").open()))
    pec128 = next(r for r in rows if r["method"] == "pec" and r["k"] == "128")
    assert float(pec128["log10_circuits"]) == pytest.approx(5.634, abs=1e-3)
    cross = load(out / "qcpa_crossover.json")
    assert cross["upper"]["infidelity"] == pytest.approx(0.4157, abs=1e-4)


def test_distill_and_m2o(tmp_path, small_cfg):
    code, out = run(tmp_path, "distill", "--config", str(small_cfg))
    assert code == 0
    assert (out / "distill.csv").read_text().startswith("rounds,fidelity")
    code, out = run(tmp_path, "m2o-sweep", "--config", str(small_cfg))
    assert code == 0
    assert load(out / "m2o_summary.json")["preset"] == "no1"


def test_small_gap_scan(tmp_path, small_cfg):
    code, out = run(tmp_path, "gap", "--config", str(small_cfg), "--threads", "2")
    assert code == 0
    grid = load(out / "gap_ghz.json")
    assert len(grid["scores"]) == 2 and len(grid["frontier_overlay"]) >= 1


def test_small_dqpe(tmp_path, small_cfg):
    code, out = run(tmp_path, "dqpe", "--config", str(small_cfg))
    assert code == 0
    rec = load(out / "dqpe.json")
    for k in rec["kickback"]:
        assert k["simulated"] == pytest.approx(k["closed_form"], abs=1e-10)
    assert (out / "dqpe_estimators.csv").read_text().count("\n") == 10


def test_config_errors_exit_3(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[run]\npe = 2\n")
    assert run(tmp_path, "gate", "--config", str(bad))[0] == cli.EXIT_CONFIG
    assert run(tmp_path, "gate", "--preset", "nope")[0] == cli.EXIT_CONFIG
    assert run(tmp_path, "gate", "--config", str(tmp_path / "missing.ini"))[0] == cli.EXIT_CONFIG


def test_usage_errors_exit_2(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
    assert run(tmp_path, "gate", "--threads", "0")[0] == cli.EXIT_USAGE


def test_io_error_exit_7(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["roofline", "--out", str(blocker / "sub")]) == cli.EXIT_IO


@pytest.mark.parametrize(
    "exc,code",
    [
        (m2o.TruncationError("no convergence"), cli.EXIT_NUMERICAL),
        (LinkUnavailableError("no link"), cli.EXIT_LINK),
        (ValueError("bad domain"), cli.EXIT_DOMAIN),
    ],
)
def test_error_classes_map_to_exit_codes(tmp_path, monkeypatch, exc, code):
    def boom(cfg, w, args):
        raise exc

    monkeypatch.setitem(cli.HANDLERS, "gate", boom)
    assert run(tmp_path, "gate")[0] == code
