"""Command-line runs against golden files and the exit-code matrix.

Set CHRONOSCALE_UPDATE_GOLDEN=1 to rewrite the golden files from the current
build (review the diff before committing).
"""
import json
import os
from pathlib import Path

import pytest

from chronoscale.cli import main

HERE = Path(__file__).parent
FIX = HERE / "fixtures"
GOLD = HERE / "golden"

GOLDEN_RUNS = {
    "scale_qscale.json": ["scale", "--qscale", "2", "--n", "3", "--t0", "1"],
    "solve_qscale_order2.json": ["solve", str(FIX / "qscale_order2.json")],
    "stability_qscale_order2.json": [
        "stability", str(FIX / "qscale_order2.json"), "--trials", "20", "--seed", "7", "--shape", "sinusoid",
    ],
    "verify_uniform_order3.json": ["verify", str(FIX / "uniform_order3.json"), "--samples", "50", "--seed", "3"],
}


def run(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, (out.read_text(encoding="utf-8") if out.exists() else None)


@pytest.mark.parametrize("golden", sorted(GOLDEN_RUNS))
def test_golden(golden, tmp_path):
    code, text = run(GOLDEN_RUNS[golden], tmp_path)
    assert code == 0
    path = GOLD / golden
    if os.environ.get("CHRONOSCALE_UPDATE_GOLDEN"):
        path.write_text(text, encoding="utf-8")
    assert text == path.read_text(encoding="utf-8")


def test_solve_csv_golden(tmp_path):
    csv_path = tmp_path / "r.csv"
    code = main(["solve", str(FIX / "qscale_order2.json"), "--out", str(tmp_path / "r.json"), "--csv", str(csv_path)])
    assert code == 0
    path = GOLD / "solve_qscale_order2.csv"
    if os.environ.get("CHRONOSCALE_UPDATE_GOLDEN"):
        path.write_bytes(csv_path.read_bytes())
    assert csv_path.read_bytes() == path.read_bytes()
    lines = csv_path.read_bytes().split(b"\r\n")
    assert lines[0] == b"t,x,u,abs_dev,residual"
    # residual is defined on [0, N - n] only
    assert lines[-2].endswith(b",")


class TestScale:
    def test_uniform(self, capsys):
        assert main(["scale", "--uniform", "1", "--n", "3"]) == 0
        assert json.loads(capsys.readouterr().out) == [0, 1, 2, 3]

    def test_q_below_one(self, capsys):
        assert main(["scale", "--qscale", "0.5", "--n", "3"]) == 2
        assert "q > 1" in capsys.readouterr().err

    def test_random_uses_env_seed(self, capsys, monkeypatch):
        args = ["scale", "--random", "--n", "5", "--min-gap", "0.1", "--max-gap", "1"]
        monkeypatch.setenv("CHRONOSCALE_SEED", "11")
        main(args)
        env = capsys.readouterr().out
        main([*args, "--seed", "11"])
        assert capsys.readouterr().out == env
        main([*args, "--seed", "12"])
        assert capsys.readouterr().out != env


class TestSolve:
    def test_exact_input(self, tmp_path):
        code, text = run(["solve", str(FIX / "harmonic_conjugate.json")], tmp_path)
        rep = json.loads(text)
        assert code == 0
        assert rep["x_source"] == "exact"
        assert rep["epsilon"] < 1e-12
        assert rep["sup_deviation"] < 1e-12
        assert rep["residual_ok"] and rep["bound_ok"]

    def test_x_file(self, tmp_path):
        xfile = tmp_path / "x.json"
        xfile.write_text(json.dumps([0.1 * i for i in range(8)]))
        code, text = run(["solve", str(FIX / "uniform_order3.json"), "--x", str(xfile)], tmp_path)
        rep = json.loads(text)
        assert code == 0 and rep["x_source"] == "file"
        assert rep["x"] == pytest.approx([0.1 * i for i in range(8)])
        assert rep["anchors"] == [0, 2, 7]

    def test_anchor_flag_overrides_file(self, tmp_path):
        _, text = run(["solve", str(FIX / "uniform_order3.json"), "--anchors", "1,1,1"], tmp_path)
        assert json.loads(text)["anchors"] == [1, 1, 1]

    def test_header(self, tmp_path):
        _, text = run(["solve", str(FIX / "qscale_order2.json")], tmp_path)
        rep = json.loads(text)
        assert rep["tool"] == "chronoscale" and rep["command"] == "solve"
        assert len(rep["input_digest"]) == 64


class TestStability:
    ARGS = ["stability", str(FIX / "qscale_order2.json"), "--trials", "10", "--shape", "uniform"]

    def test_seed_reproducible_bitwise(self, tmp_path):
        _, a = run([*self.ARGS, "--seed", "5"], tmp_path, "a.json")
        _, b = run([*self.ARGS, "--seed", "5"], tmp_path, "b.json")
        _, c = run([*self.ARGS, "--seed", "6"], tmp_path, "c.json")
        assert a == b
        assert a != c

    def test_env_seed_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CHRONOSCALE_SEED", "5")
        _, a = run(self.ARGS, tmp_path, "a.json")
        monkeypatch.delenv("CHRONOSCALE_SEED")
        _, b = run([*self.ARGS, "--seed", "5"], tmp_path, "b.json")
        assert a == b

    def test_bad_env_seed(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CHRONOSCALE_SEED", "seven")
        assert run(self.ARGS, tmp_path)[0] == 2

    def test_doubled_magnitude_doubles_epsilon(self, tmp_path):
        _, a = run([*self.ARGS, "--seed", "1", "--magnitude", "1e-3"], tmp_path, "a.json")
        _, b = run([*self.ARGS, "--seed", "1", "--magnitude", "2e-3"], tmp_path, "b.json")
        ta, tb = json.loads(a)["trials"], json.loads(b)["trials"]
        for x, y in zip(ta, tb):
            assert y["epsilon"] == pytest.approx(2 * x["epsilon"], rel=1e-9)
            assert y["K_empirical"] == pytest.approx(x["K_empirical"], rel=1e-9)

    def test_zero_magnitude_reports_nan_as_null(self, tmp_path):
        _, text = run([*self.ARGS, "--seed", "1", "--magnitude", "0"], tmp_path)
        rep = json.loads(text)
        assert rep["n_degenerate"] == 10
        assert rep["max_K_empirical"] is None
        assert all(t["K_empirical"] is None for t in rep["trials"])


class TestVerify:
    def test_order_one_gap_is_zero(self, tmp_path):
        prob = tmp_path / "p.json"
        prob.write_text(json.dumps({"scale": [0, 1, 3, 4], "phi": "t", "lambdas": [0.5]}))
        code, text = run(["verify", str(prob)], tmp_path)
        assert code == 0 and json.loads(text)["max_gap"] == 0

    def test_conjugate_alphas(self, tmp_path):
        code, text = run(["verify", str(FIX / "harmonic_conjugate.json")], tmp_path)
        assert code == 0 and json.loads(text)["pass"]


@pytest.mark.parametrize(
    "argv, code, needle",
    [
        (["solve", "malformed.json"], 2, "malformed JSON"),
        (["verify", "not_monic.json"], 2, "alpha_n must be exactly 1"),
        (["solve", "not_monic.json"], 2, "NotMonic"),
        (["scale", "--qscale", "0.5", "--n", "3"], 2, "q > 1"),
        (["stability", "non_regressive.json"], 3, "index 0 (t = 1.0)"),
        (["solve", "non_regressive.json"], 3, "RegressivityViolation"),
        (["solve", "does_not_exist.json"], 4, "No such file"),
        (["solve", "qscale_order2.json", "--anchors", "0,9"], 2, "tau_2"),
        (["stability", "qscale_order2.json", "--shape", "square"], 2, ""),
        (["frobnicate"], 2, ""),
    ],
)
def test_exit_codes(argv, code, needle, capsys, monkeypatch):
    monkeypatch.chdir(FIX)
    assert main(argv) == code
    assert needle in capsys.readouterr().err
