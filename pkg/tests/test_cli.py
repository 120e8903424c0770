import json

import numpy as np
import pytest

from hmtlab.cli import main


def run_cli(args):
    return main(args)


class TestGreenCommand:
    def test_zero_potential(self, tmp_path, capsys):
        out = tmp_path / "g.json"
        code = run_cli(["green", "--n", "2", "--potential", "zero", "--grid-points", "512",
                        "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert abs(doc["c_g"]) < 1e-6
        assert doc["format_version"].startswith("hmtlab")
        assert doc["config"]["potential"] == "zero"

    def test_hardy_potential(self, tmp_path):
        out = tmp_path / "g.json"
        code = run_cli(["green", "--n", "3", "--potential", "hardy", "--grid-points", "512",
                        "--epsilon", "1e-4", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["residual"] <= doc["tol"]
        assert len(doc["r"]) == 512

    def test_invalid_dimension(self, capsys):
        assert run_cli(["green", "--n", "1"]) == 1

    def test_invalid_beta(self):
        assert run_cli(["search", "--mode", "lambda1", "--n", "5", "--beta", "7"]) == 1

    def test_unknown_potential(self):
        assert run_cli(["green", "--potential", "banana"]) == 1


class TestVerifyCommand:
    def test_default_corpus_passes(self, tmp_path):
        out = tmp_path / "v.json"
        code = run_cli(["verify", "--n", "2", "--grid-points", "1024", "--t-points", "2048",
                        "--corpus-size", "6", "--seed", "42", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["summary"]["violation"] is None
        assert doc["summary"]["profiles"] == 6

    def test_zero_potential_identity(self, tmp_path):
        out = tmp_path / "v0.json"
        code = run_cli(["verify", "--n", "2", "--potential", "zero", "--grid-points", "1024",
                        "--corpus-size", "4", "--epsilon", "1e-9", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["summary"]["max_grad_defect"] < 1e-8
        assert doc["summary"]["max_hardy_defect"] < 1e-8

    def test_corrupted_green_table(self, tmp_path):
        good = tmp_path / "good.json"
        assert run_cli(["green", "--n", "2", "--potential", "hardy", "--grid-points", "512",
                        "--epsilon", "1e-4", "--out", str(good)]) == 0
        doc = json.loads(good.read_text())
        doc["G"][10] = doc["G"][5] + 1.0  # break monotonicity
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        assert run_cli(["verify", "--green-table", str(bad)]) == 2

    def test_valid_green_table(self, tmp_path):
        good = tmp_path / "good.json"
        run_cli(["green", "--n", "2", "--potential", "hardy", "--grid-points", "512",
                 "--epsilon", "1e-4", "--out", str(good)])
        assert run_cli(["verify", "--green-table", str(good), "--out",
                        str(tmp_path / "check.json")]) == 0


class TestSweepCommand:
    def test_boundedness_csv(self, tmp_path):
        out = tmp_path / "s.csv"
        code = run_cli(["sweep", "--mode", "boundedness", "--n", "2", "--beta", "0",
                        "--grid-points", "1024", "--k-max", "20", "--format", "csv",
                        "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# format_version=")
        assert lines[1].startswith("# config=")
        assert lines[2] == "param,value,overflow,divergence_flag"
        assert len(lines) == 3 + 20

    def test_divergence_mode(self, tmp_path):
        out = tmp_path / "d.csv"
        code = run_cli(["sweep", "--mode", "divergence", "--n", "2", "--grid-points", "1024",
                        "--k-max", "8", "--format", "csv", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        header = lines[2].split(",")
        assert header[:4] == ["param", "value", "overflow", "divergence_flag"]
        assert "truncation_m" in header

    def test_improved_requires_lambda(self):
        assert run_cli(["sweep", "--mode", "improved", "--n", "2"]) == 1

    def test_improved_mode(self, tmp_path):
        out = tmp_path / "i.json"
        code = run_cli(["sweep", "--mode", "improved", "--n", "2", "--grid-points", "1024",
                        "--k-max", "6", "--lam", "1.36", "--lambda1", "2.72",
                        "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert len(doc["rows"]) == 6

    def test_missing_mode(self):
        assert run_cli(["sweep", "--n", "2"]) == 1


class TestSearchCommand:
    def test_lambda1_search(self, tmp_path):
        out = tmp_path / "l.json"
        code = run_cli(["search", "--mode", "lambda1", "--n", "2", "--grid-points", "512",
                        "--max-iter", "40", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["search"]["best_value"] > 0

    def test_mt_search(self, tmp_path):
        out = tmp_path / "m.json"
        code = run_cli(["search", "--mode", "mt", "--n", "2", "--beta", "0.5",
                        "--grid-points", "512", "--max-iter", "30", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        traj = doc["search"]["trajectory"]
        assert all(b[1] >= a[1] for a, b in zip(traj, traj[1:]))


class TestRearrangeDemo:
    def test_json_output(self, tmp_path):
        out = tmp_path / "r.json"
        code = run_cli(["rearrange-demo", "--n", "2", "--grid-points", "1024",
                        "--seed", "3", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["polya_szego_margin"] >= -1e-8
        star = np.asarray(doc["u_star"])
        assert np.all(np.diff(star) <= 1e-12)


class TestDeterminism:
    def test_verify_byte_identical(self, tmp_path):
        args = ["verify", "--n", "2", "--grid-points", "1024", "--t-points", "2048",
                "--corpus-size", "4", "--seed", "7"]
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        assert run_cli(args + ["--out", str(out1)]) == 0
        assert run_cli(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_sweep_byte_identical(self, tmp_path):
        args = ["sweep", "--mode", "boundedness", "--n", "2", "--grid-points", "1024",
                "--k-max", "10", "--seed", "11", "--format", "csv"]
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert run_cli(args + ["--out", str(out1)]) == 0
        assert run_cli(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestConfigFile:
    def test_file_plus_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 2, "grid_points": 512, "potential": "zero"}))
        out = tmp_path / "g.json"
        code = run_cli(["green", "--config", str(cfg), "--grid-points", "1024",
                        "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["config"]["grid_points"] == 1024  # flag overrides file
        assert doc["config"]["potential"] == "zero"

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"grid_pts": 512}))
        assert run_cli(["green", "--config", str(cfg)]) == 1
