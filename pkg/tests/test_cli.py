"""Command-line surface: flags, file outputs, exit codes."""

import json
import subprocess
import sys

import pytest

from begmem.cli import THEORY_HEADER, main, parse_float_spec, parse_int_list
from begmem.experiments import CSV_HEADER


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "begmem", *args],
        capture_output=True, text=True, cwd=cwd,
    )


class TestSpecParsing:
    def test_range_spec_is_inclusive(self):
        grid = parse_float_spec("0.1:2.0:0.1")
        assert len(grid) == 20
        assert grid[0] == pytest.approx(0.1)
        assert grid[-1] == pytest.approx(2.0)

    def test_comma_list(self):
        assert parse_float_spec("0.05,0.2,0.8") == (0.05, 0.2, 0.8)
        assert parse_int_list("1000,2000") == (1000, 2000)

    def test_bad_specs(self):
        with pytest.raises(ValueError):
            parse_float_spec("1:2")
        with pytest.raises(ValueError):
            parse_float_spec("1:2:0")
        with pytest.raises(ValueError):
            parse_float_spec("2:1:0.5")


class TestTheoryCommand:
    def test_default_grid(self, tmp_path):
        out = tmp_path / "theory.csv"
        assert main(["theory", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == THEORY_HEADER
        assert len(lines) == 21  # header + 20 grid rows
        last = lines[-1].split(",")
        assert float(last[0]) == pytest.approx(2.0)
        assert 0.505 <= float(last[3]) <= 0.515

    def test_x_star_exceeds_x_hat_in_every_row(self, tmp_path):
        out = tmp_path / "theory.csv"
        main(["theory", "--out", str(out)])
        for line in out.read_text().splitlines()[1:]:
            _, xh, xs, a = (float(v) for v in line.split(","))
            assert xs > xh and a > 0

    def test_grid_outside_admissible_range(self, tmp_path):
        rc = main(["theory", "--gamma", "0.5:2.5:0.5",
                   "--out", str(tmp_path / "t.csv")])
        assert rc == 2

    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["theory", "--out", str(a)])
        main(["theory", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestSimulateCommand:
    def test_three_row_grid(self, tmp_path):
        out = tmp_path / "res.csv"
        rc = main([
            "simulate", "--variant", "thresholded", "--N", "100",
            "--gamma", "1.5", "--alpha", "0.05,0.2,0.8",
            "--trials", "4", "--seed", "7", "--out", str(out),
        ])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 4
        manifest = json.loads((tmp_path / "res.csv.manifest.json").read_text())
        assert manifest["config"]["master_seed"] == 7
        assert manifest["config"]["alpha_list"] == [0.05, 0.2, 0.8]

    def test_missing_required_flag_is_usage_error(self):
        res = run_cli("simulate", "--alpha", "0.5")
        assert res.returncode == 1
        assert "error" in res.stderr

    def test_unknown_flag_rejected(self):
        res = run_cli("simulate", "--N", "100", "--alpha", "0.5", "--frobnicate")
        assert res.returncode == 1

    def test_original_variant_runs_without_gamma(self, tmp_path):
        out = tmp_path / "orig.csv"
        rc = main(["simulate", "--variant", "original", "--N", "100",
                   "--alpha", "0.5", "--trials", "4", "--out", str(out)])
        assert rc == 0
        row = out.read_text().splitlines()[1].split(",")
        assert float(row[1]) == 0.0  # gamma column pinned to 0

    def test_help_documents_flags(self):
        res = run_cli("simulate", "--help")
        assert res.returncode == 0
        for flag in ("--variant", "--N", "--gamma", "--alpha", "--trials",
                     "--seed", "--threads", "--out", "--patterns-per-set"):
            assert flag in res.stdout


class TestScanCommand:
    def test_relative_geometric_scan(self, tmp_path):
        out = tmp_path / "scan.csv"
        rc = main([
            "scan", "--N", "100", "--gamma", "1.5",
            "--alpha-lo", "0.1", "--alpha-hi", "10", "--points", "4",
            "--geometric", "--relative", "--trials", "2", "--out", str(out),
        ])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 5
        alphas = [float(line.split(",")[2]) for line in lines[1:]]
        # geometric spacing: constant ratio
        ratios = [b / a for a, b in zip(alphas, alphas[1:])]
        assert all(r == pytest.approx(ratios[0], rel=1e-6) for r in ratios)

    def test_relative_needs_single_gamma(self, tmp_path):
        rc = main([
            "scan", "--N", "100", "--gamma", "1.0,1.5",
            "--alpha-lo", "0.1", "--alpha-hi", "1", "--relative",
            "--trials", "2", "--out", str(tmp_path / "s.csv"),
        ])
        assert rc == 2


class TestCriticalCommand:
    def test_summary_schema(self, tmp_path):
        out_json = tmp_path / "critical.json"
        rows_csv = tmp_path / "rows.csv"
        rc = main([
            "critical", "--N", "300", "--gamma", "1",
            "--lo", "0.01", "--hi", "8.0", "--trials", "12",
            "--max-iters", "4", "--seed", "3",
            "--out-json", str(out_json), "--rows-csv", str(rows_csv),
        ])
        assert rc == 0
        entries = json.loads(out_json.read_text())
        assert len(entries) == 1
        entry = entries[0]
        assert set(entry) == {"gamma", "N", "alpha_hat", "rows"}
        assert entry["N"] == 300 and entry["gamma"] == 1.0
        assert 0.01 < entry["alpha_hat"] < 8.0
        assert entry["rows"] == str(rows_csv)
        assert rows_csv.read_text().splitlines()[0] == CSV_HEADER

    def test_non_straddling_bracket_reports_data_error(self, tmp_path):
        out_json = tmp_path / "critical.json"
        rc = main([
            "critical", "--N", "300", "--gamma", "2",
            "--lo", "5.0", "--hi", "9.0", "--trials", "8",
            "--out-json", str(out_json),
            "--rows-csv", str(tmp_path / "rows.csv"),
        ])
        assert rc == 2
        entry = json.loads(out_json.read_text())[0]
        assert entry["alpha_hat"] is None
        assert "straddle" in entry["error"]

    def test_degenerate_bracket_is_data_error(self, tmp_path):
        rc = main([
            "critical", "--N", "100", "--gamma", "2",
            "--lo", "0.5", "--hi", "0.5", "--trials", "2",
            "--out-json", str(tmp_path / "c.json"),
            "--rows-csv", str(tmp_path / "r.csv"),
        ])
        assert rc == 2


class TestTopLevel:
    def test_version(self):
        res = run_cli("--version")
        assert res.returncode == 0
        assert "begmem" in res.stdout

    def test_no_subcommand_is_usage_error(self):
        res = run_cli()
        assert res.returncode == 1

    def test_reproducible_csv_for_fixed_seed(self, tmp_path):
        args = ["simulate", "--N", "120", "--gamma", "1.0", "--alpha",
                "0.1,0.6", "--trials", "5", "--seed", "42"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
