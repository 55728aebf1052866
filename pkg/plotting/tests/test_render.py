"""Rendering and schema validation for the plotting package."""

import json

import pytest

from begplot import (
    PlotJob,
    SchemaError,
    read_results_csv,
    read_theory_csv,
    render_alpha_sweep,
    render_capacity_figure,
)

THEORY_HEADER = "gamma,x_hat,x_star,alpha_star"
RESULT_HEADER = ("N,gamma,alpha,M,trials,tested_patterns,unstable_fraction,"
                 "zero_on_fraction,erase_fraction,flip_fraction,ci_lo,ci_hi,"
                 "wall_seconds,seed")

THEORY_ROWS = [
    "0.5,54.5981500,143.324922,0.00351308818",
    "1,7.3890561,16.8010162,0.0632870689",
    "1.5,3.79366789,7.57991806,0.227966365",
    "2,2.71828183,4.92155363,0.510001950",
]


def write_theory(path, rows=None, header=THEORY_HEADER):
    lines = [header] + (THEORY_ROWS if rows is None else rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_results(path, rows, header=RESULT_HEADER):
    path.write_text("\n".join([header] + rows) + "\n")
    return path


def result_line(n, gamma, alpha, frac, ci_lo, ci_hi):
    return (f"{n},{gamma},{alpha},100,20,20,{frac},0,{frac},0,"
            f"{ci_lo},{ci_hi},0,1")


class TestSchemaValidation:
    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError, match="not found"):
            read_theory_csv(tmp_path / "absent.csv")

    def test_malformed_theory_header_names_column(self, tmp_path):
        bad = write_theory(tmp_path / "bad.csv",
                           header="gamma,x_hat,xstar,alpha_star")
        with pytest.raises(SchemaError, match="column 3.*'xstar'"):
            read_theory_csv(bad)

    def test_trailing_column_rejected(self, tmp_path):
        bad = write_theory(tmp_path / "bad.csv",
                           header=THEORY_HEADER + ",extra")
        with pytest.raises(SchemaError, match="trailing"):
            read_theory_csv(bad)

    def test_empty_data_rows_rejected(self, tmp_path):
        empty = write_theory(tmp_path / "empty.csv", rows=[])
        with pytest.raises(SchemaError, match="no data rows"):
            read_theory_csv(empty)

    def test_results_header_checked(self, tmp_path):
        bad = write_results(tmp_path / "r.csv", [result_line(100, 1, 0.1, 0, 0, 0.1)],
                            header=RESULT_HEADER.replace("ci_lo", "ci_low"))
        with pytest.raises(SchemaError, match="ci_low"):
            read_results_csv(bad)


class TestCapacityFigure:
    def test_curve_only(self, tmp_path):
        theory = write_theory(tmp_path / "theory.csv")
        out = tmp_path / "fig.png"
        info = render_capacity_figure(PlotJob(theory_csv=str(theory),
                                              out_image=str(out)))
        assert out.exists() and out.stat().st_size > 0
        assert info["theory_points"] == 4
        assert info["critical_markers"] == 0
        assert info["right_endpoint"][0] == 2.0

    def test_markers_from_critical_json(self, tmp_path):
        theory = write_theory(tmp_path / "theory.csv")
        critical = tmp_path / "critical.json"
        critical.write_text(json.dumps([
            {"gamma": 1.0, "N": 1000, "alpha_hat": 0.21, "rows": "r.csv"},
            {"gamma": 2.0, "N": 1000, "alpha_hat": None, "rows": "r.csv"},
        ]))
        out = tmp_path / "fig.png"
        info = render_capacity_figure(PlotJob(
            theory_csv=str(theory), critical_json=str(critical),
            out_image=str(out)))
        assert info["critical_markers"] == 1  # null alpha_hat entries skipped

    def test_error_bars_from_result_cis(self, tmp_path):
        theory = write_theory(tmp_path / "theory.csv")
        results = write_results(tmp_path / "rows.csv", [
            result_line(1000, 1.0, 0.05, 0.02, 0.0, 0.10),
            result_line(1000, 1.0, 0.20, 0.50, 0.35, 0.65),
            result_line(1000, 1.0, 0.80, 0.95, 0.88, 0.99),
        ])
        critical = tmp_path / "critical.json"
        critical.write_text(json.dumps(
            [{"gamma": 1.0, "N": 1000, "alpha_hat": 0.2, "rows": "rows.csv"}]))
        out = tmp_path / "fig.png"
        info = render_capacity_figure(PlotJob(
            theory_csv=str(theory), critical_json=str(critical),
            results_csv=str(results), out_image=str(out)))
        assert info["critical_markers"] == 1
        assert out.stat().st_size > 0

    def test_reference_lines_pass_through(self, tmp_path):
        theory = write_theory(tmp_path / "theory.csv")
        out = tmp_path / "fig.png"
        render_capacity_figure(PlotJob(
            theory_csv=str(theory), out_image=str(out),
            reference_lines={"other model A": 0.17, "other model B": 0.25}))
        assert out.stat().st_size > 0

    def test_structural_determinism(self, tmp_path):
        theory = write_theory(tmp_path / "theory.csv")
        a = render_capacity_figure(PlotJob(theory_csv=str(theory),
                                           out_image=str(tmp_path / "a.png")))
        b = render_capacity_figure(PlotJob(theory_csv=str(theory),
                                           out_image=str(tmp_path / "b.png")))
        assert a["endpoint_label"] == b["endpoint_label"]
        assert a["theory_points"] == b["theory_points"]


class TestAlphaSweep:
    def test_single_group(self, tmp_path):
        results = write_results(tmp_path / "r.csv", [
            result_line(500, 1.5, a, f, max(0.0, f - 0.1), min(1.0, f + 0.1))
            for a, f in [(0.02, 0.0), (0.1, 0.2), (0.5, 0.9), (2.0, 1.0)]
        ])
        out = tmp_path / "sweep.png"
        info = render_alpha_sweep(str(results), str(out))
        assert info["groups"] == 1
        assert out.stat().st_size > 0

    def test_two_sizes_two_curves_with_threshold_lines(self, tmp_path):
        theory = write_theory(tmp_path / "theory.csv")
        rows = []
        for n in (500, 1000):
            rows += [result_line(n, 1.5, a, f, f - 0.05, f + 0.05)
                     for a, f in [(0.05, 0.1), (0.3, 0.6), (1.0, 0.95)]]
        results = write_results(tmp_path / "r.csv", rows)
        out = tmp_path / "sweep.png"
        info = render_alpha_sweep(str(results), str(out), theory_csv=str(theory))
        assert info["groups"] == 2

    def test_empty_rows_error_not_empty_image(self, tmp_path):
        results = write_results(tmp_path / "r.csv", [])
        out = tmp_path / "sweep.png"
        with pytest.raises(SchemaError, match="no data rows"):
            render_alpha_sweep(str(results), str(out))
        assert not out.exists()
