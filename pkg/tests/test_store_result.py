# -*- coding: utf-8 -*-

import numpy as np
import pandas as pd

from checks.report import TheoremReport
from core.store_result import (
    FIELD_COLUMNS, emit_field, emit_report, emit_series, format_value, parse_series, write_manifest,
)
from indicator.reconstruct import GridSpec, IndicatorField
from indicator.series import IndicatorSeries
from utils.file_handler import sha256_of_file


def small_field():
    grid = GridSpec(0.0, 0.1, 0.0, 0.1, 0.1)
    points = grid.points()
    return IndicatorField(
        grid=grid, mode="side_b", points=points, values=np.array([0.5, 12.0, np.nan, 1.0 / 3.0]),
        statuses=["Converged", "Diverged+", "Rejected", "Converged"], confidence=["high", "high", "high", "low"],
        needles=["straight", "straight", "", "detour_0"], mask=np.array([False, True, False, False]),
        contours=[np.array([[0.05, 0.0], [0.1, 0.05]])],
        thresholds={"window": 3, "tau_rel": 0.02, "g_min": 1.3, "a_min": 5.0},
    )


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(True) == "true"
    assert format_value(np.float64(2.5)) == "2.5"
    assert format_value(3) == "3"


def test_emit_field_rows_and_files(tmp_path):
    paths = emit_field(small_field(), str(tmp_path), prefix="side-b")
    names = sorted(p.split("/")[-1] for p in paths)
    assert names == ["side-b.csv", "side-b_contours.csv", "side-b_mask.txt", "side-b_matrix.txt", "side-b_summary.txt"]
    df = pd.read_csv(tmp_path / "side-b.csv", keep_default_na=False)
    assert tuple(df.columns) == FIELD_COLUMNS
    assert df[["x", "y"]].values.tolist() == [[0.0, 0.0], [0.1, 0.0], [0.0, 0.1], [0.1, 0.1]]
    assert df["status"].tolist() == ["Converged", "Diverged+", "Rejected", "Converged"]
    raw = (tmp_path / "side-b.csv").read_bytes()
    assert b"\r\n" not in raw
    assert b"0.33333333333333331" in raw
    matrix = np.loadtxt(tmp_path / "side-b_matrix.txt")
    assert matrix.shape == (2, 2)
    assert np.isnan(matrix[1, 0])
    summary = (tmp_path / "side-b_summary.txt").read_text(encoding="utf-8").splitlines()
    assert "mode = side_b" in summary
    assert "count.Converged = 2" in summary
    assert "contours = 1" in summary


def test_emit_empty_field_writes_header_only(tmp_path):
    grid = GridSpec(0.0, 0.1, 0.0, 0.1, 0.1)
    field = IndicatorField(grid=grid, mode="side_a", points=np.zeros((0, 2)), values=np.zeros(0), statuses=[],
                           confidence=[], needles=[], mask=np.zeros(0, dtype=bool))
    paths = emit_field(field, str(tmp_path))
    assert (tmp_path / "field.csv").read_text(encoding="utf-8") == ",".join(FIELD_COLUMNS) + "\n"
    assert not any(p.endswith("_matrix.txt") for p in paths)


def test_series_round_trip(tmp_path):
    series = IndicatorSeries(x=(0.1, 0.2), needle_id="straight")
    series.values = [0.5, 1.5, 4.5]
    series.residuals = [1e-3, 2e-3, 4e-3]
    series.grad_energy_D = [1.0, 4.0, 16.0]
    series.l2_D = [0.5, 1.0, 2.0]
    series.ratio = [l / np.sqrt(g) for l, g in zip(series.l2_D, series.grad_energy_D)]
    series.boundary_ratio = [0.3, 0.2, 0.1]
    series.component_energy = {1: [1.0, 4.0, 16.0]}
    series.component_ratio = {1: series.ratio}
    path = emit_series(series, str(tmp_path / "series.csv"))
    header = open(path, encoding="utf-8").readline().strip().split(",")
    assert header == ["n", "I_n", "grad_energy_D", "ratio", "residual", "boundary_ratio", "grad_energy_D_1",
                      "ratio_D_1"]
    parsed = parse_series(path)
    assert parsed.rows() == series.rows()
    np.testing.assert_allclose(parsed.l2_D, series.l2_D, rtol=1e-15)


def test_emit_report(tmp_path):
    reports = [
        TheoremReport.from_verdict("ratio_decay", "two_disks", {"growth": 12.5}, {"growth": 10.0}, True, "into_first",
                                   {"ratio_decay": [{"n": 0, "h1": 1.0}, {"n": 1, "h1": 12.5}]}),
        TheoremReport("boundary_blowup", "empty", {"growth": 0.0}, {"growth": 10.0}, False,
                      "PREMISE_NOT_REALIZED", "", "前提未实现"),
    ]
    paths = emit_report(reports, str(tmp_path))
    text = (tmp_path / "report.txt").read_text(encoding="utf-8")
    assert "[two_disks/ratio_decay/into_first]" in text
    assert "statistic.growth = 12.5" in text
    assert "passed = false" in text
    summary = pd.read_csv(tmp_path / "report_summary.csv", keep_default_na=False)
    assert summary["status"].tolist() == ["PASS", "PREMISE_NOT_REALIZED"]
    assert any(p.endswith("two_disks__ratio_decay__into_first.csv") for p in paths)


def test_manifest_lists_hashes(tmp_path):
    first = tmp_path / "b.txt"
    second = tmp_path / "sub" / "a.txt"
    second.parent.mkdir()
    first.write_text("beta\n", encoding="utf-8")
    second.write_text("alpha\n", encoding="utf-8")
    path = write_manifest(str(tmp_path), [str(first), str(second), str(first)], generated_at="2024-01-01T00:00:00")
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines[0] == "generated_at = 2024-01-01T00:00:00"
    assert lines[1:] == [f"{sha256_of_file(str(first))}  b.txt", f"{sha256_of_file(str(second))}  sub/a.txt"]
