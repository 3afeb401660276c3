# -*- coding: utf-8 -*-

"""
结果文件的写出：指示场（CSV + 网格矩阵 + 摘要 + 等值线）、指示序列、拟合报告、校验报告与清单。

所有 CSV 列名固定（见 README），浮点数 17 位有效数字，行尾 LF，行顺序确定。
"""

import logging
import math
import os
import re
from datetime import datetime
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from checks.report import TheoremReport
from indicator.reconstruct import IndicatorField
from indicator.series import IndicatorSeries
from needles.fitting import NeedleSequence
from utils.file_handler import save_lines, save_matrix, save_rows_to_csv, sha256_of_file

FIELD_COLUMNS = ("x", "y", "value", "status", "confidence", "needle")
CONTOUR_COLUMNS = ("contour", "vertex", "x", "y")
SERIES_BASE_COLUMNS = ("n", "I_n", "grad_energy_D", "ratio", "residual")
REPORT_SUMMARY_COLUMNS = ("scenario", "check_id", "subject", "status", "passed")
FORWARD_COLUMNS = ("case", "reference", "rel_error", "max_boundary_residual", "condition")
MANIFEST_NAME = "manifest.txt"


def format_value(value: Any) -> str:
    """key = value 文本中的取值格式：浮点数 17 位有效数字，布尔值小写。"""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, '.17g')
    if isinstance(value, (np.floating,)):
        return format(float(value), '.17g')
    return str(value)


def _safe_name(text: str) -> str:
    return re.sub(r'[^A-Za-z0-9_.+-]+', '_', text) or "_"


# -----------------------------------------------------------------------------
# 1. 指示场
# -----------------------------------------------------------------------------

def emit_field(field: IndicatorField, out_dir: str, prefix: str = "field") -> List[str]:
    """
    写出指示场：
      <prefix>.csv          每个网格点一行（行优先），列 x, y, value, status, confidence, needle
      <prefix>_matrix.txt   (ny, nx) 值矩阵，拒绝点为 NaN
      <prefix>_mask.txt     (ny, nx) 0/1 掩码
      <prefix>_contours.csv 等值线折线顶点
      <prefix>_summary.txt  模式、网格与判定阈值

    Returns:
        写出的文件路径列表。
    """
    rows = [{"x": float(p[0]), "y": float(p[1]), "value": float(v), "status": s, "confidence": c, "needle": n}
            for p, v, s, c, n in zip(field.points, field.values, field.statuses, field.confidence, field.needles)]
    paths = [os.path.join(out_dir, f"{prefix}.csv")]
    save_rows_to_csv(rows, FIELD_COLUMNS, paths[-1])
    if len(rows):
        paths.append(os.path.join(out_dir, f"{prefix}_matrix.txt"))
        save_matrix(field.value_matrix(), paths[-1])
        paths.append(os.path.join(out_dir, f"{prefix}_mask.txt"))
        save_matrix(np.asarray(field.mask, dtype=float).reshape(field.shape), paths[-1])
    contour_rows = [{"contour": i, "vertex": j, "x": float(p[0]), "y": float(p[1])}
                    for i, line in enumerate(field.contours) for j, p in enumerate(line)]
    paths.append(os.path.join(out_dir, f"{prefix}_contours.csv"))
    save_rows_to_csv(contour_rows, CONTOUR_COLUMNS, paths[-1])

    grid = field.grid
    counts = {s: field.statuses.count(s) for s in sorted(set(field.statuses))}
    lines = [f"mode = {field.mode}"]
    lines += [f"grid.{name} = {format_value(float(getattr(grid, name)))}"
              for name in ("x_min", "x_max", "y_min", "y_max", "h", "margin")]
    lines += [f"threshold.{key} = {format_value(value)}" for key, value in sorted(field.thresholds.items())]
    lines += [f"count.{status} = {count}" for status, count in counts.items()]
    lines.append(f"contours = {len(field.contours)}")
    paths.append(os.path.join(out_dir, f"{prefix}_summary.txt"))
    save_lines(lines, paths[-1])
    return paths


# -----------------------------------------------------------------------------
# 2. 指示序列与拟合报告
# -----------------------------------------------------------------------------

def series_columns(series: IndicatorSeries) -> List[str]:
    if not series.has_companions:
        return ["n", "I_n", "residual"]
    columns = list(SERIES_BASE_COLUMNS) + ["boundary_ratio"]
    for j in sorted(series.component_energy):
        columns += [f"grad_energy_D_{j}", f"ratio_D_{j}"]
    return columns


def emit_series(series: IndicatorSeries, path: str) -> str:
    save_rows_to_csv(series.rows(), series_columns(series), path)
    return path


def parse_series(path: str, x: tuple = (float("nan"), float("nan")), needle_id: str = "") -> IndicatorSeries:
    """读回 emit_series 写出的 CSV；行内容与原序列的 rows() 一致。"""
    df = pd.read_csv(path)
    series = IndicatorSeries(x=x, needle_id=needle_id)
    series.values = [float(v) for v in df["I_n"]]
    series.residuals = [float(v) for v in df["residual"]]
    if "grad_energy_D" in df.columns:
        series.grad_energy_D = [float(v) for v in df["grad_energy_D"]]
        series.ratio = [float(v) for v in df["ratio"]]
        series.l2_D = [r * math.sqrt(g) for r, g in zip(series.ratio, series.grad_energy_D)]
        series.boundary_ratio = [float(v) for v in df["boundary_ratio"]]
        for column in df.columns:
            match = re.fullmatch(r'grad_energy_D_(\d+)', column)
            if match:
                j = int(match.group(1))
                series.component_energy[j] = [float(v) for v in df[column]]
                series.component_ratio[j] = [float(v) for v in df[f"ratio_D_{j}"]]
    return series


def emit_fit_report(seq: NeedleSequence, path: str) -> str:
    rows = seq.report_rows()
    columns = ["n", "eps", "M", "alpha", "residual", "coef_norm", "normalized_coef_norm"]
    columns += [f"h1_on_{name}" for name in sorted(seq.compact_sets)]
    save_rows_to_csv(rows, columns, path)
    return path


def emit_forward_check(rows: List[Dict[str, Any]], path: str) -> str:
    save_rows_to_csv(rows, FORWARD_COLUMNS, path)
    return path


# -----------------------------------------------------------------------------
# 3. 校验报告
# -----------------------------------------------------------------------------

def emit_report(reports: Sequence[TheoremReport], out_dir: str) -> List[str]:
    """
    写出校验报告：report.txt（每项一个 key = value 块）、report_summary.csv，
    以及 tables/ 下每项校验的明细 CSV。
    """
    lines = []
    summary = []
    paths = []
    for report in reports:
        header = f"[{report.scenario}/{report.check_id}" + (f"/{report.subject}]" if report.subject else "]")
        lines.append(header)
        lines.append(f"status = {report.status}")
        lines.append(f"passed = {format_value(report.passed)}")
        lines += [f"statistic.{k} = {format_value(v)}" for k, v in report.statistics.items()]
        lines += [f"threshold.{k} = {format_value(v)}" for k, v in report.thresholds.items()]
        if report.message:
            lines.append(f"message = {report.message}")
        lines.append("")
        summary.append({"scenario": report.scenario, "check_id": report.check_id, "subject": report.subject,
                        "status": report.status, "passed": format_value(report.passed)})
        for name, table in report.tables.items():
            parts = [report.scenario, name] + ([report.subject] if report.subject else [])
            path = os.path.join(out_dir, "tables", _safe_name("__".join(parts)) + ".csv")
            columns = list(table[0].keys()) if table else []
            save_rows_to_csv(table, columns, path)
            paths.append(path)
    report_path = os.path.join(out_dir, "report.txt")
    save_lines(lines, report_path)
    summary_path = os.path.join(out_dir, "report_summary.csv")
    save_rows_to_csv(summary, REPORT_SUMMARY_COLUMNS, summary_path)
    return [report_path, summary_path] + paths


# -----------------------------------------------------------------------------
# 4. 清单
# -----------------------------------------------------------------------------

def write_manifest(out_dir: str, files: Sequence[str], generated_at: Optional[str] = None) -> str:
    """
    manifest.txt：首行为单独的 generated_at 时间戳，其后每个文件一行 "sha256  相对路径"（按路径排序）。
    """
    stamp = generated_at or datetime.now().isoformat(timespec='seconds')
    relative = sorted({os.path.relpath(f, out_dir).replace(os.sep, '/') for f in files})
    lines = [f"generated_at = {stamp}"]
    lines += [f"{sha256_of_file(os.path.join(out_dir, r))}  {r}" for r in relative]
    path = os.path.join(out_dir, MANIFEST_NAME)
    save_lines(lines, path)
    logging.info(f"清单已写出：{len(relative)} 个文件。")
    return path
