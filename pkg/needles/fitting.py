# -*- coding: utf-8 -*-

"""
针序列的数值构造：在挖去管状邻域 σ_ε 的 Ω 上，用 Fourier–Bessel 展开以 Tikhonov 正则化最小二乘
逼近基本解 G_k(·,x)（同时匹配值与梯度）。随 ε_n → 0、M_n 增大，v_n 在远离针的紧集上收敛到 G，
在针上爆破。
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg

from core.errors import GeometryError, RankDeficient, ScheduleError, ScheduleTooAggressive
from geometry.curves import CurveSpec, curve_polygon, discretize
from geometry.needle import NeedleSpec, dist_to_needle, require_valid_needle
from helmholtz.specfun import green2d
from .entire import EntireSolution, basis_matrices, eval_entire
from .schedule import ScheduleStep

DEFAULT_SPACING = 0.04
COEFFICIENT_GUARD = 1e12
RESIDUAL_GROWTH_LIMIT = 10.0
COMPACT_ORDER = 24

Target = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


@dataclass
class MatchingCloud:
    points: np.ndarray
    spacing: float
    boundary_count: int


def matching_cloud(outer: CurveSpec, needle: NeedleSpec, eps: float, spacing: float = DEFAULT_SPACING) -> MatchingCloud:
    """
    匹配点云：∂Ω 节点 + 间距为 spacing 的六角格内点，去掉 σ_ε 内的点。点云是确定性的。
    """
    polygon = curve_polygon(outer)
    perimeter = float(np.sum(np.linalg.norm(np.diff(np.vstack([polygon, polygon[:1]]), axis=0), axis=1)))
    M_boundary = max(16, 2 * int(np.ceil(0.5 * perimeter / spacing)))
    boundary = discretize(outer, M_boundary).nodes

    lo = polygon.min(axis=0)
    hi = polygon.max(axis=0)
    row_gap = spacing * np.sqrt(3.0) / 2.0
    rows = []
    for j, y in enumerate(np.arange(lo[1], hi[1] + row_gap, row_gap)):
        xs = np.arange(lo[0] + (0.5 * spacing if j % 2 else 0.0), hi[0] + spacing, spacing)
        rows.append(np.stack([xs, np.full(xs.shape, y)], axis=-1))
    lattice = np.concatenate(rows, axis=0)
    lattice = lattice[outer.contains(lattice)]

    boundary = boundary[dist_to_needle(boundary, needle) > eps]
    lattice = lattice[dist_to_needle(lattice, needle) > eps]
    return MatchingCloud(points=np.concatenate([boundary, lattice], axis=0), spacing=spacing,
                         boundary_count=boundary.shape[0])


def green_target(k: float, x) -> Target:
    """默认拟合目标 G_k(·,x) 及其梯度。"""
    x = np.asarray(x, dtype=float)

    def target(points: np.ndarray):
        green = green2d(k, points, x)
        return green.value, green.gradient_z

    return target


@dataclass
class FitReport:
    n: int
    eps: float
    M: int
    alpha: float
    residual: float
    coef_norm: float
    normalized_norm: float
    cloud_size: int
    h1_on_K: Dict[str, float] = field(default_factory=dict)
    relative_on_K: Dict[str, float] = field(default_factory=dict)


def h1_distance(v: EntireSolution, target: Target, region, order: int = COMPACT_ORDER) -> Tuple[float, float]:
    """紧集上的离散 ‖v - G‖_{L²} + ‖∇(v - G)‖_{L²}，以及相对 G 的同一范数的比值。"""
    points, weights = region.nodes_and_weights(order)
    active = weights != 0
    points, weights = points[active], weights[active]
    value, gradient = eval_entire(v, points)
    t_value, t_gradient = target(points)
    l2 = np.sqrt(np.sum(weights * np.abs(value - t_value) ** 2))
    grad = np.sqrt(np.sum(weights * np.sum(np.abs(gradient - t_gradient) ** 2, axis=-1)))
    ref = np.sqrt(np.sum(weights * np.abs(t_value) ** 2)) + np.sqrt(
        np.sum(weights * np.sum(np.abs(t_gradient) ** 2, axis=-1)))
    distance = float(l2 + grad)
    return distance, distance / float(ref) if ref > 0 else float("inf")


def fit_needle_element(x, needle: NeedleSpec, eps: float, M: int, alpha: float, outer: CurveSpec, k: float,
                       center=None, spacing: float = DEFAULT_SPACING, n: int = 0,
                       previous_residual: Optional[float] = None, compact_sets: Optional[Dict[str, object]] = None,
                       target: Optional[Target] = None) -> Tuple[EntireSolution, FitReport]:
    """
    拟合一个针元素。

    最小化 sum|v - G|² + sum h²|∇v - ∇G|² + α‖c‖²；系数按列 RMS 归一化后用 SVD 滤波因子 s/(s²+α) 求解，
    α 作用在归一化系数上。

    Args:
        x: 针尖。
        needle (NeedleSpec): 已校验的针。
        eps, M, alpha: 管半径、展开阶、正则化参数。
        outer (CurveSpec): ∂Ω。
        k (float): 波数。
        center: 展开中心，默认 Ω 的质心。
        previous_residual: 上一步的相对残差，用于检测残差失控。
        compact_sets: 名称 -> 区域，记录 H¹(K) 误差。
        target: 替换 G 的拟合目标（测试钩子）。

    Raises:
        RankDeficient: 点云点数少于未知数个数。
        ScheduleTooAggressive: 残差比上一步增长超过 10 倍，或归一化系数范数超过 1e12。
    """
    center = tuple(outer.centroid) if center is None else tuple(center)
    target = green_target(k, x) if target is None else target
    cloud = matching_cloud(outer, needle, eps, spacing)
    unknowns = 2 * M + 1
    if cloud.points.shape[0] < unknowns:
        raise RankDeficient(f"匹配点云只有 {cloud.points.shape[0]} 个点，少于未知数 {unknowns}。")

    values, grad_x, grad_y = basis_matrices(center, k, M, cloud.points)
    h = cloud.spacing
    matrix = np.vstack([values, h * grad_x, h * grad_y])
    t_value, t_gradient = target(cloud.points)
    rhs = np.concatenate([t_value, h * t_gradient[:, 0], h * t_gradient[:, 1]])

    column_scale = np.sqrt(np.mean(np.abs(matrix) ** 2, axis=0))
    column_scale[column_scale == 0] = 1.0
    normalized = matrix / column_scale
    U, s, Vh = scipy.linalg.svd(normalized, full_matrices=False)
    y = Vh.conj().T @ ((s / (s ** 2 + alpha)) * (U.conj().T @ rhs))
    coefficients = y / column_scale

    residual = float(np.linalg.norm(normalized @ y - rhs) / max(np.linalg.norm(rhs), 1e-300))
    normalized_norm = float(np.linalg.norm(y))
    if not np.isfinite(normalized_norm) or normalized_norm > COEFFICIENT_GUARD:
        raise ScheduleTooAggressive(f"归一化系数范数 {normalized_norm:.3e} 超过 {COEFFICIENT_GUARD:.0e}。", n)
    if previous_residual is not None and previous_residual > 0 and residual > RESIDUAL_GROWTH_LIMIT * previous_residual:
        raise ScheduleTooAggressive(f"拟合残差由 {previous_residual:.3e} 增至 {residual:.3e}。", n)

    v = EntireSolution(center, k, coefficients)
    report = FitReport(n=n, eps=eps, M=M, alpha=alpha, residual=residual,
                       coef_norm=float(np.linalg.norm(coefficients)), normalized_norm=normalized_norm,
                       cloud_size=int(cloud.points.shape[0]))
    for name, region in (compact_sets or {}).items():
        report.h1_on_K[name], report.relative_on_K[name] = h1_distance(v, target, region)
    logging.debug(f"针元素 n={n}: 点云 {report.cloud_size} 点，奇异值范围 [{s[-1]:.3e}, {s[0]:.3e}]。")
    return v, report


@dataclass
class NeedleSequence:
    x: Tuple[float, float]
    needle: NeedleSpec
    schedule: List[ScheduleStep]
    elements: List[EntireSolution] = field(default_factory=list)
    reports: List[FitReport] = field(default_factory=list)
    compact_sets: Dict[str, object] = field(default_factory=dict)
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.elements)

    def h1_errors(self, name: str) -> np.ndarray:
        return np.array([r.h1_on_K[name] for r in self.reports])

    def coefficient_norms(self) -> np.ndarray:
        return np.array([r.coef_norm for r in self.reports])

    def report_rows(self) -> List[Dict[str, float]]:
        """
        拟合报告的行（列：n, eps, M, alpha, residual, coef_norm, normalized_coef_norm, h1_on_K...）。

        coef_norm 为原始系数的范数；normalized_coef_norm 为列归一化后的系数范数，即系数上限保护所检验的量。
        """
        rows = []
        for r in self.reports:
            row = {"n": r.n, "eps": r.eps, "M": r.M, "alpha": r.alpha, "residual": r.residual, "coef_norm": r.coef_norm,
                   "normalized_coef_norm": r.normalized_norm}
            for name in sorted(r.h1_on_K):
                row[f"h1_on_{name}"] = r.h1_on_K[name]
            rows.append(row)
        return rows


def build_needle_sequence(x, needle: NeedleSpec, outer: CurveSpec, k: float, schedule: List[ScheduleStep],
                          center=None, spacing: float = DEFAULT_SPACING,
                          compact_sets: Optional[Dict[str, object]] = None, strict: bool = True,
                          target: Optional[Target] = None, scene=None) -> NeedleSequence:
    """
    按调度依次拟合针元素。

    strict=False 时遇到 ScheduleError 截断序列并记录警告；strict=True 时直接抛出。
    给定 scene 时同时拒绝擦边针。

    Raises:
        GeometryError: 针不合法（含擦边）或 x 不在 Ω 内。
        ScheduleError: strict 模式下的拟合失败。
    """
    x = np.asarray(x, dtype=float)
    if not outer.contains(x[None, :])[0]:
        raise GeometryError(f"针尖 {x.tolist()} 不在 Ω 内。")
    require_valid_needle(needle, outer, scene)
    compact_sets = dict(compact_sets or {})
    eps0 = schedule[0].eps
    for name, region in compact_sets.items():
        points, weights = region.nodes_and_weights(COMPACT_ORDER)
        gap = float(np.min(dist_to_needle(points[weights != 0], needle)))
        if gap < 2.0 * eps0:
            logging.warning(f"紧集 {name} 到针的距离 {gap:.3f} 小于 2ε0 = {2 * eps0:.3f}，不满足收敛判据的前提。")

    sequence = NeedleSequence(x=(float(x[0]), float(x[1])), needle=needle, schedule=list(schedule),
                              compact_sets=compact_sets)
    previous = None
    for step in schedule:
        try:
            v, report = fit_needle_element(x, needle, step.eps, step.M, step.alpha, outer, k, center=center,
                                           spacing=spacing, n=step.n, previous_residual=previous,
                                           compact_sets=compact_sets, target=target)
        except ScheduleError as e:
            if strict:
                raise
            logging.warning(f"针序列在第 {step.n} 步截断: {e}")
            sequence.truncated = True
            break
        sequence.elements.append(v)
        sequence.reports.append(report)
        previous = report.residual
        logging.info(f"针元素 n={step.n} (ε={step.eps:.4f}, M={step.M}) 拟合完成，相对残差 {report.residual:.3e}，"
                     f"系数范数 {report.coef_norm:.3e}。")
    return sequence
