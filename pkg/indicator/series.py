# -*- coding: utf-8 -*-

"""
指示序列 I_n = Re ∫_{∂Ω} (∂v_n/∂ν - ∂u_n/∂ν) conj(v_n) ds。

∂v_n/∂ν 由 Fourier–Bessel 展开解析给出，∂u_n/∂ν 来自以 v_n|_{∂Ω} 为 Dirichlet 数据的正问题。
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from core.errors import SolverError
from core.solver import DtnSolver
from geometry.area import StarRegion
from needles.entire import EntireSolution, eval_entire, needle_norms, normal_derivative, trace
from needles.fitting import NeedleSequence

FORMULATIONS = ("direct", "scattered")


@dataclass
class IndicatorTerm:
    value: float
    pairing: complex
    response: complex


def indicator_term(solver: DtnSolver, v: EntireSolution, formulation: str = "direct") -> IndicatorTerm:
    """
    计算单个指示项。

    Args:
        solver (DtnSolver): 场景的正问题求解器。
        v (EntireSolution): 针元素。
        formulation (str): "direct" 用两条 Neumann 迹之差；"scattered" 用散射部分 w = u - v，
            I = -Re ∫ (∂w/∂ν) conj(v) ds，避免两个大量相减。

    Returns:
        IndicatorTerm: value 为 I_n，pairing = ∫ ∂v/∂ν conj(v)，response = ∫ ∂u/∂ν conj(v)。
    """
    if abs(v.k - solver.k) > 1e-12 * max(1.0, solver.k):
        raise SolverError(f"针元素的波数 {v.k} 与求解器的波数 {solver.k} 不一致。")
    if formulation not in FORMULATIONS:
        raise ValueError(f"未知的指示项公式 '{formulation}'，可选: {FORMULATIONS}")
    curve = solver.outer_curve
    f = trace(v, curve)
    dv = normal_derivative(v, curve)
    weights = curve.weights
    pairing = complex(np.sum(weights * dv * np.conj(f)))
    if formulation == "direct":
        du = solver.dtn(f)
        response = complex(np.sum(weights * du * np.conj(f)))
        return IndicatorTerm(value=float((pairing - response).real), pairing=pairing, response=response)

    data = []
    for j in range(1, len(solver.curves)):
        obstacle = solver.curves[j]
        value, gradient = eval_entire(v, obstacle.nodes)
        if solver.impedances[j] is None:
            data.append(-value)
        else:
            normal = np.sum(gradient * obstacle.normals, axis=-1)
            data.append(-(normal + solver.impedances[j] * value))
    scattered = solver.solve_obstacle_data(data).neumann_trace().samples
    correction = complex(np.sum(weights * scattered * np.conj(f)))
    return IndicatorTerm(value=float(-correction.real), pairing=pairing, response=pairing + correction)


@dataclass
class IndicatorSeries:
    x: tuple
    needle_id: str
    values: List[float] = field(default_factory=list)
    pairings: List[complex] = field(default_factory=list)
    responses: List[complex] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)
    # 以下伴随量只有在真实场景已知时才计算
    grad_energy_D: Optional[List[float]] = None
    l2_D: Optional[List[float]] = None
    ratio: Optional[List[float]] = None
    boundary_ratio: Optional[List[float]] = None
    component_energy: Dict[int, List[float]] = field(default_factory=dict)
    component_ratio: Dict[int, List[float]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def has_companions(self) -> bool:
        return self.grad_energy_D is not None

    def rows(self) -> List[Dict[str, float]]:
        """CSV 行（列：n, I_n, grad_energy_D, ratio, residual，以及各分量的伴随量）。"""
        rows = []
        for n, value in enumerate(self.values):
            row = {"n": n, "I_n": value}
            if self.has_companions:
                row["grad_energy_D"] = self.grad_energy_D[n]
                row["ratio"] = self.ratio[n]
            row["residual"] = self.residuals[n]
            if self.has_companions:
                row["boundary_ratio"] = self.boundary_ratio[n]
                for j in sorted(self.component_energy):
                    row[f"grad_energy_D_{j}"] = self.component_energy[j][n]
                    row[f"ratio_D_{j}"] = self.component_ratio[j][n]
            rows.append(row)
        return rows


def _companions(series: IndicatorSeries, solver: DtnSolver, v: EntireSolution, order: int):
    regions = [StarRegion(c.boundary) for c in solver.scene.components]
    l2_sq = 0.0
    h1_sq = 0.0
    for j, region in enumerate(regions, start=1):
        l2, h1 = needle_norms(v, region, order)
        series.component_energy.setdefault(j, []).append(h1 ** 2)
        series.component_ratio.setdefault(j, []).append(l2 / h1 if h1 > 0 else float("inf"))
        l2_sq += l2 ** 2
        h1_sq += h1 ** 2
    boundary_sq = 0.0
    for obstacle in solver.curves[1:]:
        boundary_sq += float(np.sum(obstacle.weights * np.abs(trace(v, obstacle)) ** 2))
    h1 = np.sqrt(h1_sq)
    series.grad_energy_D.append(float(h1_sq))
    series.l2_D.append(float(np.sqrt(l2_sq)))
    series.ratio.append(float(np.sqrt(l2_sq) / h1) if h1 > 0 else float("inf"))
    series.boundary_ratio.append(float(np.sqrt(boundary_sq) / h1) if h1 > 0 else float("inf"))


def indicator_series(solver: DtnSolver, seq: NeedleSequence, truth_known: bool = True,
                     formulation: str = "direct", needle_id: str = "straight", order: int = 48) -> IndicatorSeries:
    """
    针序列每个元素的指示项及伴随量。不对增长抛异常，只记录。

    Args:
        truth_known (bool): 为 True 且场景有障碍物时计算 D 上的能量、比值等伴随量；
            纯重建模式下省略这些量，而不是伪造。
    """
    series = IndicatorSeries(x=seq.x, needle_id=needle_id)
    with_truth = truth_known and not solver.scene.is_empty
    if with_truth:
        series.grad_energy_D, series.l2_D, series.ratio, series.boundary_ratio = [], [], [], []
    for v, report in zip(seq.elements, seq.reports):
        term = indicator_term(solver, v, formulation)
        series.values.append(term.value)
        series.pairings.append(term.pairing)
        series.responses.append(term.response)
        series.residuals.append(report.residual)
        if with_truth:
            _companions(series, solver, v, order)
    if series.values:
        logging.info(f"针尖 ({seq.x[0]:.4f}, {seq.x[1]:.4f}) 的指示序列完成，共 {len(series)} 项，"
                     f"末项 I = {series.values[-1]:.6e}。")
    return series
