# -*- coding: utf-8 -*-

"""
已知真实场景时的指示函数 I(x)，由反射解 w_x 组装。

体积 Dirichlet 能量都用 Green 公式化为边界积分（对 Helmholtz 解是精确的）：
    E_D(G) = ∫_D (|∇G|² - k²|G|²) = Re ∫_{∂D} conj(G) ∂G/∂ν
    E(w)   = ∫_{Ω∖D̄} (|∇w|² - k²|w|²) = -Re ∫_{∂D} conj(w) ∂w/∂ν   （w = 0 on ∂Ω）
阻抗：I = E(w) - ∫ Re λ |w|² + E_D(G) + ∫ Re λ |G|² - 2 ∫ Im λ Im(w conj(G))
声软：I = -E_D(G) - E(w)
method="area" 时两个能量改用面积分，作为交叉检验。
"""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from core.solver import DtnSolver
from geometry.area import StarRegion, area_quadrature, domain_minus_obstacles
from helmholtz.specfun import green2d

METHODS = ("boundary", "area")
AREA_ORDER = 32
AREA_UPSAMPLE = 16


@dataclass
class IndicatorBreakdown:
    value: float
    energy_green: float
    energy_reflected: float
    impedance_terms: Dict[str, float] = field(default_factory=dict)
    method: str = "boundary"


def _area_energies(solver: DtnSolver, reflected, x: np.ndarray, order: int):
    k = solver.k
    energy_green = 0.0
    for component in solver.scene.components:
        def green_density(points):
            g = green2d(k, points, x)
            return np.sum(np.abs(g.gradient_z) ** 2, axis=-1) - k ** 2 * np.abs(g.value) ** 2
        energy_green += area_quadrature(StarRegion(component.boundary), green_density, order)

    def reflected_density(points):
        value, gradient = reflected.evaluate(points, upsample=AREA_UPSAMPLE)
        return np.sum(np.abs(gradient) ** 2, axis=-1) - k ** 2 * np.abs(value) ** 2

    region = domain_minus_obstacles(solver.scene.outer, solver.scene.obstacles)
    energy_reflected = area_quadrature(region, reflected_density, order)
    return float(energy_green), float(energy_reflected)


def indicator_direct(solver: DtnSolver, x, method: str = "boundary", area_order: int = AREA_ORDER) -> IndicatorBreakdown:
    """
    计算 I(x) 及其分项。

    Raises:
        TipTooClose: x 到障碍物的距离小于求解器的 tip_margin。
        PointOutsideDomain: x 不在 Ω∖D̄ 内。
    """
    if method not in METHODS:
        raise ValueError(f"未知的积分方式 '{method}'，可选: {METHODS}")
    x = np.asarray(x, dtype=float)
    reflected = solver.solve_reflected(x)
    if solver.scene.is_empty:
        return IndicatorBreakdown(0.0, 0.0, 0.0, method=method)

    k = solver.k
    energy_green = 0.0
    energy_reflected = 0.0
    terms = {"re_lambda_w": 0.0, "re_lambda_g": 0.0, "im_lambda_cross": 0.0}
    for j in range(1, len(solver.curves)):
        curve = solver.curves[j]
        green = green2d(k, curve.nodes, x)
        g = green.value
        dg = np.sum(green.gradient_z * curve.normals, axis=-1)
        w, dw = reflected.trace(j)
        weights = curve.weights
        energy_green += float(np.sum(weights * np.conj(g) * dg).real)
        energy_reflected -= float(np.sum(weights * np.conj(w) * dw).real)
        lam = solver.impedances[j]
        if lam is not None:
            terms["re_lambda_w"] += float(np.sum(weights * lam.real * np.abs(w) ** 2))
            terms["re_lambda_g"] += float(np.sum(weights * lam.real * np.abs(g) ** 2))
            terms["im_lambda_cross"] += float(np.sum(weights * lam.imag * (w * np.conj(g)).imag))

    if method == "area":
        energy_green, energy_reflected = _area_energies(solver, reflected, x, area_order)

    if solver.scene.boundary_condition == "impedance":
        value = (energy_reflected - terms["re_lambda_w"] + energy_green + terms["re_lambda_g"]
                 - 2.0 * terms["im_lambda_cross"])
        return IndicatorBreakdown(float(value), energy_green, energy_reflected, terms, method)
    value = -energy_green - energy_reflected
    return IndicatorBreakdown(float(value), energy_green, energy_reflected, {}, method)
