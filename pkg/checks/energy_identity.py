# -*- coding: utf-8 -*-

"""
声软场景的能量恒等式：
    ∫_{∂Ω} (∂v/∂ν - ∂u/∂ν) conj(v) ds = -∫_D (|∇v|² - k²|v|²) - ∫_{Ω∖D̄} (|∇w|² - k²|w|²)，w = u - v。
两侧体积项按 Green 公式化为 ∂D 上的边界积分：
    右端 = -∫_{∂D} conj(v) ∂v/∂ν + ∫_{∂D} conj(w) ∂w/∂ν（ν 指向 D 外）。
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.errors import CheckError
from core.solver import BoundaryData, DtnSolver
from needles.entire import EntireSolution, eval_entire, normal_derivative, trace
from .context import ScenarioContext
from .report import STATUS_FAIL, STATUS_PASS, CheckThresholds, TheoremReport

RANDOM_ORDER = 16
# 右端与左端都几乎为 0 时（无障碍物），差值按该下限视为收敛
GAP_FLOOR = 1e-10


@dataclass
class IdentitySides:
    lhs: complex
    rhs: complex
    pairing: complex

    @property
    def gap(self) -> float:
        """相对差：|LHS - RHS| / max(|LHS|, |RHS|, |∫ ∂v/∂ν conj(v)|)。"""
        scale = max(abs(self.lhs), abs(self.rhs), abs(self.pairing))
        return float(abs(self.lhs - self.rhs) / scale) if scale > 0 else 0.0


def random_entire(center, k: float, order: int = RANDOM_ORDER, rng: Optional[np.random.Generator] = None) -> EntireSolution:
    """系数独立复高斯、再归一化到系数 2-范数为 1 的随机全平面解。"""
    rng = rng or np.random.default_rng(0)
    coefficients = rng.standard_normal(2 * order + 1) + 1j * rng.standard_normal(2 * order + 1)
    return EntireSolution(tuple(center), k, coefficients / np.linalg.norm(coefficients))


def energy_identity_sides(solver: DtnSolver, v: EntireSolution) -> IdentitySides:
    """由边界数据计算恒等式两侧（复数形式，不取实部）。"""
    if solver.scene.boundary_condition != "sound_soft" and not solver.scene.is_empty:
        raise CheckError("能量恒等式只对声软场景成立。")
    outer = solver.outer_curve
    f = trace(v, outer)
    u = solver.solve_dirichlet(BoundaryData(outer, f))
    weights = outer.weights
    dv = normal_derivative(v, outer)
    pairing = complex(np.sum(weights * dv * np.conj(f)))
    lhs = complex(np.sum(weights * (dv - u.neumann_trace().samples) * np.conj(f)))
    rhs = 0j
    for j in range(1, len(solver.curves)):
        curve = solver.curves[j]
        value, gradient = eval_entire(v, curve.nodes)
        normal = np.sum(gradient * curve.normals, axis=-1)
        u_value, u_normal = u.trace(j)
        w = u_value - value
        dw = u_normal - normal
        rhs += -np.sum(curve.weights * np.conj(value) * normal) + np.sum(curve.weights * np.conj(w) * dw)
    return IdentitySides(lhs, complex(rhs), pairing)


def check_energy_identity(solver: DtnSolver, v: EntireSolution, scenario: str = "",
                          thresholds: Optional[CheckThresholds] = None) -> TheoremReport:
    """两侧相对差 <= identity_gap 即通过；无障碍物时两侧都为 0。"""
    thresholds = thresholds or CheckThresholds()
    sides = energy_identity_sides(solver, v)
    statistics = {"lhs_real": sides.lhs.real, "lhs_imag": sides.lhs.imag, "rhs_real": sides.rhs.real,
                  "rhs_imag": sides.rhs.imag, "gap": sides.gap}
    return TheoremReport.from_verdict("energy_identity", scenario, statistics,
                                      {"identity_gap": thresholds.identity_gap}, sides.gap <= thresholds.identity_gap)


def check_energy_identity_refined(ctx: ScenarioContext) -> TheoremReport:
    """
    用场景种子生成的随机 v 做恒等式检查，并在分辨率加倍后重算：
    通过要求 gap <= identity_gap 且加密后的 gap 不增大（或已低于 GAP_FLOOR）。
    """
    scene = ctx.scene
    rng = np.random.default_rng(ctx.scenario.seed)
    v = random_entire(tuple(scene.outer.centroid), scene.k, RANDOM_ORDER, rng)
    report = check_energy_identity(ctx.solver, v, ctx.scenario.name, ctx.scenario.thresholds)
    gap = report.statistics["gap"]
    refined = energy_identity_sides(ctx.refined_solver, v).gap
    logging.info(f"场景 {ctx.scenario.name}：恒等式相对差 {gap:.3e}，加密后 {refined:.3e}。")
    shrinks = refined <= gap or refined <= GAP_FLOOR
    report.statistics.update({"gap_refined": refined, "gap_shrinks": shrinks})
    report.passed = report.passed and shrinks
    report.status = STATUS_PASS if report.passed else STATUS_FAIL
    return report
