# -*- coding: utf-8 -*-

import functools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from core.errors import IllConditioned, PointOutsideDomain, SolverError, TipTooClose
from geometry.curves import CurveSpec, DiscretizedCurve, discretize
from geometry.scene import ObstacleScene
from helmholtz.layer_potentials import (
    combined_field, cross_operators, fft_resample, self_operators, self_operators_offnode, trig_interpolate,
)
from helmholtz.specfun import green2d


@dataclass
class BoundaryData:
    """曲线节点上的复数样本（Dirichlet 数据或 Neumann 迹）。"""
    curve: DiscretizedCurve
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != (self.curve.M,):
            raise SolverError(f"边界数据样本数 {self.samples.shape} 与曲线节点数 {self.curve.M} 不一致。")
        if not np.all(np.isfinite(self.samples)):
            raise SolverError("边界数据包含非有限值。")

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(self.curve.weights * np.abs(self.samples) ** 2)))

    def pairing(self, other: "BoundaryData", conjugate: bool = True) -> complex:
        """∫ self · conj(other) ds（conjugate=False 时为不共轭的双线性配对）。"""
        second = np.conj(other.samples) if conjugate else other.samples
        return complex(np.sum(self.curve.weights * self.samples * second))


class DtnSolver:
    """
    Ω∖D̄ 上 Helmholtz 正问题的组合层势 Nyström 求解器。

    每条曲线上用 u = D φ - iησ S φ 表示（σ=-1 为 ∂Ω 的内侧，σ=+1 为 ∂D_j 的外侧，η = k），
    外边界施加 Dirichlet 条件，障碍物边界施加阻抗或声软条件。系统稠密 LU 分解一次，
    之后对任意右端项复用；构造完成后对象只读，可在线程间共享。
    """

    def __init__(self, scene: ObstacleScene, M_outer: int, M_obstacle: int,
                 condition_ceiling: float = 1e8, tip_margin: float = 0.01, upsample: int = 4):
        """
        组装并分解离散系统。

        Args:
            scene (ObstacleScene): 已校验的场景。
            M_outer (int): ∂Ω 的离散节点数。
            M_obstacle (int): 每个 ∂D_j 的离散节点数。
            condition_ceiling (float): 条件数上限，超过则抛出 IllConditioned。
            tip_margin (float): 反射解要求的点到障碍物最小距离。
            upsample (int): 域内求值时密度的上采样倍数（近边界精度）。
        """
        self.scene = scene
        self.k = float(scene.k)
        self.condition_ceiling = condition_ceiling
        self.tip_margin = tip_margin
        self.upsample = upsample

        specs: List[CurveSpec] = [scene.outer] + scene.obstacles
        sizes = [M_outer] + [M_obstacle] * len(scene.obstacles)
        self.curves: List[DiscretizedCurve] = [discretize(spec, M) for spec, M in zip(specs, sizes)]
        self.fine_curves: List[DiscretizedCurve] = [discretize(spec, M * upsample) for spec, M in zip(specs, sizes)]
        self.sides = np.array([-1.0] + [1.0] * len(scene.obstacles))
        self.coupling = self.k
        self.single_layer_weights = [-1j * self.coupling * side for side in self.sides]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
        self.size = int(self.offsets[-1])
        self.impedances: List[Optional[np.ndarray]] = [None]
        for component, curve in zip(scene.components, self.curves[1:]):
            if scene.boundary_condition == "impedance":
                self.impedances.append(component.impedance.evaluate(curve.t))
            else:
                self.impedances.append(None)

        logging.info(f"开始组装正问题系统：k={self.k}, M_outer={M_outer}, M_obstacle={M_obstacle}, "
                     f"障碍物数 {len(scene.obstacles)}, 未知量 {self.size}。")
        self._assemble()
        self._factorize()
        logging.info(f"正问题系统分解完成，条件数估计 {self.condition:.3e}。")

    # --- 组装 ---
    def _block(self, index: int) -> slice:
        return slice(self.offsets[index], self.offsets[index + 1])

    def _assemble(self):
        count = len(self.curves)
        self.value_rows = [np.zeros((c.M, self.size), dtype=complex) for c in self.curves]
        self.normal_rows = [np.zeros((c.M, self.size), dtype=complex) for c in self.curves]
        for a in range(count):
            target = self.curves[a]
            for c in range(count):
                weight = self.single_layer_weights[c]
                if a == c:
                    ops = self_operators(target, self.k)
                    half = 0.5 * self.sides[a] * np.eye(target.M)
                    value = ops.K + half + weight * ops.S
                    normal = ops.T + weight * (ops.Kp - half)
                else:
                    ops = cross_operators(target, self.curves[c], self.k)
                    value = ops.K + weight * ops.S
                    normal = ops.T + weight * ops.Kp
                self.value_rows[a][:, self._block(c)] = value
                self.normal_rows[a][:, self._block(c)] = normal
            logging.debug(f"曲线 {a} 的算子块组装完成。")

        rows = []
        for a in range(count):
            if self.impedances[a] is None:
                rows.append(self.value_rows[a])
            else:
                rows.append(self.normal_rows[a] + self.impedances[a][:, None] * self.value_rows[a])
        self.system = np.vstack(rows)

    def _factorize(self):
        self.condition = float(np.linalg.cond(self.system))
        if not np.isfinite(self.condition) or self.condition > self.condition_ceiling:
            logging.error(f"条件数估计 {self.condition:.3e} 超过上限 {self.condition_ceiling:.3e}。")
            raise IllConditioned(self.condition, self.condition_ceiling)
        self._lu = scipy.linalg.lu_factor(self.system)
        # 外边界 Dirichlet 数据 -> ∂Ω 上 Neumann 迹 的离散 DtN 矩阵
        outer = self.curves[0]
        selector = np.zeros((self.size, outer.M), dtype=complex)
        selector[:outer.M, :] = np.eye(outer.M)
        self.dtn_matrix = self.normal_rows[0] @ scipy.linalg.lu_solve(self._lu, selector)

    # --- 求解 ---
    @property
    def outer_curve(self) -> DiscretizedCurve:
        return self.curves[0]

    def _solve(self, rhs: np.ndarray) -> np.ndarray:
        return scipy.linalg.lu_solve(self._lu, rhs)

    def solve_dirichlet(self, f: BoundaryData) -> "FieldSolution":
        if f.curve.M != self.outer_curve.M:
            raise SolverError("Dirichlet 数据不在求解器的 ∂Ω 离散上。")
        rhs = np.zeros(self.size, dtype=complex)
        rhs[self._block(0)] = f.samples
        return FieldSolution(self, self._solve(rhs), rhs)

    def solve_obstacle_data(self, obstacle_data: Sequence[np.ndarray]) -> "FieldSolution":
        """∂Ω 上零数据、∂D_j 上给定数据（声软为值，阻抗为 ∂u/∂ν + λu）的解。"""
        rhs = np.zeros(self.size, dtype=complex)
        for j, data in enumerate(obstacle_data, start=1):
            rhs[self._block(j)] = data
        return FieldSolution(self, self._solve(rhs), rhs)

    def solve_reflected(self, x) -> "FieldSolution":
        """
        反射解 w_x：∂Ω 上为 0；∂D 上阻抗数据 -∂G/∂ν - λG，或声软数据 -G。

        Raises:
            TipTooClose: x 到障碍物的距离小于 tip_margin。
            PointOutsideDomain: x 不在 Ω∖D̄ 内。
        """
        x = np.asarray(x, dtype=float)
        if not self.scene.in_domain(x[None, :])[0]:
            raise PointOutsideDomain(f"点 {x.tolist()} 不在 Ω∖D̄ 内。")
        if self.scene.is_empty:
            return FieldSolution(self, np.zeros(self.size, dtype=complex), np.zeros(self.size, dtype=complex))
        distance = float(self.scene.distance_to_obstacles(x[None, :])[0])
        if distance < self.tip_margin:
            raise TipTooClose(distance, self.tip_margin)
        spacing = max(float(c.weights.max()) for c in self.curves[1:])
        if distance < 2.0 * spacing:
            logging.warning(f"点到障碍物距离 {distance:.3e} 小于两倍节点间距 {spacing:.3e}，反射解数据可能欠分辨。")
        data = []
        for j in range(1, len(self.curves)):
            curve = self.curves[j]
            green = green2d(self.k, curve.nodes, x)
            if self.impedances[j] is None:
                data.append(-green.value)
            else:
                normal = np.sum(green.gradient_z * curve.normals, axis=-1)
                data.append(-(normal + self.impedances[j] * green.value))
        return self.solve_obstacle_data(data)

    def dtn(self, samples: np.ndarray) -> np.ndarray:
        """离散 DtN 作用：∂Ω 节点上的 Dirichlet 样本 -> Neumann 样本。"""
        return self.dtn_matrix @ np.asarray(samples, dtype=complex)


@dataclass
class FieldSolution:
    """层密度表示的解，提供边界迹、域内求值与非节点边界残差。"""
    solver: DtnSolver
    density: np.ndarray
    rhs: np.ndarray

    def densities(self) -> List[np.ndarray]:
        return [self.density[self.solver._block(i)] for i in range(len(self.solver.curves))]

    def trace(self, index: int) -> Tuple[np.ndarray, np.ndarray]:
        """第 index 条曲线（0 为 ∂Ω）节点上的 (u, ∂u/∂ν)，ν 为该曲线的外法向。"""
        return self.solver.value_rows[index] @ self.density, self.solver.normal_rows[index] @ self.density

    def neumann_trace(self) -> BoundaryData:
        return BoundaryData(self.solver.outer_curve, self.solver.normal_rows[0] @ self.density)

    def evaluate(self, points, upsample: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """
        域内点处的 u(z) 与 ∇u(z)。

        Args:
            points: (P, 2) 点数组。
            upsample (int): 覆盖求解器的上采样倍数；离边界很近的点（如面积分节点）需要更大的值。

        Raises:
            PointOutsideDomain: 有点不在 Ω∖D̄ 内（表示公式在 D 内无效，不对外暴露）。
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        inside = self.solver.scene.in_domain(pts)
        if not np.all(inside):
            bad = pts[~inside][0]
            raise PointOutsideDomain(f"求值点 ({bad[0]:.6f}, {bad[1]:.6f}) 不在 Ω∖D̄ 内。")
        value = np.zeros(pts.shape[0], dtype=complex)
        gradient = np.zeros((pts.shape[0], 2), dtype=complex)
        if upsample is None or upsample == self.solver.upsample:
            fine_curves = self.solver.fine_curves
        else:
            fine_curves = [discretize(c.spec, c.M * upsample) for c in self.solver.curves]
        for fine, density, weight in zip(fine_curves, self.densities(), self.solver.single_layer_weights):
            v, g = combined_field(pts, fine, fft_resample(density, fine.M), self.solver.k, weight)
            value += v
            gradient += g
        return value, gradient

    def boundary_residual(self) -> Dict[int, float]:
        """
        在参数中点（非节点）处检查边界条件的最大绝对残差。

        值部分用 Nyström 插值在非节点处真实计算；阻抗条件中的法向导数部分用节点迹的三角插值。
        """
        solver = self.solver
        densities = self.densities()
        residuals = {}
        for a, curve in enumerate(solver.curves):
            t_mid = curve.t + 0.5 * curve.spacing
            S, K, _ = self_operators_offnode(curve, solver.k, t_mid)
            value = (K @ densities[a] + 0.5 * solver.sides[a] * trig_interpolate(densities[a], t_mid)
                     + solver.single_layer_weights[a] * (S @ densities[a]))
            z_mid = curve.spec.evaluate(t_mid)[0]
            for c, other in enumerate(solver.curves):
                if c != a:
                    value = value + combined_field(z_mid, other, densities[c], solver.k,
                                                   solver.single_layer_weights[c])[0]
            data = trig_interpolate(self.rhs[solver._block(a)], t_mid)
            if solver.impedances[a] is None:
                residual = value - data
            else:
                normal = trig_interpolate(self.trace(a)[1], t_mid)
                lam = solver.scene.components[a - 1].impedance.evaluate(t_mid)
                residual = normal + lam * value - data
            residuals[a] = float(np.max(np.abs(residual)))
        return residuals


# -----------------------------------------------------------------------------
# 模块级操作
# -----------------------------------------------------------------------------

def build_solver(scene: ObstacleScene, M_outer: int, M_obstacle: int, **options) -> DtnSolver:
    scene.validate()
    return DtnSolver(scene, M_outer, M_obstacle, **options)


def solve_dirichlet(solver: DtnSolver, f: BoundaryData) -> FieldSolution:
    return solver.solve_dirichlet(f)


def neumann_trace(solution: FieldSolution) -> BoundaryData:
    return solution.neumann_trace()


def solve_reflected(solver: DtnSolver, x) -> FieldSolution:
    return solver.solve_reflected(x)


@functools.lru_cache(maxsize=8)
def _background_solver(outer: CurveSpec, k: float, M: int) -> DtnSolver:
    return DtnSolver(ObstacleScene(outer=outer, components=(), k=k), M, 16)


def dtn_background(outer: CurveSpec, k: float, f: BoundaryData) -> BoundaryData:
    """无障碍物时的 DtN 作用，仅用于交叉检验。"""
    solver = _background_solver(outer, float(k), f.curve.M)
    return BoundaryData(f.curve, solver.dtn(f.samples))
