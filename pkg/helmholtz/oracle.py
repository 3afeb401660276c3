# -*- coding: utf-8 -*-

"""
同心圆场景（Ω = 半径 R 的圆盘，D = 半径 ρ 的圆盘，均以原点为心）的闭式级数解。

环域内每个 Fourier 模式写成 u_m = (a_m J_|m|(kr) + b_m Y_|m|(kr)) e^{imθ}，
外边界 Dirichlet 条件与障碍物边界条件给出 2×2 线性系统。ν 取 D 的单位外法向，
与离散曲线的法向一致，因此 r=ρ 上 ∂/∂ν = +∂/∂r。用作正问题、反射解与指示函数测试的独立参照。
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from core.errors import ModeResonance, OracleError, TailTooLarge
from core.solver import BoundaryData
from .specfun import bessel_j_table, bessel_y_table

# 数据展开最多保留 |m| <= MAX_MODE，其余模式的相对能量必须低于 TAIL_LIMIT
MAX_MODE = 31
TAIL_LIMIT = 1e-10
# 加法定理展开的截断容差与最高阶
GRAF_TOLERANCE = 1e-12
GRAF_MAX_ORDER = 120
RESONANCE_CONDITION = 1e13


@dataclass(frozen=True)
class AnnulusProblem:
    """边界条件记录；rho 为 None 时表示无障碍物的圆盘。"""
    R: float
    k: float
    rho: Optional[float] = None
    bc: str = "sound_soft"
    lam: complex = 1j

    def __post_init__(self):
        if self.rho is not None and not 0 < self.rho < self.R:
            raise OracleError(f"要求 0 < ρ < R，收到 ρ={self.rho}, R={self.R}。")
        if self.bc not in ("sound_soft", "impedance"):
            raise OracleError(f"未知边界条件 '{self.bc}'。")


@dataclass
class ModeSolution:
    mode: int
    a: complex
    b: complex
    problem: AnnulusProblem
    residuals: Dict[str, float] = field(default_factory=dict)


def _bessel_pair(order: int, x: float):
    """(J_n(x), J_n'(x), Y_n(x), Y_n'(x))，n = order >= 0。"""
    x_arr = np.asarray([x], dtype=float)
    jt = bessel_j_table(order + 1, x_arr)[:, 0]
    with np.errstate(over="ignore", invalid="ignore"):
        yt = bessel_y_table(order + 1, x_arr)[:, 0]
    if order == 0:
        return jt[0], -jt[1], yt[0], -yt[1]
    return (jt[order], 0.5 * (jt[order - 1] - jt[order + 1]),
            yt[order], 0.5 * (yt[order - 1] - yt[order + 1]))


def annulus_mode_solve(problem: AnnulusProblem, m: int, f_m: complex, g_m: complex = 0.0) -> ModeSolution:
    """
    求解第 m 个模式的系数。

    Args:
        problem (AnnulusProblem): 几何、波数与障碍物边界条件。
        m (int): 模式序号（可为负，基函数用 |m| 阶）。
        f_m (complex): 外边界 r=R 上的 Dirichlet 模式系数。
        g_m (complex): 障碍物 r=ρ 上的数据模式系数（声软为 u 值，阻抗为 ∂u/∂ν + λu），默认 0。

    Raises:
        ModeResonance: 2×2 系统（或无障碍物时的 J_|m|(kR)）奇异。
    """
    n = abs(int(m))
    k = problem.k
    jR, _, yR, _ = _bessel_pair(n, k * problem.R)
    if problem.rho is None:
        if abs(jR) < 1e-13:
            raise ModeResonance(m)
        return ModeSolution(m, complex(f_m) / jR, 0.0j, problem, {"outer": 0.0})

    jr, djr, yr, dyr = _bessel_pair(n, k * problem.rho)
    if problem.bc == "sound_soft":
        inner = np.array([jr, yr], dtype=complex)
    else:
        inner = np.array([k * djr + problem.lam * jr, k * dyr + problem.lam * yr], dtype=complex)
    matrix = np.array([[jR, yR], inner], dtype=complex)
    if not np.all(np.isfinite(matrix)):
        raise ModeResonance(m)
    # 列均衡：高阶模式下 Y 列比 J 列大很多个数量级
    scale = np.max(np.abs(matrix), axis=0)
    if np.any(scale == 0):
        raise ModeResonance(m)
    scaled = matrix / scale
    if np.linalg.cond(scaled) > RESONANCE_CONDITION:
        raise ModeResonance(m)
    rhs = np.array([f_m, g_m], dtype=complex)
    coeffs = np.linalg.solve(scaled, rhs) / scale
    residual = matrix @ coeffs - rhs
    norm = max(1.0, float(np.max(np.abs(rhs))))
    return ModeSolution(m, complex(coeffs[0]), complex(coeffs[1]), problem,
                        {"outer": float(abs(residual[0])) / norm, "obstacle": float(abs(residual[1])) / norm})


# -----------------------------------------------------------------------------
# 1. 边界数据的 Fourier 展开
# -----------------------------------------------------------------------------

def _node_angles(curve) -> np.ndarray:
    return np.arctan2(curve.nodes[:, 1], curve.nodes[:, 0])


def boundary_modes(f, R: float) -> Dict[int, complex]:
    """
    把 r=R 圆上的节点数据展开为关于 θ 的 Fourier 系数。

    Raises:
        OracleError: 离散曲线不是以原点为心、半径 R 的圆。
        TailTooLarge: |m| > MAX_MODE 的相对能量超过 TAIL_LIMIT。
    """
    curve = f.curve
    if not np.allclose(np.hypot(curve.nodes[:, 0], curve.nodes[:, 1]), R, rtol=0, atol=1e-12 * R):
        raise OracleError("解析参照只适用于以原点为心的圆形外边界。")
    M = curve.M
    coeffs = np.fft.fft(f.samples) / M
    modes = np.fft.fftfreq(M, d=1.0 / M).astype(int)
    keep = np.abs(modes) <= min(MAX_MODE, M // 2 - 1)
    total = float(np.sum(np.abs(coeffs) ** 2))
    tail = float(np.sum(np.abs(coeffs[~keep]) ** 2)) / total if total > 0 else 0.0
    if tail > TAIL_LIMIT:
        raise TailTooLarge(tail, TAIL_LIMIT)
    # 节点参数 t 与极角 θ 相差一个常数相位
    theta0 = _node_angles(curve)[0] - curve.t[0]
    return {int(m): complex(c * np.exp(-1j * m * theta0)) for m, c in zip(modes[keep], coeffs[keep])}


def solve_modes(problem: AnnulusProblem, f) -> Dict[int, ModeSolution]:
    """外边界数据 f（BoundaryData）下各模式的解（障碍物数据为零）。"""
    return {m: annulus_mode_solve(problem, m, fm) for m, fm in boundary_modes(f, problem.R).items()}


# -----------------------------------------------------------------------------
# 2. Neumann 迹与域内场
# -----------------------------------------------------------------------------

def oracle_neumann(modes: Dict[int, ModeSolution], f):
    """r=R 处的 Neumann 迹 sum_m k(a_m J'_|m|(kR) + b_m Y'_|m|(kR)) e^{imθ}，在 f 的节点上求值。"""
    theta = _node_angles(f.curve)
    samples = np.zeros(f.curve.M, dtype=complex)
    for m, sol in modes.items():
        problem = sol.problem
        _, djR, _, dyR = _bessel_pair(abs(m), problem.k * problem.R)
        radial = problem.k * (sol.a * djR + (sol.b * dyR if sol.b != 0 else 0.0))
        samples += radial * np.exp(1j * m * theta)
    return BoundaryData(f.curve, samples)


def oracle_field(modes: Dict[int, ModeSolution], points: np.ndarray):
    """
    环域内点处的 u 与 ∇u。

    Returns:
        (value (P,), gradient (P, 2))
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if not modes:
        return np.zeros(pts.shape[0], dtype=complex), np.zeros((pts.shape[0], 2), dtype=complex)
    problem = next(iter(modes.values())).problem
    k = problem.k
    r = np.hypot(pts[:, 0], pts[:, 1])
    theta = np.arctan2(pts[:, 1], pts[:, 0])
    if problem.rho is not None and np.any(r <= problem.rho):
        raise OracleError("求值点落在障碍物圆盘内。")
    if np.any(r > problem.R * (1 + 1e-12)):
        raise OracleError("求值点落在外圆盘之外。")
    order = max(abs(m) for m in modes) + 1
    jt = bessel_j_table(order, k * r)
    if problem.rho is not None:
        with np.errstate(over="ignore", invalid="ignore"):
            yt = bessel_y_table(order, k * r)
    value = np.zeros(pts.shape[0], dtype=complex)
    d_r = np.zeros(pts.shape[0], dtype=complex)
    d_theta = np.zeros(pts.shape[0], dtype=complex)
    for m, sol in modes.items():
        n = abs(m)
        radial = sol.a * jt[n]
        deriv = sol.a * (-jt[1] if n == 0 else 0.5 * (jt[n - 1] - jt[n + 1]))
        if problem.rho is not None and sol.b != 0:
            radial = radial + sol.b * yt[n]
            deriv = deriv + sol.b * (-yt[1] if n == 0 else 0.5 * (yt[n - 1] - yt[n + 1]))
        phase = np.exp(1j * m * theta)
        value += radial * phase
        d_r += k * deriv * phase
        d_theta += 1j * m * radial * phase
    r_safe = np.where(r > 0, r, 1.0)
    # r = 0 时只有 m=±1 贡献梯度，极限由 d_theta / r 给出，这里只在环域内使用
    gx = d_r * np.cos(theta) - d_theta * np.sin(theta) / r_safe
    gy = d_r * np.sin(theta) + d_theta * np.cos(theta) / r_safe
    return value, np.stack([gx, gy], axis=-1)


# -----------------------------------------------------------------------------
# 3. 反射解（Graf 加法定理）
# -----------------------------------------------------------------------------

def oracle_reflected(problem: AnnulusProblem, x, tolerance: float = GRAF_TOLERANCE,
                     max_order: int = GRAF_MAX_ORDER) -> Dict[int, ModeSolution]:
    """
    反射解 w_x 的模式系数：∂Ω 上 0，∂D 上声软数据 -G(·,x) 或阻抗数据 -(∂G/∂ν + λG)。

    |z| < |x| 时 G(z,x) = (i/4) sum_m J_m(k|z|) H_m(k|x|) e^{im(θ_z - θ_x)}。

    Raises:
        OracleError: 场景无障碍物或 x 不在环域内。
        TailTooLarge: 截断到 max_order 仍未收敛（x 离 ∂D 太近）。
    """
    if problem.rho is None:
        raise OracleError("无障碍物时反射解恒为零，不需要加法定理展开。")
    x = np.asarray(x, dtype=float)
    r_x = float(np.hypot(x[0], x[1]))
    theta_x = float(np.arctan2(x[1], x[0]))
    if not problem.rho < r_x < problem.R:
        raise OracleError(f"点 x 的半径 {r_x} 不在环域 ({problem.rho}, {problem.R}) 内。")
    k = problem.k
    scale = None
    converged = False
    data: Dict[int, complex] = {}
    small_run = 0
    for n in range(max_order + 1):
        jr, djr, _, _ = _bessel_pair(n, k * problem.rho)
        jx, _, yx, _ = _bessel_pair(n, k * r_x)
        hx = jx + 1j * yx
        if problem.bc == "sound_soft":
            g = -0.25j * jr * hx
        else:
            g = -(0.25j * k * djr * hx + problem.lam * 0.25j * jr * hx)
        if not np.isfinite(g):
            break
        data[n] = g
        size = abs(g)
        scale = size if scale is None else max(scale, size)
        small_run = small_run + 1 if (n > k * r_x and size <= tolerance * scale) else 0
        if small_run >= 2:
            converged = True
            break
    if not converged:
        tail = abs(data[max(data)]) / scale if data and scale else float("inf")
        raise TailTooLarge(tail, tolerance)
    logging.debug(f"加法定理展开在 {max(data)} 阶截断。")
    modes = {}
    for n, g in data.items():
        for m in ((n,) if n == 0 else (n, -n)):
            modes[m] = annulus_mode_solve(problem, m, 0.0, g * np.exp(-1j * m * theta_x))
    return modes
