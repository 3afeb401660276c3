# -*- coding: utf-8 -*-

"""
二维 Helmholtz 层势算子的 Nyström 离散。

记号（弧长积分，ν 为各曲线的外法向）：
    S φ(x)  = ∫ Φ(x,y) φ(y) ds(y)
    K φ(x)  = ∫ ∂Φ(x,y)/∂ν(y) φ(y) ds(y)
    K' φ(x) = ∫ ∂Φ(x,y)/∂ν(x) φ(y) ds(y)
    T φ(x)  = ∂/∂ν(x) ∫ ∂Φ(x,y)/∂ν(y) φ(y) ds(y)

同一条曲线上的 S/K/K' 使用 Kress 对数奇性分裂求积：核 = A(t,τ) ln(4 sin²((t-τ)/2)) + B(t,τ)，
对数部分用权重 R_j(t)，光滑部分用梯形公式。超奇异算子 T 用 Maue 恒等式
    T = d/ds S d/ds + k² (ν1 S ν1 + ν2 S ν2)
转化为 S 的组合。不同曲线之间核是光滑的，直接用梯形公式。
"""

from dataclasses import dataclass

import numpy as np

from geometry.curves import DiscretizedCurve
from .specfun import EULER_GAMMA, bessel_j01, hankel1_01


@dataclass
class OperatorSet:
    S: np.ndarray
    K: np.ndarray
    Kp: np.ndarray
    T: np.ndarray


# -----------------------------------------------------------------------------
# 1. 周期函数工具
# -----------------------------------------------------------------------------

def kress_weights(t_target: np.ndarray, M: int) -> np.ndarray:
    """
    对数核求积权重 R_j(t)，使 ∫_0^{2π} ln(4 sin²((t-τ)/2)) f(τ) dτ ≈ sum_j R_j(t) f(t_j)。

    Returns:
        np.ndarray: 形状 (len(t_target), M)。
    """
    n = M // 2
    t_nodes = 2.0 * np.pi * np.arange(M) / M
    delta = np.asarray(t_target, dtype=float)[:, None] - t_nodes[None, :]
    acc = np.zeros_like(delta)
    for m in range(1, n):
        acc += np.cos(m * delta) / m
    return -(2.0 * np.pi / n) * acc - (np.pi / n ** 2) * np.cos(n * delta)


def differentiation_matrix(M: int) -> np.ndarray:
    """偶数 M 的 Fourier 谱微分矩阵 D_ij = (-1)^{i-j} cot((t_i - t_j)/2) / 2。"""
    h = 2.0 * np.pi / M
    index = np.arange(M)
    gap = index[:, None] - index[None, :]
    with np.errstate(divide="ignore"):
        matrix = 0.5 * np.where(gap % 2 == 0, 1.0, -1.0) / np.tan(0.5 * gap * h)
    np.fill_diagonal(matrix, 0.0)
    return matrix


def fft_resample(samples: np.ndarray, M_new: int) -> np.ndarray:
    """三角插值到 M_new 个等距节点（Nyquist 模对称拆分）。"""
    M = samples.shape[0]
    if M_new == M:
        return samples.copy()
    coeffs = np.fft.fft(samples)
    padded = np.zeros(M_new, dtype=complex)
    half = M // 2
    padded[:half] = coeffs[:half]
    padded[-half + 1:] = coeffs[-half + 1:]
    padded[half] = 0.5 * coeffs[half]
    padded[M_new - half] += 0.5 * coeffs[half]
    return np.fft.ifft(padded) * (M_new / M)


def trig_interpolate(samples: np.ndarray, t_new: np.ndarray, derivative: bool = False) -> np.ndarray:
    """在任意参数 t_new 处求等距样本的三角插值（或其导数）。"""
    M = samples.shape[0]
    coeffs = np.fft.fft(samples) / M
    modes = np.fft.fftfreq(M, d=1.0 / M)
    weights = np.ones(M)
    half = M // 2
    weights[half] = 0.5
    # Nyquist 模拆成 ±M/2 两半
    modes_full = np.concatenate([modes, [half]])
    coeffs_full = np.concatenate([coeffs * weights, [0.5 * coeffs[half]]])
    phase = np.exp(1j * np.outer(np.asarray(t_new, dtype=float), modes_full))
    if derivative:
        coeffs_full = coeffs_full * 1j * modes_full
    return phase @ coeffs_full


# -----------------------------------------------------------------------------
# 2. 同一曲线上的算子（Kress 分裂）
# -----------------------------------------------------------------------------

def _split_kernels(curve: DiscretizedCurve, k: float, targets, t_target, target_normals, on_nodes: bool):
    """返回 (S, K, K') 三个 Nyström 矩阵；on_nodes=True 时目标点就是节点本身。"""
    M = curve.M
    n = M // 2
    diff = targets[:, None, :] - curve.nodes[None, :, :]
    r = np.hypot(diff[..., 0], diff[..., 1])
    if on_nodes:
        diagonal = np.eye(M, dtype=bool)
    else:
        diagonal = np.zeros(r.shape, dtype=bool)
    r_safe = np.where(diagonal, 1.0, r)
    j0, j1 = bessel_j01(k * r_safe)
    h0, h1 = hankel1_01(k * r_safe)
    speed = curve.speed[None, :]
    delta = t_target[:, None] - curve.t[None, :]
    sin_half = np.sin(0.5 * delta)
    log_term = np.log(np.where(diagonal, 1.0, 4.0 * sin_half ** 2))
    weights = kress_weights(t_target, M)
    trap = np.pi / n

    nd_source = (curve.normals[None, :, 0] * diff[..., 0] + curve.normals[None, :, 1] * diff[..., 1]) / r_safe
    nd_target = (target_normals[:, None, 0] * diff[..., 0] + target_normals[:, None, 1] * diff[..., 1]) / r_safe

    a_s = -(1.0 / (4.0 * np.pi)) * j0 * speed
    b_s = 0.25j * h0 * speed - a_s * log_term
    a_k = -(k / (4.0 * np.pi)) * j1 * nd_source * speed
    b_k = 0.25j * k * h1 * nd_source * speed - a_k * log_term
    a_kp = (k / (4.0 * np.pi)) * j1 * nd_target * speed
    b_kp = -0.25j * k * h1 * nd_target * speed - a_kp * log_term

    if on_nodes:
        idx = np.arange(M)
        sp = curve.speed
        a_s[idx, idx] = -(1.0 / (4.0 * np.pi)) * sp
        b_s[idx, idx] = (0.25j - (EULER_GAMMA + np.log(0.5 * k * sp)) / (2.0 * np.pi)) * sp
        limit = curve.curvature_term / (4.0 * np.pi)
        a_k[idx, idx] = 0.0
        b_k[idx, idx] = limit
        a_kp[idx, idx] = 0.0
        b_kp[idx, idx] = limit

    S = weights * a_s + trap * b_s
    K = weights * a_k + trap * b_k
    Kp = weights * a_kp + trap * b_kp
    return S, K, Kp


def self_operators(curve: DiscretizedCurve, k: float) -> OperatorSet:
    """同一曲线上 S, K, K', T 的节点矩阵。"""
    S, K, Kp = _split_kernels(curve, k, curve.nodes, curve.t, curve.normals, on_nodes=True)
    tangential = differentiation_matrix(curve.M) / curve.speed[:, None]
    n1 = curve.normals[:, 0]
    n2 = curve.normals[:, 1]
    T = tangential @ S @ tangential + k ** 2 * (
        n1[:, None] * S * n1[None, :] + n2[:, None] * S * n2[None, :])
    return OperatorSet(S=S, K=K, Kp=Kp, T=T)


def self_operators_offnode(curve: DiscretizedCurve, k: float, t_target: np.ndarray):
    """非节点参数处的 (S, K, K') 行（Nyström 插值），用于边界残差检查。"""
    z, dz, _ = curve.spec.evaluate(t_target)
    speed = np.hypot(dz[:, 0], dz[:, 1])
    normals = np.stack([dz[:, 1], -dz[:, 0]], axis=-1) / speed[:, None]
    return _split_kernels(curve, k, z, np.asarray(t_target, dtype=float), normals, on_nodes=False)


# -----------------------------------------------------------------------------
# 3. 不同曲线之间的算子（光滑核，梯形公式）
# -----------------------------------------------------------------------------

def cross_operators(target: DiscretizedCurve, source: DiscretizedCurve, k: float) -> OperatorSet:
    diff = target.nodes[:, None, :] - source.nodes[None, :, :]
    r = np.hypot(diff[..., 0], diff[..., 1])
    h0, h1 = hankel1_01(k * r)
    w = source.weights[None, :]
    nx = target.normals
    ny = source.normals
    nd_source = (ny[None, :, 0] * diff[..., 0] + ny[None, :, 1] * diff[..., 1])
    nd_target = (nx[:, None, 0] * diff[..., 0] + nx[:, None, 1] * diff[..., 1])
    nn = nx[:, None, 0] * ny[None, :, 0] + nx[:, None, 1] * ny[None, :, 1]
    S = 0.25j * h0 * w
    K = 0.25j * k * h1 * nd_source / r * w
    Kp = -0.25j * k * h1 * nd_target / r * w
    T = 0.25j * k * (nn * h1 / r + nd_source * nd_target * (k * r * h0 - 2.0 * h1) / r ** 3) * w
    return OperatorSet(S=S, K=K, Kp=Kp, T=T)


# -----------------------------------------------------------------------------
# 4. 域内求值
# -----------------------------------------------------------------------------

def combined_field(points: np.ndarray, curve: DiscretizedCurve, density: np.ndarray, k: float,
                   single_layer_weight: complex, chunk: int = 256):
    """
    组合层势 u = D φ + c S φ 在域内点处的值与梯度（梯形公式）。

    Returns:
        (value (P,), gradient (P, 2))
    """
    P = points.shape[0]
    value = np.zeros(P, dtype=complex)
    gradient = np.zeros((P, 2), dtype=complex)
    wphi = curve.weights * density
    ny = curve.normals
    for start in range(0, P, chunk):
        block = points[start:start + chunk]
        diff = block[:, None, :] - curve.nodes[None, :, :]
        r = np.hypot(diff[..., 0], diff[..., 1])
        h0, h1 = hankel1_01(k * r)
        nd = ny[None, :, 0] * diff[..., 0] + ny[None, :, 1] * diff[..., 1]
        dl = 0.25j * k * h1 * nd / r
        sl = 0.25j * h0
        value[start:start + chunk] = (dl + single_layer_weight * sl) @ wphi
        radial = (k * r * h0 - 2.0 * h1) / r ** 3
        for axis in range(2):
            grad_dl = 0.25j * k * (ny[None, :, axis] * h1 / r + nd * radial * diff[..., axis])
            grad_sl = -0.25j * k * h1 * diff[..., axis] / r
            gradient[start:start + chunk, axis] = (grad_dl + single_layer_weight * grad_sl) @ wphi
    return value, gradient
