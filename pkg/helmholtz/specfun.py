# -*- coding: utf-8 -*-

"""
Bessel / Hankel 函数与 Helmholtz 基本解。

所有函数都对 numpy 数组逐元素向量化。整数阶 J_m、Y_m 的计算方式：
- J0/J1/Y0/Y1: |x| <= 12 用幂级数，|x| > 12 用 Hankel 渐近展开；
- J_m (m >= 2): Miller 向后递推，用 J0 + 2*sum(J_2k) = 1 归一化；
- Y_m (m >= 2): 由 Y0、Y1 向前递推（Y 随阶数增长，向前递推稳定）。
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from core.errors import SpecialFunctionError

EULER_GAMMA = 0.57721566490153286061
# 幂级数与渐近展开的切换点
SWITCH_ARGUMENT = 12.0
_SERIES_TERMS = 45
_ASYMPTOTIC_TERMS = 40
# Miller 递推的重标定阈值，避免溢出
_RESCALE_LIMIT = 1e200


# -----------------------------------------------------------------------------
# 1. 0 阶与 1 阶
# -----------------------------------------------------------------------------

def _series_01(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """幂级数同时给出 J0, J1 以及 Y0, Y1 中的级数部分（x 需 > 0 才能用 Y 部分）。"""
    q = -0.25 * x * x
    term0 = np.ones_like(x)
    term1 = 0.5 * x
    j0 = term0.copy()
    j1 = term1.copy()
    # Y0 需要 sum_{k>=1} H_k * term0_k; Y1 需要 sum_{k>=0} (H_k + H_{k+1}) * term1_k
    y0_sum = np.zeros_like(x)
    y1_sum = term1.copy()  # k=0: H_0 + H_1 = 1
    harmonic = 0.0
    for k in range(1, _SERIES_TERMS):
        term0 = term0 * q / (k * k)
        term1 = term1 * q / (k * (k + 1))
        j0 += term0
        j1 += term1
        harmonic += 1.0 / k
        y0_sum += harmonic * term0
        y1_sum += (2.0 * harmonic + 1.0 / (k + 1)) * term1
    return j0, j1, y0_sum, y1_sum


def _asymptotic(order: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """大自变量 Hankel 渐近展开，返回 (J_order, Y_order)。项开始增大时截断。"""
    mu = 4.0 * order * order
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, _ASYMPTOTIC_TERMS):
        new_term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        active &= np.abs(new_term) < np.abs(term)
        sign = -1.0 if (k // 2) % 2 else 1.0
        contribution = np.where(active, sign * new_term, 0.0)
        if k % 2:
            q += contribution
        else:
            p += contribution
        term = new_term
    chi = x - (0.5 * order + 0.25) * np.pi
    amplitude = np.sqrt(2.0 / (np.pi * x))
    cos_chi = np.cos(chi)
    sin_chi = np.sin(chi)
    return amplitude * (p * cos_chi - q * sin_chi), amplitude * (p * sin_chi + q * cos_chi)


def bessel_j01(x) -> Tuple[np.ndarray, np.ndarray]:
    """J0(x), J1(x)，x 为实数组（J 为偶/奇函数，负自变量按对称性处理）。"""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    j0 = np.empty_like(ax)
    j1 = np.empty_like(ax)
    small = ax <= SWITCH_ARGUMENT
    if np.any(small):
        s0, s1, _, _ = _series_01(ax[small])
        j0[small], j1[small] = s0, s1
    large = ~small
    if np.any(large):
        j0[large] = _asymptotic(0, ax[large])[0]
        j1[large] = _asymptotic(1, ax[large])[0]
    return j0, np.where(x < 0, -j1, j1)


def bessel_y01(x) -> Tuple[np.ndarray, np.ndarray]:
    """Y0(x), Y1(x)，要求 x > 0。"""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise SpecialFunctionError("Bessel Y 函数要求自变量 x > 0。")
    y0 = np.empty_like(x)
    y1 = np.empty_like(x)
    small = x <= SWITCH_ARGUMENT
    if np.any(small):
        xs = x[small]
        j0, j1, y0_sum, y1_sum = _series_01(xs)
        log_term = np.log(0.5 * xs) + EULER_GAMMA
        y0[small] = (2.0 / np.pi) * (log_term * j0 - y0_sum)
        y1[small] = (2.0 / np.pi) * log_term * j1 - 2.0 / (np.pi * xs) - y1_sum / np.pi
    large = ~small
    if np.any(large):
        y0[large] = _asymptotic(0, x[large])[1]
        y1[large] = _asymptotic(1, x[large])[1]
    return y0, y1


def hankel1_01(x) -> Tuple[np.ndarray, np.ndarray]:
    """第一类 Hankel 函数 H0^(1)(x), H1^(1)(x)，x > 0。"""
    j0, j1 = bessel_j01(x)
    y0, y1 = bessel_y01(x)
    return j0 + 1j * y0, j1 + 1j * y1


# -----------------------------------------------------------------------------
# 2. 高阶：递推表
# -----------------------------------------------------------------------------

def bessel_j_table(order_max: int, x) -> np.ndarray:
    """
    一次性计算 J_0 ... J_{order_max}。

    Args:
        order_max (int): 最高阶数 (>= 0)。
        x: 非负实数组。

    Returns:
        np.ndarray: 形状 (order_max + 1, *x.shape)。
    """
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.zeros((order_max + 1, flat.size))
    j0, j1 = bessel_j01(flat)
    out[0] = j0
    if order_max >= 1:
        out[1] = j1
    positive = flat > 0
    if order_max >= 2 and np.any(positive):
        xp = flat[positive]
        top = max(float(order_max), float(xp.max()))
        start = 2 * ((int(top) + 20 + int(np.sqrt(40.0 * top))) // 2)
        j_next = np.zeros_like(xp)
        j_cur = np.full_like(xp, 1e-30)
        norm = 2.0 * j_cur
        table = np.zeros((order_max + 1, xp.size))
        for m in range(start, 0, -1):
            j_prev = (2.0 * m / xp) * j_cur - j_next
            j_next, j_cur = j_cur, j_prev
            index = m - 1
            if index <= order_max:
                table[index] = j_cur
            if index % 2 == 0:
                norm += j_cur if index == 0 else 2.0 * j_cur
            big = np.abs(j_cur) > _RESCALE_LIMIT
            if np.any(big):
                j_cur[big] /= _RESCALE_LIMIT
                j_next[big] /= _RESCALE_LIMIT
                norm[big] /= _RESCALE_LIMIT
                table[:, big] /= _RESCALE_LIMIT
        out[2:, positive] = table[2:] / norm
    return out.reshape((order_max + 1,) + x.shape)


def bessel_y_table(order_max: int, x) -> np.ndarray:
    """Y_0 ... Y_{order_max}，向前递推，x > 0。"""
    x = np.asarray(x, dtype=float)
    y0, y1 = bessel_y01(x)
    out = np.empty((order_max + 1,) + x.shape)
    out[0] = y0
    if order_max >= 1:
        out[1] = y1
    for m in range(1, order_max):
        out[m + 1] = (2.0 * m / x) * out[m] - out[m - 1]
    return out


def bessel(kind: str, order: int, x):
    """
    整数阶 Bessel 函数 J_m(x) 或 Y_m(x)。

    Args:
        kind (str): "J" 或 "Y"。
        order (int): 阶数 m >= 0。
        x: 实数或实数组；J 要求 x >= 0，Y 要求 x > 0。

    Raises:
        SpecialFunctionError: 阶数为负、kind 未知或自变量越界。
    """
    if order < 0:
        raise SpecialFunctionError(f"阶数必须非负，收到 {order}。")
    x_arr = np.asarray(x, dtype=float)
    if kind == "J":
        if np.any(x_arr < 0):
            raise SpecialFunctionError("Bessel J 函数要求自变量 x >= 0。")
        result = bessel_j_table(order, x_arr)[order]
    elif kind == "Y":
        result = bessel_y_table(order, x_arr)[order]
    else:
        raise SpecialFunctionError(f"未知的 Bessel 函数类型 '{kind}'，应为 'J' 或 'Y'。")
    return float(result) if result.ndim == 0 else result


def bessel_derivative(kind: str, order: int, x):
    """J_m'(x) 或 Y_m'(x)：m=0 时为 -Z_1，否则 (Z_{m-1} - Z_{m+1}) / 2。"""
    x_arr = np.asarray(x, dtype=float)
    table = bessel_j_table(order + 1, x_arr) if kind == "J" else bessel_y_table(order + 1, x_arr)
    if order == 0:
        result = -table[1]
    else:
        result = 0.5 * (table[order - 1] - table[order + 1])
    return float(result) if result.ndim == 0 else result


# -----------------------------------------------------------------------------
# 3. 基本解
# -----------------------------------------------------------------------------

@dataclass
class GreenValue:
    """基本解的值与对第一个自变量 z 的梯度（最后一维长度 2）。"""
    value: np.ndarray
    gradient_z: np.ndarray


def green2d(k: float, z, x) -> GreenValue:
    """
    二维 Helmholtz 基本解 G_k(z,x) = (i/4) H0^(1)(k|z-x|) 及其对 z 的解析梯度。

    梯度使用 d/dr H0^(1) = -H1^(1)，即 grad_z G = -(ik/4) H1(kr) (z-x)/r。

    Raises:
        SpecialFunctionError: k <= 0 或 z 与 x 重合。
    """
    if k <= 0:
        raise SpecialFunctionError("二维基本解要求波数 k > 0。")
    diff = np.asarray(z, dtype=float) - np.asarray(x, dtype=float)
    r = np.hypot(diff[..., 0], diff[..., 1])
    if np.any(r == 0):
        raise SpecialFunctionError("green2d 在 z = x 处奇异。")
    h0, h1 = hankel1_01(k * r)
    value = 0.25j * h0
    gradient = (-0.25j * k * h1 / r)[..., None] * diff
    return GreenValue(value=value, gradient_z=gradient)


def green3d(k: float, z, x):
    """三维 Helmholtz 基本解 e^{ik|z-x|} / (4π|z-x|)，k >= 0。仅用于公式单元测试。"""
    if k < 0:
        raise SpecialFunctionError("三维基本解要求波数 k >= 0。")
    diff = np.asarray(z, dtype=float) - np.asarray(x, dtype=float)
    r = np.linalg.norm(diff, axis=-1)
    if np.any(r == 0):
        raise SpecialFunctionError("green3d 在 z = x 处奇异。")
    value = np.exp(1j * k * r) / (4.0 * np.pi * r)
    return complex(value) if np.ndim(value) == 0 else value
