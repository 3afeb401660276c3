# -*- coding: utf-8 -*-

"""
全平面 Helmholtz 解的 Fourier–Bessel 展开 v(z) = sum_{m=-M..M} c_m J_|m|(k r) e^{imθ}（r, θ 相对 center）。
"""

from dataclasses import dataclass
from typing import Iterable, Tuple, Union

import numpy as np

from geometry.area import DEFAULT_ORDER, area_quadrature
from geometry.curves import DiscretizedCurve
from helmholtz.specfun import bessel_j_table


@dataclass
class EntireSolution:
    center: Tuple[float, float]
    k: float
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        if self.coefficients.ndim != 1 or self.coefficients.size % 2 == 0:
            raise ValueError("系数个数必须为 2M+1。")

    @property
    def order(self) -> int:
        return (self.coefficients.size - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.order, self.order + 1)

    @classmethod
    def single_mode(cls, center, k: float, m: int, order: int = None, value: complex = 1.0) -> "EntireSolution":
        order = abs(m) if order is None else order
        coefficients = np.zeros(2 * order + 1, dtype=complex)
        coefficients[m + order] = value
        return cls(tuple(center), k, coefficients)

    def rotated(self, angle: float) -> "EntireSolution":
        """绕 center 旋转 angle 后的函数 v(R(-angle) z)：系数乘以相位 e^{-imφ}。"""
        return EntireSolution(self.center, self.k, self.coefficients * np.exp(-1j * self.modes * angle))

    def scaled(self, factor: complex) -> "EntireSolution":
        return EntireSolution(self.center, self.k, self.coefficients * factor)


def basis_matrices(center, k: float, order: int, points: np.ndarray):
    """
    基函数 φ_m = J_|m|(k r) e^{imθ}（m = -order..order）在各点处的值与梯度。

    用带符号阶 b_m = J_m(kr) e^{imθ}（J_{-p} = (-1)^p J_p）写梯度：
    ∂x b_m = (k/2)(b_{m-1} - b_{m+1})，∂y b_m = (ik/2)(b_{m-1} + b_{m+1})。

    Returns:
        (values, grad_x, grad_y)，形状均为 (P, 2*order+1)。
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    rel = pts - np.asarray(center, dtype=float)
    r = np.hypot(rel[:, 0], rel[:, 1])
    theta = np.arctan2(rel[:, 1], rel[:, 0])
    table = bessel_j_table(order + 1, k * r)
    extended = np.arange(-order - 1, order + 2)
    sign = np.where((extended < 0) & (extended % 2 == 1), -1.0, 1.0)
    signed = table[np.abs(extended)].T * sign * np.exp(1j * np.outer(theta, extended))
    modes = np.arange(-order, order + 1)
    # φ_m = s_m b_m，s_m 抵消负阶的符号
    s = np.where((modes < 0) & (modes % 2 == 1), -1.0, 1.0)
    values = signed[:, 1:-1] * s
    grad_x = 0.5 * k * (signed[:, :-2] - signed[:, 2:]) * s
    grad_y = 0.5j * k * (signed[:, :-2] + signed[:, 2:]) * s
    return values, grad_x, grad_y


def eval_entire(v: EntireSolution, z) -> Tuple[Union[complex, np.ndarray], np.ndarray]:
    """
    v 与 ∇v 的级数求值。

    Returns:
        单点输入返回 (complex, (2,) 数组)，多点输入返回 ((P,), (P, 2))。
    """
    pts = np.asarray(z, dtype=float)
    values, gx, gy = basis_matrices(v.center, v.k, v.order, pts.reshape(-1, 2))
    value = values @ v.coefficients
    gradient = np.stack([gx @ v.coefficients, gy @ v.coefficients], axis=-1)
    if pts.ndim == 1:
        return complex(value[0]), gradient[0]
    return value, gradient


def normal_derivative(v: EntireSolution, curve: DiscretizedCurve) -> np.ndarray:
    """∂v/∂ν 在曲线节点上的解析值。"""
    _, gradient = eval_entire(v, curve.nodes)
    return np.sum(gradient * curve.normals, axis=-1)


def trace(v: EntireSolution, curve: DiscretizedCurve) -> np.ndarray:
    return eval_entire(v, curve.nodes)[0]


def needle_norms(v: EntireSolution, region: Union[object, Iterable], order: int = DEFAULT_ORDER) -> Tuple[float, float]:
    """
    区域上的 ‖v‖_{L²} 与 ‖∇v‖_{L²}；region 为多个区域时按并集（互不相交）累加。
    """
    regions = list(region) if isinstance(region, (list, tuple)) else [region]
    l2_sq = 0.0
    h1_sq = 0.0
    for item in regions:
        l2_sq += area_quadrature(item, lambda p: np.abs(eval_entire(v, p)[0]) ** 2, order)
        h1_sq += area_quadrature(item, lambda p: np.sum(np.abs(eval_entire(v, p)[1]) ** 2, axis=-1), order)
    return float(np.sqrt(l2_sq)), float(np.sqrt(h1_sq))
