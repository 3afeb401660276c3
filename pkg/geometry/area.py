# -*- coding: utf-8 -*-

"""
平面区域上的面积分求积。

每种区域给出 nodes_and_weights(order)：径向 Gauss-Legendre（order 个点）× 角向梯形（4*order 个点）。
星形区域用射线映射 z = c + s (z(t) - c)，对光滑被积函数谱精度收敛；
带排除集（管状邻域、障碍物）的区域在节点上做点位判定后置零，只有低阶收敛。
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from core.errors import GeometryError
from .curves import CurveSpec, curve_polygon
from .needle import TubeSet

DEFAULT_ORDER = 48


def _gauss_unit(order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def _angles(count: int, start: float = 0.0, span: float = 2.0 * np.pi, periodic: bool = True):
    if periodic:
        theta = start + span * np.arange(count) / count
        return theta, np.full(count, span / count)
    x, w = np.polynomial.legendre.leggauss(count)
    return start + 0.5 * span * (x + 1.0), 0.5 * span * w


def _star_center(curve: CurveSpec) -> np.ndarray:
    """星形中心取面积质心，并检查曲线关于它是星形的。"""
    center = curve.centroid
    t = 2.0 * np.pi * np.arange(512) / 512
    z, dz, _ = curve.evaluate(t)
    rel = z - center
    if np.any(rel[:, 0] * dz[:, 1] - rel[:, 1] * dz[:, 0] <= 0):
        raise GeometryError("区域关于其质心不是星形的，无法使用射线映射求积。")
    return center


def radial_extent(curve: CurveSpec, center: np.ndarray, theta: np.ndarray, iterations: int = 60) -> np.ndarray:
    """星形曲线在方向 theta 上到 center 的距离 r(theta)，在参数 t 上二分求解。"""
    polygon = curve_polygon(curve)
    count = polygon.shape[0]
    phi = np.unwrap(np.arctan2(polygon[:, 1] - center[1], polygon[:, 0] - center[0]))
    target = phi[0] + np.mod(theta - phi[0], 2.0 * np.pi)
    index = np.clip(np.searchsorted(phi, target) - 1, 0, count - 1)
    h = 2.0 * np.pi / count
    lo = index * h
    hi = lo + h
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        z = curve.evaluate(mid)[0]
        angle = np.arctan2(z[:, 1] - center[1], z[:, 0] - center[0])
        # 把角度差折回 (-π, π]
        gap = np.mod(angle - target + np.pi, 2.0 * np.pi) - np.pi
        below = gap < 0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    z = curve.evaluate(0.5 * (lo + hi))[0]
    return np.hypot(z[:, 0] - center[0], z[:, 1] - center[1])


@dataclass(frozen=True)
class DiskRegion:
    """圆盘 B(center, radius)，可选裁剪到 clip 曲线内部。"""
    center: Tuple[float, float]
    radius: float
    clip: Optional[CurveSpec] = None

    def nodes_and_weights(self, order: int = DEFAULT_ORDER):
        s, ws = _gauss_unit(order)
        theta, wt = _angles(4 * order)
        r = self.radius * s
        rr, tt = np.meshgrid(r, theta, indexing="ij")
        points = np.stack([self.center[0] + rr * np.cos(tt), self.center[1] + rr * np.sin(tt)], axis=-1).reshape(-1, 2)
        weights = (np.outer(self.radius * ws * r, wt)).ravel()
        if self.clip is not None:
            weights = weights * self.clip.contains(points)
        return points, weights


@dataclass(frozen=True)
class SectorRegion:
    """以 vertex 为顶点、轴向 direction、半张角 half_angle、半径 radius 的扇形（有限锥），可裁剪。"""
    vertex: Tuple[float, float]
    radius: float
    direction: Tuple[float, float]
    half_angle: float
    clip: Optional[CurveSpec] = None

    def nodes_and_weights(self, order: int = DEFAULT_ORDER):
        s, ws = _gauss_unit(order)
        axis = np.arctan2(self.direction[1], self.direction[0])
        theta, wt = _angles(order, axis - self.half_angle, 2.0 * self.half_angle, periodic=False)
        r = self.radius * s
        rr, tt = np.meshgrid(r, theta, indexing="ij")
        points = np.stack([self.vertex[0] + rr * np.cos(tt), self.vertex[1] + rr * np.sin(tt)], axis=-1).reshape(-1, 2)
        weights = (np.outer(self.radius * ws * r, wt)).ravel()
        if self.clip is not None:
            weights = weights * self.clip.contains(points)
        return points, weights


@dataclass(frozen=True)
class StarRegion:
    """星形曲线围成的区域（障碍物分量 D_j 或 Ω），可排除管状邻域 σ_ε。"""
    curve: CurveSpec
    exclude: Optional[TubeSet] = None

    def nodes_and_weights(self, order: int = DEFAULT_ORDER):
        center = _star_center(self.curve)
        s, ws = _gauss_unit(order)
        count = 4 * order
        t = 2.0 * np.pi * np.arange(count) / count
        z, dz, _ = self.curve.evaluate(t)
        rel = z - center
        jac = rel[:, 0] * dz[:, 1] - rel[:, 1] * dz[:, 0]
        points = (center[None, None, :] + s[:, None, None] * rel[None, :, :]).reshape(-1, 2)
        weights = (np.outer(ws * s, jac * 2.0 * np.pi / count)).ravel()
        if self.exclude is not None:
            weights = weights * ~self.exclude.contains(points)
        return points, weights


@dataclass(frozen=True)
class AnnularRegion:
    """外曲线与一个内部星形曲线之间的区域，沿内曲线质心出发的射线参数化。"""
    outer: CurveSpec
    inner: CurveSpec

    def nodes_and_weights(self, order: int = DEFAULT_ORDER):
        center = _star_center(self.inner)
        s, ws = _gauss_unit(order)
        theta, wt = _angles(4 * order)
        r_in = radial_extent(self.inner, center, theta)
        r_out = radial_extent(self.outer, center, theta)
        rho = r_in[None, :] + s[:, None] * (r_out - r_in)[None, :]
        points = np.stack([center[0] + rho * np.cos(theta)[None, :],
                           center[1] + rho * np.sin(theta)[None, :]], axis=-1).reshape(-1, 2)
        weights = (ws[:, None] * ((r_out - r_in) * wt)[None, :] * rho).ravel()
        return points, weights


@dataclass(frozen=True)
class PerforatedRegion:
    """Ω 挖去若干障碍物（多个洞时使用，点位判定限制，低阶收敛）。"""
    outer: CurveSpec
    holes: Tuple[CurveSpec, ...]

    def nodes_and_weights(self, order: int = DEFAULT_ORDER):
        points, weights = StarRegion(self.outer).nodes_and_weights(order)
        keep = np.ones(points.shape[0], dtype=bool)
        for hole in self.holes:
            keep &= ~hole.contains(points)
        return points, weights * keep


def domain_minus_obstacles(outer: CurveSpec, holes: Sequence[CurveSpec]):
    """Ω∖D̄ 的求积区域：单个洞用射线映射（谱精度），多个洞退化为点位判定。"""
    if not holes:
        return StarRegion(outer)
    if len(holes) == 1:
        return AnnularRegion(outer, holes[0])
    return PerforatedRegion(outer, tuple(holes))


def area_quadrature(region, f: Callable[[np.ndarray], np.ndarray], order: int = DEFAULT_ORDER):
    """
    在区域上对 f 求积分。

    Args:
        region: 提供 nodes_and_weights(order) 的区域对象。
        f: 接收 (N, 2) 点数组、返回 N 个值的函数。
        order (int): 径向 Gauss 点数。
    """
    points, weights = region.nodes_and_weights(order)
    active = weights != 0
    values = np.zeros(points.shape[0], dtype=complex)
    if np.any(active):
        values[active] = f(points[active])
    total = np.sum(weights * values)
    return float(total.real) if np.all(values.imag == 0) else complex(total)
