# -*- coding: utf-8 -*-

"""
障碍物场景：外区域 Ω、障碍物分量 D_1...D_N、边界条件与波数，以及针与障碍物的位置关系判定。
"""

import enum
import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from core.errors import GeometryError
from .curves import CurveSpec, Placement, curve_polygon, distance_to_curve, segment_polygon_crossings
from .needle import NeedleSpec

BOUNDARY_CONDITIONS = ("impedance", "sound_soft")
# 擦边判定容差（相对于 Ω 的直径）
GRAZING_TOLERANCE = 1e-9
# 细化割线判定时在最近点附近的采样数
LOCAL_SAMPLES = 513


class NeedleRelation(enum.Enum):
    TIP_IN_OBSTACLE = "TipInObstacle"
    CROSSES_OBSTACLE = "CrossesObstacle"
    AVOIDS = "Avoids"
    GRAZING = "Grazing"


@dataclass(frozen=True)
class Impedance:
    """
    阻抗系数 λ：常数，或分量参数 t 上的低阶三角多项式 sum_{m=-L..L} a_m e^{imt}。
    fourier 非空时优先使用 fourier 系数（按 m=-L..L 排列，长度为奇数）。
    """
    constant: complex = 1j
    fourier: Tuple[complex, ...] = ()

    def evaluate(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if not self.fourier:
            return np.full(t.shape, complex(self.constant))
        order = (len(self.fourier) - 1) // 2
        values = np.zeros(t.shape, dtype=complex)
        for m, a in zip(range(-order, order + 1), self.fourier):
            values += a * np.exp(1j * m * t)
        return values

    @property
    def is_constant(self) -> bool:
        return not self.fourier


@dataclass(frozen=True)
class Component:
    """一个障碍物分量：基准曲线 + 放置 + （阻抗场景下的）λ。"""
    curve: CurveSpec
    placement: Placement = field(default_factory=Placement)
    impedance: Optional[Impedance] = None

    @property
    def boundary(self) -> CurveSpec:
        return self.curve.placed(self.placement)


@dataclass(frozen=True)
class ObstacleScene:
    outer: CurveSpec
    components: Tuple[Component, ...] = ()
    boundary_condition: str = "impedance"
    k: float = 2.0
    clearance_margin: float = 0.02
    min_imag_impedance: float = 1e-3
    allow_real_impedance: bool = False

    @property
    def obstacles(self) -> List[CurveSpec]:
        return [c.boundary for c in self.components]

    @property
    def is_empty(self) -> bool:
        return not self.components

    def validate(self):
        """
        校验场景不变量，失败时抛出 GeometryError：
        曲线合法；每个 D̄_j ⊂ Ω 且离 ∂Ω 有足够间隙；分量两两分离且互不包含；阻抗 Im λ 有正下界。
        """
        if self.boundary_condition not in BOUNDARY_CONDITIONS:
            raise GeometryError(f"未知边界条件 '{self.boundary_condition}'，可选: {BOUNDARY_CONDITIONS}")
        if not self.k > 0:
            raise GeometryError(f"二维引擎要求波数 k > 0，收到 {self.k}。")
        self.outer.validate()
        boundaries = self.obstacles
        for j, boundary in enumerate(boundaries):
            boundary.validate()
            polygon = curve_polygon(boundary)
            if not np.all(self.outer.contains(polygon)):
                raise GeometryError(f"障碍物 D_{j + 1} 不完全位于 Ω 内。")
            clearance = float(distance_to_curve(polygon[::8], self.outer)[0].min())
            if clearance < self.clearance_margin:
                raise GeometryError(f"障碍物 D_{j + 1} 与 ∂Ω 的间隙 {clearance:.3e} 小于要求的 {self.clearance_margin:.3e}。")
        for i in range(len(boundaries)):
            for j in range(i + 1, len(boundaries)):
                poly_i, poly_j = curve_polygon(boundaries[i]), curve_polygon(boundaries[j])
                if boundaries[i].contains(poly_j[:1])[0] or boundaries[j].contains(poly_i[:1])[0]:
                    raise GeometryError(f"障碍物 D_{i + 1} 与 D_{j + 1} 嵌套或相交。")
                gap = float(distance_to_curve(poly_j[::8], boundaries[i])[0].min())
                if gap < self.clearance_margin:
                    raise GeometryError(f"障碍物 D_{i + 1} 与 D_{j + 1} 的间距 {gap:.3e} 过小。")
        if self.boundary_condition == "impedance":
            for j, component in enumerate(self.components):
                if component.impedance is None:
                    raise GeometryError(f"阻抗场景中障碍物 D_{j + 1} 缺少 λ。")
                t = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
                min_imag = float(component.impedance.evaluate(t).imag.min())
                if min_imag < self.min_imag_impedance:
                    if not self.allow_real_impedance:
                        raise GeometryError(
                            f"障碍物 D_{j + 1} 的 Im λ 最小值 {min_imag:.3e} 低于下界 {self.min_imag_impedance:.3e}；"
                            f"如确需实 λ，请设置 allow_real_impedance。")
                    logging.warning(f"障碍物 D_{j + 1} 的 Im λ 无正下界，正问题可能不适定，请关注条件数。")
        logging.info(f"场景校验通过：{len(boundaries)} 个障碍物，边界条件 {self.boundary_condition}，k={self.k}。")

    # --- 点位查询 ---
    def obstacle_closure_contains(self, points, tolerance: float = 0.0) -> np.ndarray:
        """点是否在某个 D̄_j 内（边界容差 tolerance）。"""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        result = np.zeros(pts.shape[0], dtype=bool)
        for boundary in self.obstacles:
            result |= boundary.contains(pts)
            if tolerance > 0:
                result |= distance_to_curve(pts, boundary)[0] <= tolerance
        return result

    def distance_to_obstacles(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.is_empty:
            return np.full(pts.shape[0], np.inf)
        return np.min([distance_to_curve(pts, b)[0] for b in self.obstacles], axis=0)

    def in_domain(self, points) -> np.ndarray:
        """点是否在 Ω∖D̄ 内。"""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return self.outer.contains(pts) & ~self.obstacle_closure_contains(pts)

    def without_obstacles(self) -> "ObstacleScene":
        return replace(self, components=())

    def transformed(self, placement: Placement) -> "ObstacleScene":
        """整体刚体运动后的场景（用于不变性检验）。"""
        moved = tuple(replace(c, placement=c.placement.compose(placement)) for c in self.components)
        return replace(self, outer=self.outer.placed(placement), components=moved)


def _segment_curve_distance(a: np.ndarray, b: np.ndarray, boundary: CurveSpec) -> float:
    """线段 ab 到光滑曲线的最小距离：细多边形粗搜 + 有界 Brent 细化。"""
    polygon = curve_polygon(boundary)
    ab = b - a

    def seg_dist(points):
        s = np.clip(((points - a) @ ab) / float(ab @ ab), 0.0, 1.0)
        foot = a + s[:, None] * ab
        return np.hypot(points[:, 0] - foot[:, 0], points[:, 1] - foot[:, 1])

    d = seg_dist(polygon)
    index = int(np.argmin(d))
    h = 2.0 * np.pi / polygon.shape[0]
    t0 = index * h
    result = minimize_scalar(
        lambda t: float(seg_dist(boundary.evaluate(t)[0])[0]),
        bounds=(t0 - 2 * h, t0 + 2 * h), method="bounded", options={"xatol": 1e-15},
    )
    return float(min(result.fun, d[index]))


def _local_cut_depth(a: np.ndarray, b: np.ndarray, boundary: CurveSpec) -> float:
    """
    线段在离曲线最近处切入曲线的深度（对割线求曲线弧到线段所在直线的最大偏离）。

    多边形的弦比真曲线低一个弓高，深度小于弓高的割线在多边形上看不到交点，这里在真曲线上细化。
    """
    polygon = curve_polygon(boundary)
    ab = b - a
    length2 = float(ab @ ab)
    normal = np.array([-ab[1], ab[0]]) / np.sqrt(length2)

    def offsets(t):
        z = boundary.evaluate(t)[0] - a
        return z @ normal, (z @ ab) / length2

    s = np.clip(((polygon - a) @ ab) / length2, 0.0, 1.0)
    foot = a + s[:, None] * ab
    index = int(np.argmin(np.hypot(polygon[:, 0] - foot[:, 0], polygon[:, 1] - foot[:, 1])))
    h = 2.0 * np.pi / polygon.shape[0]
    t = index * h + np.linspace(-2.0 * h, 2.0 * h, LOCAL_SAMPLES)
    g, s = offsets(t)
    sign = np.sign(g)
    within = (s >= 0.0) & (s <= 1.0)
    changes = np.where(within[:-1] & within[1:] & (sign[:-1] * sign[1:] < 0))[0]
    if changes.size < 2:
        return 0.0
    side = sign[changes[0] + 1]
    result = minimize_scalar(
        lambda u: -side * float(offsets(u)[0][0]),
        bounds=(t[changes[0]], t[changes[-1] + 1]), method="bounded", options={"xatol": 1e-15},
    )
    return float(-result.fun)


def classify_needle_vs_obstacle(x, needle: NeedleSpec, scene: ObstacleScene) -> NeedleRelation:
    """
    判定针与障碍物的位置关系。

    - TipInObstacle: x ∈ D̄
    - CrossesObstacle: x ∉ D̄ 且 σ ∩ D ≠ ∅
    - Grazing: σ ∩ ∂D ≠ ∅ 但 σ ∩ D = ∅
    - Avoids: σ ∩ D̄ = ∅
    """
    x = np.asarray(x, dtype=float)
    if scene.is_empty:
        return NeedleRelation.AVOIDS
    tolerance = GRAZING_TOLERANCE * scene.outer.diameter
    if scene.obstacle_closure_contains(x[None, :], tolerance=tolerance)[0]:
        return NeedleRelation.TIP_IN_OBSTACLE
    pts = needle.points
    touches = False
    for boundary in scene.obstacles:
        polygon = curve_polygon(boundary)
        if np.any(boundary.contains(pts)):
            return NeedleRelation.CROSSES_OBSTACLE
        for a, b in zip(pts[:-1], pts[1:]):
            crossings = segment_polygon_crossings(a, b, polygon)
            if crossings.size >= 2:
                mids = a + 0.5 * (crossings[:-1] + crossings[1:])[:, None] * (b - a)
                if np.any(boundary.contains(mids)):
                    return NeedleRelation.CROSSES_OBSTACLE
            if _segment_curve_distance(a, b, boundary) <= tolerance:
                if _local_cut_depth(a, b, boundary) > tolerance:
                    return NeedleRelation.CROSSES_OBSTACLE
                touches = True
    return NeedleRelation.GRAZING if touches else NeedleRelation.AVOIDS
