# -*- coding: utf-8 -*-

"""
针（needle）：从外边界 ∂Ω 出发、到内部尖端 x 结束的分段线性曲线，以及其管状邻域 σ_ε。
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, TYPE_CHECKING

import numpy as np

from core.errors import GeometryError
from .curves import CurveSpec, distance_to_curve, segments_intersect

if TYPE_CHECKING:
    from .scene import ObstacleScene

# "在 ∂Ω 上" 的相对容差，以及配置中针起点的吸附容差（均相对于 Ω 的直径）
ON_BOUNDARY_TOLERANCE = 1e-9
SNAP_TOLERANCE = 1e-6


@dataclass(frozen=True)
class NeedleSpec:
    """分段线性针 p_0 ... p_L，尖端为 p_L。"""
    vertices: Tuple[Tuple[float, float], ...]

    @property
    def points(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def tip(self) -> np.ndarray:
        return self.points[-1]

    @property
    def length(self) -> float:
        return float(np.sum(np.linalg.norm(np.diff(self.points, axis=0), axis=1)))

    @property
    def tip_direction(self) -> np.ndarray:
        """最后一段的单位方向（指向尖端）。"""
        last = self.points[-1] - self.points[-2]
        return last / np.linalg.norm(last)

    def sample(self, spacing: float) -> np.ndarray:
        """沿针按近似等弧长采样（含全部顶点）。"""
        pts = self.points
        samples = [pts[:1]]
        for a, b in zip(pts[:-1], pts[1:]):
            count = max(1, int(np.ceil(np.linalg.norm(b - a) / spacing)))
            s = np.linspace(0.0, 1.0, count + 1)[1:, None]
            samples.append(a + s * (b - a))
        return np.concatenate(samples, axis=0)

    def transformed(self, matrix: np.ndarray, offset) -> "NeedleSpec":
        moved = self.points @ np.asarray(matrix).T + np.asarray(offset, dtype=float)
        return NeedleSpec(tuple((float(p[0]), float(p[1])) for p in moved))


def dist_to_needle(z, needle: NeedleSpec):
    """
    点到折线的精确欧氏距离（对 z 的最后一维长度 2 向量化）。

    Returns:
        标量输入返回 float，否则返回与 z 前导形状相同的数组。
    """
    pts = np.asarray(z, dtype=float)
    flat = pts.reshape(-1, 2)
    best = np.full(flat.shape[0], np.inf)
    verts = needle.points
    for a, b in zip(verts[:-1], verts[1:]):
        ab = b - a
        s = np.clip(((flat - a) @ ab) / float(ab @ ab), 0.0, 1.0)
        foot = a + s[:, None] * ab
        best = np.minimum(best, np.hypot(flat[:, 0] - foot[:, 0], flat[:, 1] - foot[:, 1]))
    if pts.ndim == 1:
        return float(best[0])
    return best.reshape(pts.shape[:-1])


@dataclass(frozen=True)
class TubeSet:
    """σ_ε = {z : dist(z, σ) <= ε}。"""
    needle: NeedleSpec
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError(f"管状邻域半径必须为正，收到 {self.radius}。")

    def contains(self, z) -> np.ndarray:
        return dist_to_needle(z, self.needle) <= self.radius


@dataclass
class NeedleCheck:
    """validate_needle 的结果：ok 或第一个失败的不变量。"""
    ok: bool
    violation: Optional[str] = None
    message: str = ""


def validate_needle(needle: NeedleSpec, outer: CurveSpec, scene: Optional["ObstacleScene"] = None) -> NeedleCheck:
    """
    检查针的不变量：起点在 ∂Ω 上、其余顶点在 Ω 内部、相邻顶点不重合、折线不自交、整根针在 Ω 内。
    给定场景时额外拒绝擦边（grazing）针。

    Returns:
        NeedleCheck: ok=True，或 violation 为第一个失败项的代码。
    """
    pts = needle.points
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
        return NeedleCheck(False, "too few vertices", "针至少需要两个二维顶点。")
    if np.any(np.linalg.norm(np.diff(pts, axis=0), axis=1) == 0):
        return NeedleCheck(False, "repeated vertex", "相邻顶点重合。")
    diameter = outer.diameter
    start_distance = distance_to_curve(pts[:1], outer)[0][0]
    if start_distance > ON_BOUNDARY_TOLERANCE * diameter:
        return NeedleCheck(False, "start not on ∂Ω", f"起点到 ∂Ω 的距离为 {start_distance:.3e}。")
    interior = pts[1:]
    inside = outer.contains(interior)
    interior_distance = distance_to_curve(interior, outer)[0]
    bad = np.where(~inside | (interior_distance <= ON_BOUNDARY_TOLERANCE * diameter))[0]
    if bad.size:
        return NeedleCheck(False, "vertex not interior", f"第 {int(bad[0]) + 1} 个顶点不在 Ω 内部。")
    # 除起点外针上各点都应在 Ω 内
    body = needle.sample(diameter / 400.0)[1:]
    if not np.all(outer.contains(body)):
        return NeedleCheck(False, "needle leaves Ω", "针的某一段离开了 Ω。")
    if _polyline_self_intersects(pts):
        return NeedleCheck(False, "self-intersecting", "折线自交。")
    if scene is not None:
        from .scene import NeedleRelation, classify_needle_vs_obstacle
        if classify_needle_vs_obstacle(needle.tip, needle, scene) is NeedleRelation.GRAZING:
            return NeedleCheck(False, "grazing needle", "针与 ∂D 相切但未进入 D（擦边情形不受支持）。")
    return NeedleCheck(True)


def require_valid_needle(needle: NeedleSpec, outer: CurveSpec, scene: Optional["ObstacleScene"] = None):
    """validate_needle 的抛异常版本。"""
    check = validate_needle(needle, outer, scene)
    if not check.ok:
        raise GeometryError(f"{check.violation}: {check.message}")


def snap_needle_to_boundary(needle: NeedleSpec, outer: CurveSpec) -> NeedleSpec:
    """起点距 ∂Ω 在 1e-6·diam 以内时吸附到 ∂Ω 上的最近点，否则抛出 GeometryError。"""
    diameter = outer.diameter
    distance, t = distance_to_curve(needle.points[:1], outer)
    if distance[0] <= ON_BOUNDARY_TOLERANCE * diameter:
        return needle
    if distance[0] > SNAP_TOLERANCE * diameter:
        raise GeometryError(f"针的起点距 ∂Ω {distance[0]:.3e}，超出吸附容差。")
    foot = outer.evaluate(t)[0][0]
    logging.info(f"针的起点已吸附到 ∂Ω 上的点 ({foot[0]:.9f}, {foot[1]:.9f})。")
    return NeedleSpec(((float(foot[0]), float(foot[1])),) + needle.vertices[1:])


def straight_needle(outer: CurveSpec, tip) -> NeedleSpec:
    """默认针：从 ∂Ω 上距 tip 最近的点到 tip 的直线段。"""
    tip = np.asarray(tip, dtype=float)
    _, t = distance_to_curve(tip[None, :], outer)
    foot = outer.evaluate(t)[0][0]
    return NeedleSpec(((float(foot[0]), float(foot[1])), (float(tip[0]), float(tip[1]))))


def _polyline_self_intersects(pts: np.ndarray) -> bool:
    n_seg = pts.shape[0] - 1
    for i in range(n_seg):
        for j in range(i + 1, n_seg):
            if j == i + 1:
                # 相邻段只共享端点：检查是否折返重叠
                a = pts[i + 1] - pts[i]
                b = pts[j + 1] - pts[j]
                cross = a[0] * b[1] - a[1] * b[0]
                if abs(cross) <= 1e-14 * np.linalg.norm(a) * np.linalg.norm(b) and a @ b < 0:
                    return True
                continue
            if segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1]):
                return True
    return False
