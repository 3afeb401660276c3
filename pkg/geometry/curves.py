# -*- coding: utf-8 -*-

"""
光滑闭曲线的参数化、离散化与点位判定。

支持三种曲线：
- circle: 圆 (center, radius)
- ellipse: 椭圆 (center, semi_axes, rotation)
- fourier: 三角多项式参数曲线（风筝形等），coefficients 为每个频率 m 的 (a_m, b_m, c_m, d_m)，
  x(t) = sum a_m cos(mt) + b_m sin(mt), y(t) = sum c_m cos(mt) + d_m sin(mt)。

所有曲线都要求逆时针走向，这样 (y', -x')/|z'| 是外法向。
"""

import functools
import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from core.errors import GeometryError

CURVE_KINDS = ("circle", "ellipse", "fourier")
# 点位判定与距离计算所用的细多边形节点数
POLYGON_NODES = 2048
WINDING_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Placement:
    """刚体放置（含缩放）：z -> scale * R(rotation) z + offset。"""
    offset: Tuple[float, float] = (0.0, 0.0)
    rotation: float = 0.0
    scale: float = 1.0

    def matrix(self) -> np.ndarray:
        c, s = np.cos(self.rotation), np.sin(self.rotation)
        return self.scale * np.array([[c, -s], [s, c]])

    def apply(self, points: np.ndarray) -> np.ndarray:
        return points @ self.matrix().T + np.asarray(self.offset, dtype=float)

    def compose(self, outer: "Placement") -> "Placement":
        """先应用 self，再应用 outer。"""
        offset = outer.apply(np.asarray(self.offset, dtype=float)[None, :])[0]
        return Placement(
            offset=(float(offset[0]), float(offset[1])),
            rotation=self.rotation + outer.rotation,
            scale=self.scale * outer.scale,
        )


@dataclass(frozen=True)
class CurveSpec:
    """光滑 2π 周期闭曲线的描述。"""
    kind: str
    center: Tuple[float, float] = (0.0, 0.0)
    radius: float = 1.0
    semi_axes: Tuple[float, float] = (1.0, 1.0)
    rotation: float = 0.0
    coefficients: Tuple[Tuple[float, float, float, float], ...] = ()
    placement: Placement = field(default_factory=Placement)

    def validate(self):
        """检查形状参数、走向与自交；不合法时抛出 GeometryError。"""
        if self.kind not in CURVE_KINDS:
            raise GeometryError(f"未知曲线类型 '{self.kind}'，可选: {CURVE_KINDS}")
        if self.placement.scale <= 0:
            raise GeometryError("曲线放置的缩放系数必须为正。")
        if self.kind == "circle" and not self.radius > 0:
            raise GeometryError(f"圆的半径必须为正，收到 {self.radius}。")
        if self.kind == "ellipse" and not min(self.semi_axes) > 0:
            raise GeometryError(f"椭圆半轴必须为正，收到 {self.semi_axes}。")
        if self.kind == "fourier":
            if len(self.coefficients) < 2:
                raise GeometryError("fourier 曲线至少需要 m=0 与 m=1 两组系数。")
            if any(len(row) != 4 for row in self.coefficients):
                raise GeometryError("fourier 曲线每组系数必须为 (a_m, b_m, c_m, d_m)。")
        polygon = curve_polygon(self)
        if signed_area(polygon) <= 0:
            raise GeometryError("曲线必须是逆时针走向（带符号面积为正）。")
        if _polygon_self_intersects(polygon):
            raise GeometryError("曲线自交。")

    def placed(self, placement: Placement) -> "CurveSpec":
        """返回叠加了额外刚体放置的新曲线。"""
        return CurveSpec(
            kind=self.kind, center=self.center, radius=self.radius, semi_axes=self.semi_axes,
            rotation=self.rotation, coefficients=self.coefficients,
            placement=self.placement.compose(placement),
        )

    def evaluate(self, t) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """在参数 t 处求 z(t), z'(t), z''(t)，形状均为 (len(t), 2)。"""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        cos_t, sin_t = np.cos(t), np.sin(t)
        if self.kind == "circle":
            z = np.stack([self.radius * cos_t, self.radius * sin_t], axis=-1)
            dz = np.stack([-self.radius * sin_t, self.radius * cos_t], axis=-1)
            d2z = -z
            z = z + np.asarray(self.center, dtype=float)
        elif self.kind == "ellipse":
            a, b = self.semi_axes
            local = np.stack([a * cos_t, b * sin_t], axis=-1)
            dlocal = np.stack([-a * sin_t, b * cos_t], axis=-1)
            rot = Placement(rotation=self.rotation).matrix()
            z = local @ rot.T + np.asarray(self.center, dtype=float)
            dz = dlocal @ rot.T
            d2z = -local @ rot.T
        else:
            z = np.zeros((t.size, 2))
            dz = np.zeros((t.size, 2))
            d2z = np.zeros((t.size, 2))
            for m, (a, b, c, d) in enumerate(self.coefficients):
                cm, sm = np.cos(m * t), np.sin(m * t)
                z[:, 0] += a * cm + b * sm
                z[:, 1] += c * cm + d * sm
                dz[:, 0] += m * (-a * sm + b * cm)
                dz[:, 1] += m * (-c * sm + d * cm)
                d2z[:, 0] += -m * m * (a * cm + b * sm)
                d2z[:, 1] += -m * m * (c * cm + d * sm)
        linear = self.placement.matrix()
        return self.placement.apply(z), dz @ linear.T, d2z @ linear.T

    def contains(self, points) -> np.ndarray:
        """绕数判定：点是否在曲线围成的开区域内。"""
        return winding_number(points, curve_polygon(self)) > 0.5

    @property
    def centroid(self) -> np.ndarray:
        return polygon_centroid(curve_polygon(self))

    @property
    def diameter(self) -> float:
        coarse = curve_polygon(self)[:: POLYGON_NODES // 256]
        gaps = coarse[:, None, :] - coarse[None, :, :]
        return float(np.sqrt((gaps ** 2).sum(axis=-1)).max())


@dataclass
class DiscretizedCurve:
    """等参数间距离散化的曲线：节点、导数、外法向、弧长 Jacobian 与梯形权重。"""
    spec: CurveSpec
    t: np.ndarray
    nodes: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    speed: np.ndarray
    normals: np.ndarray

    @property
    def M(self) -> int:
        return self.t.size

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.M

    @property
    def weights(self) -> np.ndarray:
        """弧长梯形求积权重 |z'(t_j)| * 2π/M。"""
        return self.speed * self.spacing

    @property
    def length(self) -> float:
        return float(self.weights.sum())

    @property
    def curvature_term(self) -> np.ndarray:
        """(x2' x1'' - x1' x2'') / |z'|^2，双层核的对角极限用到。"""
        cross = self.d1[:, 1] * self.d2[:, 0] - self.d1[:, 0] * self.d2[:, 1]
        return cross / self.speed ** 2

    def integrate(self, samples: np.ndarray) -> complex:
        return np.sum(self.weights * samples)


def discretize(spec: CurveSpec, M: int) -> DiscretizedCurve:
    """
    把曲线按参数等距离散为 M 个节点，法向与 Jacobian 解析计算。

    Args:
        spec (CurveSpec): 曲线描述。
        M (int): 节点数，偶数且 >= 16。

    Raises:
        GeometryError: M 不合法或曲线类型未知。
    """
    if M < 16 or M % 2:
        raise GeometryError(f"离散节点数 M 必须为 >= 16 的偶数，收到 {M}。")
    if spec.kind not in CURVE_KINDS:
        raise GeometryError(f"未知曲线类型 '{spec.kind}'。")
    t = 2.0 * np.pi * np.arange(M) / M
    z, dz, d2z = spec.evaluate(t)
    speed = np.hypot(dz[:, 0], dz[:, 1])
    normals = np.stack([dz[:, 1], -dz[:, 0]], axis=-1) / speed[:, None]
    logging.debug(f"曲线 {spec.kind} 离散为 {M} 个节点，周长 {float(np.sum(speed) * 2 * np.pi / M):.6f}")
    return DiscretizedCurve(spec=spec, t=t, nodes=z, d1=dz, d2=d2z, speed=speed, normals=normals)


# -----------------------------------------------------------------------------
# 多边形工具（细离散）
# -----------------------------------------------------------------------------

@functools.lru_cache(maxsize=64)
def curve_polygon(spec: CurveSpec) -> np.ndarray:
    t = 2.0 * np.pi * np.arange(POLYGON_NODES) / POLYGON_NODES
    polygon = spec.evaluate(t)[0]
    polygon.setflags(write=False)
    return polygon


def signed_area(polygon: np.ndarray) -> float:
    x, y = polygon[:, 0], polygon[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_centroid(polygon: np.ndarray) -> np.ndarray:
    x, y = polygon[:, 0], polygon[:, 1]
    cross = x * np.roll(y, -1) - np.roll(x, -1) * y
    area = 0.5 * cross.sum()
    cx = np.sum((x + np.roll(x, -1)) * cross) / (6.0 * area)
    cy = np.sum((y + np.roll(y, -1)) * cross) / (6.0 * area)
    return np.array([cx, cy])


def winding_number(points, polygon: np.ndarray, chunk: int = 1024) -> np.ndarray:
    """点关于闭多边形的绕数（向量化，分块计算以限制内存）。"""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    result = np.empty(pts.shape[0])
    for start in range(0, pts.shape[0], chunk):
        block = pts[start:start + chunk]
        rel = polygon[None, :, :] - block[:, None, :]
        angles = np.arctan2(rel[..., 1], rel[..., 0])
        steps = np.diff(np.concatenate([angles, angles[:, :1]], axis=1), axis=1)
        steps = (steps + np.pi) % (2.0 * np.pi) - np.pi
        total = steps.sum(axis=1) / (2.0 * np.pi)
        total[np.abs(total) < WINDING_TOLERANCE] = 0.0
        result[start:start + chunk] = total
    return result


def distance_to_curve(points, spec: CurveSpec, newton_steps: int = 8) -> Tuple[np.ndarray, np.ndarray]:
    """
    点到光滑曲线的精确距离：先在细多边形上取最近节点，再对 (z(t)-p)·z'(t)=0 做 Newton 修正。

    Returns:
        (distance, t_closest)
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    polygon = curve_polygon(spec)
    h = 2.0 * np.pi / POLYGON_NODES
    t_best = np.empty(pts.shape[0])
    for start in range(0, pts.shape[0], 512):
        block = pts[start:start + 512]
        d2 = ((polygon[None, :, :] - block[:, None, :]) ** 2).sum(axis=-1)
        t_best[start:start + 512] = np.argmin(d2, axis=1) * h
    t = t_best.copy()
    for _ in range(newton_steps):
        z, dz, d2z = spec.evaluate(t)
        rel = z - pts
        g = np.sum(rel * dz, axis=1)
        dg = np.sum(dz * dz, axis=1) + np.sum(rel * d2z, axis=1)
        step = np.where(dg > 0, g / np.where(dg > 0, dg, 1.0), 0.0)
        t = t - np.clip(step, -h, h)
    z = spec.evaluate(t)[0]
    distance = np.hypot(z[:, 0] - pts[:, 0], z[:, 1] - pts[:, 1])
    # Newton 可能停在较远的驻点，取与最近节点距离中的较小者
    z_best = spec.evaluate(t_best)[0]
    node_distance = np.hypot(z_best[:, 0] - pts[:, 0], z_best[:, 1] - pts[:, 1])
    use_node = node_distance < distance
    distance = np.where(use_node, node_distance, distance)
    t = np.where(use_node, t_best, t)
    return distance, np.mod(t, 2.0 * np.pi)


def segments_intersect(p1, p2, q1, q2, tol: float = 1e-14) -> bool:
    """两条闭线段是否相交（含端点接触与共线重叠）。"""
    p1, p2, q1, q2 = (np.asarray(v, dtype=float) for v in (p1, p2, q1, q2))

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def on_segment(a, b, c):
        return (min(a[0], b[0]) - tol <= c[0] <= max(a[0], b[0]) + tol
                and min(a[1], b[1]) - tol <= c[1] <= max(a[1], b[1]) + tol)

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if ((d1 > tol and d2 < -tol) or (d1 < -tol and d2 > tol)) and \
            ((d3 > tol and d4 < -tol) or (d3 < -tol and d4 > tol)):
        return True
    if abs(d1) <= tol and on_segment(q1, q2, p1):
        return True
    if abs(d2) <= tol and on_segment(q1, q2, p2):
        return True
    if abs(d3) <= tol and on_segment(p1, p2, q1):
        return True
    if abs(d4) <= tol and on_segment(p1, p2, q2):
        return True
    return False


def segment_polygon_crossings(a, b, polygon: np.ndarray) -> np.ndarray:
    """线段 ab 与闭多边形各边的真交点参数 s∈(0,1)（沿 ab）。"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = polygon
    q = np.roll(polygon, -1, axis=0)
    r = b - a
    e = q - p
    denom = r[0] * e[:, 1] - r[1] * e[:, 0]
    ap = p - a
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (ap[:, 0] * e[:, 1] - ap[:, 1] * e[:, 0]) / denom
        u = (ap[:, 0] * r[1] - ap[:, 1] * r[0]) / denom
    hit = (np.abs(denom) > 0) & (s > 0) & (s < 1) & (u >= 0) & (u < 1)
    return np.sort(s[hit])


def _polygon_self_intersects(polygon: np.ndarray, sample: int = 256) -> bool:
    coarse = polygon[:: max(1, polygon.shape[0] // sample)]
    n = coarse.shape[0]
    p = coarse
    q = np.roll(coarse, -1, axis=0)
    for i in range(n):
        # 只检查不相邻的边
        j = np.arange(i + 2, n if i > 0 else n - 1)
        if j.size == 0:
            continue
        r = q[i] - p[i]
        e = q[j] - p[j]
        denom = r[0] * e[:, 1] - r[1] * e[:, 0]
        ap = p[j] - p[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (ap[:, 0] * e[:, 1] - ap[:, 1] * e[:, 0]) / denom
            u = (ap[:, 0] * r[1] - ap[:, 1] * r[0]) / denom
        if np.any((np.abs(denom) > 0) & (s >= 0) & (s <= 1) & (u >= 0) & (u <= 1)):
            return True
    return False
