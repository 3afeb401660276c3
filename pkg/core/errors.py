# -*- coding: utf-8 -*-

"""
探针法引擎的异常层级。

所有引擎内部抛出的异常都继承自 ProbeError，CLI 根据异常类别映射退出码。
带有数值统计量的异常会把该统计量作为属性附带，方便上层记录日志或写入报告。
"""

from typing import Optional


class ProbeError(Exception):
    """探针法引擎所有异常的基类。"""


# -----------------------------------------------------------------------------
# 1. 配置与几何
# -----------------------------------------------------------------------------

class ConfigError(ProbeError):
    """配置文件错误：未知键、非法取值、文件缺失或 JSON 格式无效。"""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field:
            message = f"[{field}] {message}"
        super().__init__(message)


class GeometryError(ProbeError):
    """几何输入不合法：曲线、障碍物布局或针（needle）违反不变量。"""

    def __init__(self, violation: str):
        self.violation = violation
        super().__init__(violation)


class SpecialFunctionError(ProbeError, ValueError):
    """特殊函数的自变量超出定义域（例如 Y 在 x<=0 处，或 Green 函数 z=x）。"""


# -----------------------------------------------------------------------------
# 2. 正问题求解
# -----------------------------------------------------------------------------

class SolverError(ProbeError):
    """边界积分正问题求解相关错误的基类。"""


class IllConditioned(SolverError):
    """离散系统条件数超过上限（接近内部特征值或分辨率不足）。"""

    def __init__(self, condition: float, ceiling: float):
        self.condition = condition
        self.ceiling = ceiling
        super().__init__(
            f"离散系统条件数估计 {condition:.3e} 超过上限 {ceiling:.3e}。"
            f"请检查 k^2 是否接近 Dirichlet 特征值，或提高 M_outer / M_obstacle。"
        )


class TipTooClose(SolverError):
    """探针尖端距离障碍物过近，Green 函数边界数据近奇异。"""

    def __init__(self, distance: float, margin: float):
        self.distance = distance
        self.margin = margin
        super().__init__(f"点到障碍物的距离 {distance:.3e} 小于配置的安全距离 {margin:.3e}。")


class PointOutsideDomain(SolverError):
    """场求值点不在 Ω∖D̄ 内（表示公式在该处无效）。"""


# -----------------------------------------------------------------------------
# 3. 针序列构造
# -----------------------------------------------------------------------------

class ScheduleError(ProbeError):
    """针序列构造相关错误的基类。"""


class RankDeficient(ScheduleError):
    """匹配点云过小，最小二乘系统欠定。"""


class ScheduleTooAggressive(ScheduleError):
    """拟合残差或系数范数失控，调度参数超出当前阶数 M_n 的能力。"""

    def __init__(self, message: str, step: int):
        self.step = step
        super().__init__(f"第 {step} 步: {message}")


# -----------------------------------------------------------------------------
# 4. 解析解与定理校验
# -----------------------------------------------------------------------------

class OracleError(ProbeError):
    """解析解（同心圆环级数）相关错误的基类。"""


class ModeResonance(OracleError):
    """某个 Fourier 模态的 2x2 系统奇异。"""

    def __init__(self, mode: int):
        self.mode = mode
        super().__init__(f"模态 m={mode} 的 2x2 系统奇异（共振）。")


class TailTooLarge(OracleError):
    """边界数据不是有限模态的，谱尾能量超过阈值。"""

    def __init__(self, tail: float, limit: float):
        self.tail = tail
        super().__init__(f"边界数据的谱尾相对能量 {tail:.3e} 超过阈值 {limit:.3e}。")


class CheckError(ProbeError):
    """定理校验相关错误的基类。"""


class PremiseNotRealized(CheckError):
    """校验的前提（梯度能量增长 >= 阈值倍数）在当前调度前缀内未实现。"""

    def __init__(self, growth: float, required: float):
        self.growth = growth
        self.required = required
        super().__init__(f"梯度能量增长倍数 {growth:.3g} 小于要求的 {required:.3g}，前提未实现。")


class DegenerateRegression(CheckError):
    """下界回归的设计矩阵秩亏。"""
