# -*- coding: utf-8 -*-

from dataclasses import dataclass
from typing import List

from core.errors import ConfigError


@dataclass(frozen=True)
class ScheduleStep:
    """第 n 个针元素的参数：管半径 ε_n、展开阶 M_n、正则化参数 α_n。"""
    n: int
    eps: float
    M: int
    alpha: float


def default_schedule(n_max: int = 10, eps0: float = 0.4, q: float = 0.7, M0: int = 8, M_step: int = 4,
                     alpha0: float = 1e-6, alpha_ratio: float = 0.5) -> List[ScheduleStep]:
    """
    几何调度：ε_n = ε0 qⁿ，M_n = M0 + n·M_step，α_n = α0·α_ratioⁿ，n = 0..n_max-1。

    Raises:
        ConfigError: 参数不满足 n_max >= 4、各参数为正、q < 1、α_ratio < 1。
    """
    if n_max < 4:
        raise ConfigError(f"调度长度 n_max 至少为 4，收到 {n_max}。", "needle_schedule.n_max")
    checks = {"eps0": eps0, "q": q, "M0": M0, "M_step": M_step, "alpha0": alpha0, "alpha_ratio": alpha_ratio}
    for name, value in checks.items():
        if not value > 0:
            raise ConfigError(f"调度参数 {name} 必须为正，收到 {value}。", f"needle_schedule.{name}")
    if q >= 1:
        raise ConfigError(f"几何比 q 必须小于 1，收到 {q}。", "needle_schedule.q")
    if alpha_ratio >= 1:
        raise ConfigError(f"α_ratio 必须小于 1，收到 {alpha_ratio}。", "needle_schedule.alpha_ratio")
    return [ScheduleStep(n=n, eps=eps0 * q ** n, M=int(M0 + n * M_step), alpha=alpha0 * alpha_ratio ** n)
            for n in range(n_max)]
