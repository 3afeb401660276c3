# -*- coding: utf-8 -*-

import enum
import logging
from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np


class DivergenceStatus(enum.Enum):
    DIVERGING_POS = "Diverging+"
    DIVERGING_NEG = "Diverging-"
    CONVERGED = "Converged"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class DivergenceThresholds:
    """有限前缀上收敛/发散二分的阈值；a_min 为 0 表示不设幅值门槛。"""
    window: int = 3
    tau_rel: float = 0.02
    g_min: float = 1.3
    a_min: float = 0.0


def growth_statistics(series: Sequence[float], window: int) -> Dict[str, float]:
    """最后一个窗口内的总变差、单调性与几何增长比（log|I_n| 线性拟合斜率的指数）。"""
    values = np.asarray(series, dtype=float)
    tail = values[-window:]
    steps = np.diff(tail)
    stats = {
        "last": float(tail[-1]),
        "total_variation": float(np.sum(np.abs(steps))),
        "increasing": bool(np.all(steps > 0)),
        "decreasing": bool(np.all(steps < 0)),
        "growth_ratio": float("nan"),
    }
    if np.all(tail != 0) and window >= 2:
        slope = np.polyfit(np.arange(window, dtype=float), np.log(np.abs(tail)), 1)[0]
        stats["growth_ratio"] = float(np.exp(slope))
    return stats


def detect_divergence(series: Sequence[float], window: int, tau_rel: float = 0.02, g_min: float = 1.3,
                      a_min: float = 0.0) -> DivergenceStatus:
    """
    判定有限序列的趋势。

    - Converged: 最后 window 项的总变差 <= tau_rel·(1 + |末项|)
    - Diverging±: 最后 window 项严格单调、几何增长比 >= g_min 且 |末项| >= a_min，符号由末项决定
    - 其余为 Inconclusive（序列长度不足 2·window 时也是 Inconclusive）
    """
    if len(series) < 2 * window or window < 2:
        logging.warning(f"序列长度 {len(series)} 不足两个窗口 (window={window})，无法判定趋势。")
        return DivergenceStatus.INCONCLUSIVE
    stats = growth_statistics(series, window)
    last = stats["last"]
    if stats["total_variation"] <= tau_rel * (1.0 + abs(last)):
        return DivergenceStatus.CONVERGED
    growing = np.isfinite(stats["growth_ratio"]) and stats["growth_ratio"] >= g_min and abs(last) >= a_min
    if growing and stats["increasing"] and last > 0:
        return DivergenceStatus.DIVERGING_POS
    if growing and stats["decreasing"] and last < 0:
        return DivergenceStatus.DIVERGING_NEG
    return DivergenceStatus.INCONCLUSIVE
