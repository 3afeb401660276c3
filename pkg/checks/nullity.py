# -*- coding: utf-8 -*-

import numpy as np

from core.errors import CheckError
from indicator.direct import indicator_direct
from .context import ScenarioContext
from .report import TheoremReport


def check_obstacle_free_nullity(ctx: ScenarioContext) -> TheoremReport:
    """无障碍物时 Λ_D = Λ_0，每个探测点的 |I_n| <= nullity·(1 + |∫ ∂v_n/∂ν conj(v_n)|)，且 I(x) = 0。"""
    if not ctx.scene.is_empty:
        raise CheckError(f"场景 {ctx.scenario.name} 有障碍物，不适用零指示检查。")
    tolerance = ctx.scenario.thresholds.nullity
    worst = 0.0
    table = []
    for probe in ctx.scenario.probes:
        series = ctx.series(probe)
        for n, (value, pairing) in enumerate(zip(series.values, series.pairings)):
            scaled = abs(value) / (1.0 + abs(pairing))
            worst = max(worst, scaled)
            table.append({"probe": probe.name, "n": n, "I_n": value, "scaled": scaled})
        worst = max(worst, abs(indicator_direct(ctx.solver, probe.tip).value))
    return TheoremReport.from_verdict("obstacle_free_nullity", ctx.scenario.name, {"max_scaled": worst,
                                      "probes": len(ctx.scenario.probes)}, {"nullity": tolerance},
                                      bool(np.isfinite(worst) and worst <= tolerance), "",
                                      {"obstacle_free_nullity": table})
