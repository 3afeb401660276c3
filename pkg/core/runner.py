# -*- coding: utf-8 -*-

import dataclasses
import logging
import os
from typing import Dict, List

import numpy as np

from checks.report import CheckThresholds
from checks.suite import run_suite
from core.errors import ConfigError, OracleError, TipTooClose
from core.solver import BoundaryData, DtnSolver, build_solver
from geometry.curves import CurveSpec
from helmholtz.layer_potentials import fft_resample
from helmholtz.oracle import AnnulusProblem, oracle_neumann, solve_modes
from indicator.direct import indicator_direct
from indicator.reconstruct import reconstruct_grid
from indicator.series import indicator_series
from needles.fitting import build_needle_sequence
from utils.file_handler import save_data_to_json, save_lines
from .load_data import RunConfig, config_to_dict, load_scenario_pack
from .process_data import ProbeInputData, process_data
from .store_result import (
    emit_field, emit_fit_report, emit_forward_check, emit_report, emit_series, format_value, write_manifest,
)

# 正问题自检使用的外边界数据 e^{imt}
FORWARD_CHECK_MODES = (0, 1, 2, 3, 5)


def _centered_radius(spec: CurveSpec):
    """以原点为心的圆返回半径，否则返回 None。"""
    if spec.kind != "circle":
        return None
    points = spec.evaluate(np.linspace(0.0, 2.0 * np.pi, 16, endpoint=False))[0]
    r = np.hypot(points[:, 0], points[:, 1])
    return float(r[0]) if np.allclose(r, r[0], rtol=0, atol=1e-12 * r[0]) else None


class ProbeRunner:
    """
    探针法引擎的核心流程执行器。
    按顺序执行：预处理输入、构造正问题求解器、执行所选模式、写出结果与清单。
    """

    def __init__(self, config: RunConfig):
        """
        初始化执行器。
        Args:
            config (RunConfig): 已合并命令行/环境变量覆盖的运行配置。
        """
        self.config = config
        self.out_dir = config.run_config.output_dir
        self.files: List[str] = []
        self.data: ProbeInputData = None
        self.solver: DtnSolver = None
        self._refined: DtnSolver = None
        logging.info("ProbeRunner 已初始化。")

    # --- 各阶段 ---
    def _data_pipeline(self):
        logging.info("=" * 20 + " 1. 预处理输入 " + "=" * 20)
        self.data = process_data(self.config)
        os.makedirs(self.out_dir, exist_ok=True)
        path = os.path.join(self.out_dir, "effective_config.json")
        save_data_to_json(config_to_dict(self.config), path)
        self.files.append(path)

    def _build_solver(self, scene=None, refine: int = 1) -> DtnSolver:
        s = self.config.solver
        return build_solver(scene or self.data.scene, refine * s.M_outer, refine * s.M_obstacle,
                            condition_ceiling=s.condition_ceiling, tip_margin=s.tip_margin, upsample=s.upsample)

    def _initialize_solver(self):
        logging.info("=" * 20 + " 2. 构造正问题求解器 " + "=" * 20)
        self.solver = self._build_solver()

    # --- 各模式 ---
    def _forward_reference(self, f: BoundaryData):
        """同心圆场景返回解析解的 Neumann 迹，其余场景返回两倍分辨率求解器的结果（插值回原节点）。"""
        scene = self.data.scene
        R = _centered_radius(scene.outer)
        radii = [_centered_radius(b) for b in scene.obstacles]
        impedances = [c.impedance for c in scene.components if c.impedance is not None]
        constant = all(lam.is_constant for lam in impedances)
        if R is not None and len(radii) <= 1 and None not in radii and constant:
            try:
                lam = impedances[0].constant if impedances else 1j
                problem = AnnulusProblem(R=R, k=scene.k, rho=radii[0] if radii else None,
                                         bc=scene.boundary_condition, lam=lam)
                return "oracle", oracle_neumann(solve_modes(problem, f), f).samples
            except OracleError as e:
                logging.warning(f"解析参照不可用，改用加密求解器: {e}")
        if self._refined is None:
            self._refined = self._build_solver(refine=2)
        fine = self._refined.outer_curve
        fine_f = BoundaryData(fine, fft_resample(f.samples, fine.M))
        return "refined", fft_resample(self._refined.solve_dirichlet(fine_f).neumann_trace().samples, f.curve.M)

    def _mode_forward_check(self):
        outer = self.solver.outer_curve
        rows = []
        for m in FORWARD_CHECK_MODES:
            f = BoundaryData(outer, np.exp(1j * m * outer.t))
            solution = self.solver.solve_dirichlet(f)
            numeric = solution.neumann_trace().samples
            reference, expected = self._forward_reference(f)
            error = float(np.sqrt(np.sum(outer.weights * np.abs(numeric - expected) ** 2)) /
                          np.sqrt(np.sum(outer.weights * np.abs(expected) ** 2)))
            residual = max(solution.boundary_residual().values())
            rows.append({"case": f"mode_{m}", "reference": reference, "rel_error": error,
                         "max_boundary_residual": residual, "condition": self.solver.condition})
            logging.info(f"正问题自检 e^(i{m}t)：与{reference}参照的相对 L2 误差 {error:.3e}，边界残差 {residual:.3e}。")
        self.files.append(emit_forward_check(rows, os.path.join(self.out_dir, "forward_check.csv")))

    def _needle_sequence(self, strict: bool):
        d = self.data
        return build_needle_sequence(d.tip, d.needle, d.scene.outer, d.scene.k, d.schedule, center=d.options.center,
                                     spacing=d.options.spacing, compact_sets=d.compact_sets, strict=strict,
                                     scene=d.scene)

    def _mode_needle_fit(self):
        seq = self._needle_sequence(strict=True)
        self.files.append(emit_fit_report(seq, os.path.join(self.out_dir, "fit_report.csv")))

    def _mode_indicator_series(self):
        seq = self._needle_sequence(strict=False)
        series = indicator_series(self.solver, seq, truth_known=True, formulation=self.data.options.formulation)
        self.files.append(emit_series(series, os.path.join(self.out_dir, "series.csv")))
        self.files.append(emit_fit_report(seq, os.path.join(self.out_dir, "fit_report.csv")))
        lines = [f"tip = {format_value(float(d))}" for d in self.data.tip]
        lines.append(f"truncated = {format_value(seq.truncated)}")
        breakdown = None
        if self.data.scene.in_domain(self.data.tip[None, :])[0]:
            try:
                breakdown = indicator_direct(self.solver, self.data.tip, method=self.config.indicator.method)
            except TipTooClose as e:
                logging.warning(f"针尖离障碍物太近，跳过 I(x) 的直接计算: {e}")
        if breakdown is not None:
            lines += [f"I_direct = {format_value(breakdown.value)}",
                      f"energy_green = {format_value(breakdown.energy_green)}",
                      f"energy_reflected = {format_value(breakdown.energy_reflected)}"]
            lines += [f"{k} = {format_value(v)}" for k, v in sorted(breakdown.impedance_terms.items())]
        path = os.path.join(self.out_dir, "series_summary.txt")
        save_lines(lines, path)
        self.files.append(path)

    def _mode_field(self, mode: str):
        d = self.data
        field = reconstruct_grid(self.solver, d.grid, mode=mode, policy=d.policy, options=d.options,
                                 threads=self.config.run_config.threads,
                                 front_threshold=self.config.indicator.front_threshold)
        self.files += emit_field(field, self.out_dir, prefix=mode.replace("_", "-"))

    def _mode_verify_suite(self):
        verify = self.config.verify
        thresholds = CheckThresholds(**dataclasses.asdict(verify.thresholds))
        scenarios = []
        for path in verify.scenarios:
            # 配置中的阈值作用于所有场景；运行种子叠加在场景种子上
            scenarios += [dataclasses.replace(s, thresholds=thresholds, seed=s.seed + self.config.run_config.seed)
                          for s in load_scenario_pack(path)]
        reports = run_suite(scenarios, threads=self.config.run_config.threads, checks=verify.checks)
        self.files += emit_report(reports, self.out_dir)

    # --- 模式映射表 ---
    # key: run_config.mode
    # value: (是否需要场景求解器, 执行函数)
    @property
    def mode_map(self) -> Dict[str, tuple]:
        return {
            "forward-check": (True, self._mode_forward_check),
            "needle-fit": (False, self._mode_needle_fit),
            "indicator-series": (True, self._mode_indicator_series),
            "side-a-field": (True, lambda: self._mode_field("side_a")),
            "side-b-field": (True, lambda: self._mode_field("side_b")),
            "verify-suite": (False, self._mode_verify_suite),
        }

    def run(self):
        """
        执行端到端流程。错误向上抛出，由 main.py 映射为退出码。
        """
        mode = self.config.run_config.mode
        if mode not in self.mode_map:
            raise ConfigError(f"未知模式 {mode!r}。", "run_config.mode")
        logging.info(f"探针法引擎开始执行，模式 {mode}。")
        needs_solver, action = self.mode_map[mode]

        # --- 1. 预处理输入 ---
        self._data_pipeline()

        # --- 2. 正问题求解器 ---
        if needs_solver:
            self._initialize_solver()

        # --- 3. 执行模式 ---
        logging.info("=" * 20 + f" 3. 执行模式 {mode} " + "=" * 20)
        action()

        # --- 4. 清单 ---
        logging.info("=" * 20 + " 4. 写出清单 " + "=" * 20)
        write_manifest(self.out_dir, self.files)
        logging.info("执行完毕。")
