# -*- coding: utf-8 -*-

import numpy as np
import pytest

from checks.blowup import check_ratio_decay_series, growth_report
from checks.context import ScenarioContext
from checks.energy_identity import check_energy_identity, energy_identity_sides, random_entire
from checks.lower_bound import fit_lower_bound
from checks.report import (
    STATUS_ERROR, STATUS_FAIL, STATUS_PASS, STATUS_PREMISE, CheckThresholds, Probe, Scenario, TheoremReport,
)
from checks.suite import CHECK_MAP, _run_item, run_scenario, run_suite
from core.errors import CheckError, DegenerateRegression, PremiseNotRealized
from tests.conftest import empty_scene

GRAD = [1.0, 4.0, 9.0, 16.0, 25.0, 36.0]
L2 = [1.0, 1.0, 2.0, 3.0, 5.0, 8.0]


# -----------------------------------------------------------------------------
# 比值衰减与增长
# -----------------------------------------------------------------------------

def test_ratio_decay_passes_on_growing_series():
    report = check_ratio_decay_series([1, 2, 4, 8, 16], [1, 1.2, 1.5, 1.9, 2.4])
    assert report.status == STATUS_PASS
    assert report.statistics["growth"] == pytest.approx(16.0)
    assert report.statistics["decay"] == pytest.approx(0.15)
    assert len(report.tables["ratio_decay"]) == 5


def test_ratio_decay_fails_when_ratio_stalls():
    report = check_ratio_decay_series([1, 2, 4, 8, 16], [1, 2, 4, 8, 16])
    assert report.status == STATUS_FAIL
    assert not report.passed


def test_ratio_decay_premise_not_realized():
    with pytest.raises(PremiseNotRealized) as info:
        check_ratio_decay_series([3, 3, 3, 3, 3], [1, 1, 1, 1, 1])
    assert info.value.growth == pytest.approx(1.0)
    assert info.value.required == 10.0


def test_growth_report_tail_requirement():
    h1 = np.array([1.0, 2.0, 4.0, 8.0, 30.0, 20.0])
    assert not growth_report("ball_blowup", "s", "p", h1, CheckThresholds()).passed
    assert growth_report("obstacle_energy_blowup", "s", "p", h1, CheckThresholds(), monotone_tail=False).passed
    steady = growth_report("ball_blowup", "s", "p", np.array([1.0, 2.0, 4.0, 8.0, 16.0, 32.0]), CheckThresholds())
    assert steady.status == STATUS_PASS
    assert steady.statistics["final"] == 32.0


# -----------------------------------------------------------------------------
# 下界拟合
# -----------------------------------------------------------------------------

def test_fit_lower_bound_recovers_constants():
    values = [2 * g - 3 * l for g, l in zip(GRAD, L2)]
    bound = fit_lower_bound(values, GRAD, L2, "impedance")
    assert bound.c1 == pytest.approx(2.0)
    assert bound.c2 == pytest.approx(-3.0)
    assert bound.rank == 2
    assert bound.residual < 1e-9
    assert bound.consistent
    assert not fit_lower_bound(values, GRAD, L2, "sound_soft").consistent


def test_fit_lower_bound_degenerate_design():
    with pytest.raises(DegenerateRegression):
        fit_lower_bound([1, 2, 3, 4, 5, 6], GRAD, [2 * g for g in GRAD], "impedance")


# -----------------------------------------------------------------------------
# 能量恒等式
# -----------------------------------------------------------------------------

def test_identity_without_obstacles(empty_solver, rng):
    v = random_entire((0.0, 0.0), 2.0, 6, rng)
    sides = energy_identity_sides(empty_solver, v)
    assert sides.rhs == 0
    assert sides.gap <= 1e-8
    assert check_energy_identity(empty_solver, v).passed


def test_identity_on_sound_soft_scene(sound_soft_solver, rng):
    v = random_entire((0.0, 0.0), 2.0, 6, rng)
    report = check_energy_identity(sound_soft_solver, v, "concentric")
    assert report.statistics["gap"] <= 1e-3
    assert report.status == STATUS_PASS
    # 恒等式两侧的实部就是 I_n
    assert report.statistics["lhs_real"] == pytest.approx(report.statistics["rhs_real"], rel=1e-3)


def test_identity_rejects_impedance_scene(impedance_solver, rng):
    with pytest.raises(CheckError):
        energy_identity_sides(impedance_solver, random_entire((0.0, 0.0), 2.0, 4, rng))


# -----------------------------------------------------------------------------
# 套件
# -----------------------------------------------------------------------------

def small_empty_scenario(name="empty", probes=()):
    return Scenario(name=name, scene=empty_scene(), M_outer=128, M_obstacle=16, probes=probes)


def test_run_item_maps_outcomes_to_statuses():
    ctx = ScenarioContext(small_empty_scenario())

    def premise():
        raise PremiseNotRealized(2.0, 10.0)

    def broken():
        raise ValueError("boom")

    def fine():
        return TheoremReport.from_verdict("x", "empty", {"a": 1.0}, {"b": 2.0}, True)

    premise_report = _run_item("x", ctx, "p", premise)
    assert premise_report.status == STATUS_PREMISE
    assert premise_report.statistics == {"growth": 2.0}
    assert not premise_report.passed
    error_report = _run_item("x", ctx, "p", broken)
    assert error_report.status == STATUS_ERROR
    assert error_report.message == "boom"
    assert _run_item("x", ctx, "", fine).status == STATUS_PASS


def test_run_scenario_on_empty_scene():
    reports = run_scenario(small_empty_scenario(), checks=["energy_identity", "ratio_decay", "no_such_check"])
    assert [r.check_id for r in reports] == ["energy_identity", "ratio_decay"]
    assert reports[0].status == STATUS_PASS
    assert reports[1].status == STATUS_PREMISE


def test_blowup_checks_need_obstacles():
    scenario = small_empty_scenario(probes=(Probe("off_center", (0.3, 0.2)),))
    blowups = ["cone_blowup", "ball_blowup", "obstacle_energy_blowup", "ratio_decay", "boundary_blowup"]
    reports = run_scenario(scenario, checks=blowups)
    assert [r.check_id for r in reports] == blowups
    assert all(r.status == STATUS_PREMISE for r in reports)
    assert not any(r.passed for r in reports)


def test_run_suite_orders_by_scenario_name():
    scenarios = [small_empty_scenario("zeta"), small_empty_scenario("alpha")]
    reports = run_suite(scenarios, threads=2, checks=["boundary_blowup"])
    assert [r.scenario for r in reports] == ["alpha", "zeta"]
    assert all(r.status == STATUS_PREMISE for r in reports)


def test_check_map_names():
    assert set(CHECK_MAP) == {
        "ratio_decay", "cone_blowup", "ball_blowup", "obstacle_energy_blowup", "side_a_convergence",
        "side_a_boundedness", "boundary_blowup", "divergence", "energy_identity", "lower_bound_fit",
        "obstacle_free_nullity",
    }
