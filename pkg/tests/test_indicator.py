# -*- coding: utf-8 -*-

import os
from types import SimpleNamespace

import numpy as np
import pytest
import scipy.integrate as si
import scipy.special as sp

from core.errors import GeometryError, SolverError, TipTooClose
from core.store_result import emit_field
from geometry.needle import NeedleSpec, validate_needle
from indicator.classify import NeedlePolicy, ProbeOptions, classify_point
from indicator.direct import indicator_direct
from indicator.divergence import DivergenceStatus, detect_divergence, growth_statistics
from indicator.reconstruct import (
    STATUS_CONVERGED, STATUS_DIVERGED_NEG, STATUS_DIVERGED_POS, STATUS_REJECTED, GridSpec, _scan_point, marching_squares,
    reconstruct_grid,
)
from indicator.series import indicator_series, indicator_term
from needles.entire import EntireSolution
from needles.fitting import FitReport, NeedleSequence
from tests.conftest import RHO, UNIT_DISK, two_disk_scene


def random_entire(rng, k=2.0, order=4, center=(0.0, 0.0)):
    size = 2 * order + 1
    return EntireSolution(center, k, rng.normal(size=size) + 1j * rng.normal(size=size))


def fake_sequence(elements):
    reports = [FitReport(n=n, eps=0.4 * 0.7 ** n, M=v.order, alpha=1e-6, residual=1e-3, coef_norm=1.0,
                         normalized_norm=1.0, cloud_size=100) for n, v in enumerate(elements)]
    needle = NeedleSpec(((0.0, 1.0), (0.1, 0.65)))
    return NeedleSequence(x=(0.1, 0.65), needle=needle, schedule=[], elements=list(elements), reports=reports)


# -----------------------------------------------------------------------------
# 趋势判定
# -----------------------------------------------------------------------------

@pytest.mark.parametrize("series, expected", [
    ([1.0, 1.001, 1.0005, 1.0004, 1.0003, 1.0002], DivergenceStatus.CONVERGED),
    ([1.0, 2.0, 4.0, 8.0, 16.0, 32.0], DivergenceStatus.DIVERGING_POS),
    ([-1.0, -2.0, -4.0, -8.0, -16.0, -32.0], DivergenceStatus.DIVERGING_NEG),
    ([1.0, -2.0, 3.0, -4.0, 5.0, -6.0], DivergenceStatus.INCONCLUSIVE),
    ([1.0, 2.0, 4.0, 8.0, 16.0], DivergenceStatus.INCONCLUSIVE),
    # 单调但增长太慢
    ([1.0, 1.1, 1.2, 1.3, 1.4, 1.5], DivergenceStatus.INCONCLUSIVE),
])
def test_detect_divergence(series, expected):
    assert detect_divergence(series, window=3) is expected


def test_amplitude_floor_blocks_small_growth():
    series = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
    assert detect_divergence(series, 3, a_min=100.0) is DivergenceStatus.INCONCLUSIVE
    assert detect_divergence(series, 3, a_min=10.0) is DivergenceStatus.DIVERGING_POS


def test_growth_statistics():
    stats = growth_statistics([1.0, 2.0, 4.0, 8.0], 3)
    assert stats["last"] == 8.0
    assert stats["total_variation"] == pytest.approx(6.0)
    assert stats["increasing"] and not stats["decreasing"]
    assert stats["growth_ratio"] == pytest.approx(2.0)


# -----------------------------------------------------------------------------
# 等值线
# -----------------------------------------------------------------------------

def test_marching_squares_on_disk_mask():
    xs = np.linspace(-1.0, 1.0, 41)
    ys = np.linspace(-1.0, 1.0, 41)
    h = xs[1] - xs[0]
    gx, gy = np.meshgrid(xs, ys)
    mask = (np.hypot(gx, gy) < 0.5).astype(float)
    contours = marching_squares(mask, xs, ys)
    assert len(contours) == 1
    line = contours[0]
    np.testing.assert_allclose(line[0], line[-1])
    assert np.all(np.abs(np.hypot(line[:, 0], line[:, 1]) - 0.5) <= h)


def test_marching_squares_open_line():
    xs = np.linspace(0.0, 1.0, 5)
    ys = np.linspace(0.0, 1.0, 5)
    gx, _ = np.meshgrid(xs, ys)
    contours = marching_squares((gx > 0.6).astype(float), xs, ys)
    assert len(contours) == 1
    np.testing.assert_allclose(contours[0][:, 0], 0.625)
    assert {contours[0][0][1], contours[0][-1][1]} == {0.0, 1.0}


def test_grid_points_are_row_major():
    grid = GridSpec(0.0, 0.1, 0.0, 0.1, 0.1)
    np.testing.assert_allclose(grid.points(), [[0.0, 0.0], [0.1, 0.0], [0.0, 0.1], [0.1, 0.1]])


# -----------------------------------------------------------------------------
# 指示项
# -----------------------------------------------------------------------------

def test_indicator_vanishes_without_obstacles(empty_solver, rng):
    for _ in range(3):
        term = indicator_term(empty_solver, random_entire(rng))
        assert abs(term.value) <= 1e-8 * (1 + abs(term.pairing))


@pytest.mark.parametrize("bc", ["impedance", "sound_soft"])
def test_direct_and_scattered_forms_agree(bc, impedance_solver, sound_soft_solver, rng):
    solver = impedance_solver if bc == "impedance" else sound_soft_solver
    v = random_entire(rng)
    direct = indicator_term(solver, v, "direct")
    scattered = indicator_term(solver, v, "scattered")
    assert direct.pairing == pytest.approx(scattered.pairing)
    assert direct.value == pytest.approx(scattered.value, abs=1e-6 * (1 + abs(direct.pairing)))


def test_wavenumber_mismatch_is_rejected(impedance_solver, rng):
    with pytest.raises(SolverError):
        indicator_term(impedance_solver, random_entire(rng, k=3.0))


def test_series_companions_match_disk_energy(impedance_solver):
    k = 2.0
    v = EntireSolution.single_mode((0.0, 0.0), k, 0)
    series = indicator_series(impedance_solver, fake_sequence([v, v.scaled(2.0)]))
    # ∫_D |∇J_0(kr)|² = 2π ∫_0^ρ k² J_1(kr)² r dr
    expected, _ = si.quad(lambda r: 2 * np.pi * k ** 2 * sp.j1(k * r) ** 2 * r, 0, RHO, epsabs=1e-14)
    assert series.grad_energy_D[0] == pytest.approx(expected, rel=1e-8)
    assert series.grad_energy_D[1] == pytest.approx(4 * expected, rel=1e-8)
    assert series.component_energy[1][0] == pytest.approx(expected, rel=1e-8)
    assert series.ratio[0] == pytest.approx(series.ratio[1])
    assert list(series.rows()[0]) == ["n", "I_n", "grad_energy_D", "ratio", "residual", "boundary_ratio",
                                      "grad_energy_D_1", "ratio_D_1"]


def test_series_without_truth_omits_companions(impedance_solver):
    v = EntireSolution.single_mode((0.0, 0.0), 2.0, 1)
    series = indicator_series(impedance_solver, fake_sequence([v]), truth_known=False)
    assert not series.has_companions
    assert list(series.rows()[0]) == ["n", "I_n", "residual"]


def test_indicator_direct_edge_cases(impedance_solver, empty_solver):
    assert indicator_direct(empty_solver, np.array([0.2, 0.3])).value == 0.0
    with pytest.raises(TipTooClose):
        indicator_direct(impedance_solver, np.array([0.405, 0.0]))
    with pytest.raises(ValueError):
        indicator_direct(impedance_solver, np.array([0.1, 0.65]), method="volume")


@pytest.mark.slow
@pytest.mark.parametrize("bc", ["impedance", "sound_soft"])
def test_indicator_direct_boundary_and_area_agree(bc, impedance_solver, sound_soft_solver):
    solver = impedance_solver if bc == "impedance" else sound_soft_solver
    x = np.array([0.1, 0.65])
    boundary = indicator_direct(solver, x, method="boundary")
    area = indicator_direct(solver, x, method="area")
    assert area.energy_green == pytest.approx(boundary.energy_green, rel=1e-3)
    assert area.value == pytest.approx(boundary.value, rel=1e-3, abs=1e-6)


# -----------------------------------------------------------------------------
# 分类与网格
# -----------------------------------------------------------------------------

def test_classify_point_outside_domain(impedance_solver):
    with pytest.raises(GeometryError):
        classify_point(impedance_solver, np.array([1.5, 0.0]))


def test_needle_policy_keeps_matching_detours():
    detour = NeedleSpec(((0.0, 1.0), (0.0, 0.75), (0.5, 0.5)))
    other = NeedleSpec(((0.0, 1.0), (0.2, 0.5)))
    chosen = NeedlePolicy(detours=(detour, other)).needles(UNIT_DISK, np.array([0.5, 0.5]))
    assert [name for name, _ in chosen] == ["straight", "detour_0"]
    straight = chosen[0][1]
    np.testing.assert_allclose(straight.start, np.array([1.0, 1.0]) / np.sqrt(2.0), atol=1e-9)


def test_grid_outside_domain_is_rejected(impedance_solver):
    field = reconstruct_grid(impedance_solver, GridSpec(1.1, 1.2, 1.1, 1.2, 0.1), mode="side_a")
    assert field.statuses == [STATUS_REJECTED] * 4
    assert not field.mask.any()
    assert field.contours == []
    assert np.all(np.isnan(field.value_matrix()))


def test_scan_rejects_grazing_straight_needle():
    # x = (0.1, 0) 的直线针 (1,0)→(0.1,0) 与第二个圆相切；扫描在构造针序列之前就拒绝该点
    solver = SimpleNamespace(scene=two_disk_scene())
    x = np.array([0.1, 0.0])
    for mode in ("side_a", "side_b"):
        result = _scan_point(solver, x, mode, NeedlePolicy(), ProbeOptions(), margin=0.02)
        assert result.status == STATUS_REJECTED
        assert np.isnan(result.value)


def test_valid_detour_replaces_grazing_straight_needle():
    solver = SimpleNamespace(scene=two_disk_scene())
    detour = NeedleSpec(((0.0, 1.0), (0.1, 0.0)))
    policy = NeedlePolicy(detours=(detour,))
    chosen = [name for name, needle in policy.needles(UNIT_DISK, np.array([0.1, 0.0]))
              if validate_needle(needle, UNIT_DISK, solver.scene).ok]
    assert chosen == ["detour_0"]


# -----------------------------------------------------------------------------
# 同心圆场景上的真实扫描
# -----------------------------------------------------------------------------

SCAN_GRID = GridSpec(-0.5, 0.5, -0.5, 0.5, 0.25)


@pytest.fixture(scope="module")
def side_b_field(impedance_solver):
    return reconstruct_grid(impedance_solver, SCAN_GRID, mode="side_b", threads=4)


@pytest.mark.slow
def test_side_b_scan_separates_disk(side_b_field):
    field = side_b_field
    radii = np.hypot(field.points[:, 0], field.points[:, 1])
    statuses = np.array(field.statuses)
    inside = radii < RHO - 0.1
    outside = radii > RHO + 0.05
    diverged = np.isin(statuses, (STATUS_DIVERGED_POS, STATUS_DIVERGED_NEG))
    assert diverged[np.argmin(radii)]
    assert np.all(statuses[outside] == STATUS_CONVERGED)
    assert np.sum(diverged[inside]) >= 4

    # 第二遍的幅值下限取 10 × 高置信度收敛点 |I| 的中位数
    converged = [abs(v) for v, s, c in zip(field.values, field.statuses, field.confidence)
                 if s == STATUS_CONVERGED and c == "high" and np.isfinite(v)]
    assert converged
    assert field.thresholds["a_min"] == pytest.approx(10.0 * np.median(converged))

    assert field.contours
    vertices = np.concatenate(field.contours)
    mean_radius = np.mean(np.hypot(vertices[:, 0], vertices[:, 1]))
    assert abs(mean_radius - RHO) < 0.6 * SCAN_GRID.h


@pytest.mark.slow
def test_scan_output_does_not_depend_on_thread_count(side_b_field, impedance_solver, tmp_path):
    single = reconstruct_grid(impedance_solver, SCAN_GRID, mode="side_b", threads=1)
    first = emit_field(side_b_field, str(tmp_path / "threads4"), prefix="side-b")
    second = emit_field(single, str(tmp_path / "threads1"), prefix="side-b")
    assert [os.path.basename(p) for p in first] == [os.path.basename(p) for p in second]
    for a, b in zip(first, second):
        with open(a, "rb") as fa, open(b, "rb") as fb:
            assert fa.read() == fb.read(), os.path.basename(a)
