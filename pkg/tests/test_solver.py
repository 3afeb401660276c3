# -*- coding: utf-8 -*-

import numpy as np
import pytest
import scipy.special as sp

from core.errors import IllConditioned, PointOutsideDomain, SolverError, TipTooClose
from core.solver import BoundaryData, build_solver, dtn_background
from geometry.area import StarRegion, area_quadrature
from geometry.curves import discretize
from helmholtz.oracle import AnnulusProblem, oracle_field, oracle_neumann, oracle_reflected, solve_modes
from needles.entire import EntireSolution, eval_entire, normal_derivative, trace
from tests.conftest import LAMBDA, RHO, UNIT_DISK, concentric_scene


def outer_mode(solver, m):
    outer = solver.outer_curve
    return BoundaryData(outer, np.exp(1j * m * outer.t))


def relative_l2(curve, numeric, expected):
    return np.sqrt(np.sum(curve.weights * np.abs(numeric - expected) ** 2)) / \
        np.sqrt(np.sum(curve.weights * np.abs(expected) ** 2))


# -----------------------------------------------------------------------------
# 与解析解比较
# -----------------------------------------------------------------------------

@pytest.mark.parametrize("m", [0, 1, 2, 3])
@pytest.mark.parametrize("bc", ["impedance", "sound_soft"])
def test_neumann_trace_matches_oracle(bc, m, impedance_solver, sound_soft_solver):
    solver = impedance_solver if bc == "impedance" else sound_soft_solver
    f = outer_mode(solver, m)
    numeric = solver.solve_dirichlet(f).neumann_trace().samples
    problem = AnnulusProblem(R=1.0, k=2.0, rho=RHO, bc=bc, lam=LAMBDA)
    expected = oracle_neumann(solve_modes(problem, f), f).samples
    assert relative_l2(f.curve, numeric, expected) <= 1e-6


@pytest.mark.parametrize("bc", ["impedance", "sound_soft"])
def test_interior_field_matches_oracle(bc, impedance_solver, sound_soft_solver):
    solver = impedance_solver if bc == "impedance" else sound_soft_solver
    f = outer_mode(solver, 2)
    angles = np.linspace(0, 2 * np.pi, 7, endpoint=False)
    points = np.concatenate([r * np.stack([np.cos(angles), np.sin(angles)], axis=-1) for r in (0.55, 0.7, 0.85)])
    value, gradient = solver.solve_dirichlet(f).evaluate(points)
    problem = AnnulusProblem(R=1.0, k=2.0, rho=RHO, bc=bc, lam=LAMBDA)
    expected_value, expected_gradient = oracle_field(solve_modes(problem, f), points)
    np.testing.assert_allclose(value, expected_value, atol=1e-7)
    np.testing.assert_allclose(gradient, expected_gradient, atol=1e-6)


@pytest.mark.parametrize("bc", ["impedance", "sound_soft"])
def test_reflected_solution_matches_oracle(bc, impedance_solver, sound_soft_solver):
    solver = impedance_solver if bc == "impedance" else sound_soft_solver
    x = np.array([0.1, 0.65])
    angles = np.linspace(0, 2 * np.pi, 9, endpoint=False)
    points = 0.8 * np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    value, _ = solver.solve_reflected(x).evaluate(points)
    problem = AnnulusProblem(R=1.0, k=2.0, rho=RHO, bc=bc, lam=LAMBDA)
    expected, _ = oracle_field(oracle_reflected(problem, x), points)
    np.testing.assert_allclose(value, expected, atol=1e-7 * max(1.0, np.max(np.abs(expected))))


def test_boundary_residual_is_small(impedance_solver):
    residual = impedance_solver.solve_dirichlet(outer_mode(impedance_solver, 2)).boundary_residual()
    assert set(residual) == {0, 1}
    assert max(residual.values()) < 1e-7


# -----------------------------------------------------------------------------
# 无障碍物
# -----------------------------------------------------------------------------

@pytest.mark.parametrize("m", [0, 1, 4])
def test_dtn_background_of_disk_modes(m):
    k = 2.0
    curve = discretize(UNIT_DISK, 64)
    f = BoundaryData(curve, np.exp(1j * m * curve.t))
    expected = k * sp.jvp(m, k) / sp.jv(m, k) * f.samples
    np.testing.assert_allclose(dtn_background(UNIT_DISK, k, f).samples, expected, atol=1e-9)


def test_empty_scene_dtn_reproduces_entire_solution(empty_solver):
    v = EntireSolution.single_mode((0.1, -0.05), 2.0, 2, order=3, value=1 - 0.5j)
    outer = empty_solver.outer_curve
    numeric = empty_solver.dtn(trace(v, outer))
    np.testing.assert_allclose(numeric, normal_derivative(v, outer), atol=1e-8)


def test_green_identity_on_background(empty_solver):
    # ∫_∂Ω (∂v/∂ν) v̄ ds = ∫_Ω |∇v|² - k²|v|² dz
    k = 2.0
    v = EntireSolution((0.0, 0.0), k, np.array([0.3, -0.2j, 1.0, 0.5, 0.1 + 0.1j]))
    outer = empty_solver.outer_curve
    values = trace(v, outer)
    pairing = np.sum(outer.weights * empty_solver.dtn(values) * np.conj(values))

    def integrand(points):
        value, gradient = eval_entire(v, points)
        return np.sum(np.abs(gradient) ** 2, axis=-1) - k ** 2 * np.abs(value) ** 2

    volume = area_quadrature(StarRegion(UNIT_DISK), integrand)
    assert pairing.real == pytest.approx(volume, abs=1e-4 * (1 + abs(volume)))
    assert abs(pairing.imag) < 1e-6


# -----------------------------------------------------------------------------
# 错误路径
# -----------------------------------------------------------------------------

def test_condition_ceiling_raises():
    with pytest.raises(IllConditioned) as info:
        build_solver(concentric_scene("impedance"), 64, 32, condition_ceiling=1.0)
    assert info.value.condition > 1.0


def test_reflected_solution_too_close_to_obstacle(impedance_solver):
    with pytest.raises(TipTooClose) as info:
        impedance_solver.solve_reflected(np.array([0.405, 0.0]))
    assert info.value.distance == pytest.approx(0.005, abs=1e-6)


def test_evaluation_inside_obstacle_is_rejected(impedance_solver):
    solution = impedance_solver.solve_dirichlet(outer_mode(impedance_solver, 0))
    with pytest.raises(PointOutsideDomain):
        solution.evaluate(np.array([[0.1, 0.0]]))
    with pytest.raises(PointOutsideDomain):
        impedance_solver.solve_reflected(np.array([0.1, 0.0]))


def test_boundary_data_validation(impedance_solver):
    with pytest.raises(SolverError):
        BoundaryData(impedance_solver.outer_curve, np.zeros(10))
    with pytest.raises(SolverError):
        BoundaryData(impedance_solver.outer_curve, np.full(impedance_solver.outer_curve.M, np.nan))
    other = discretize(UNIT_DISK, 64)
    with pytest.raises(SolverError):
        impedance_solver.solve_dirichlet(BoundaryData(other, np.ones(64)))


def test_reflected_solution_in_empty_scene_is_zero(empty_solver):
    solution = empty_solver.solve_reflected(np.array([0.2, 0.3]))
    assert np.all(solution.density == 0)
