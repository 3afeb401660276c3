# -*- coding: utf-8 -*-

import numpy as np
import pytest
import scipy.special as sp

from core.errors import ModeResonance, OracleError, TailTooLarge
from core.solver import BoundaryData
from geometry.curves import CurveSpec, discretize
from helmholtz.oracle import (
    AnnulusProblem, annulus_mode_solve, boundary_modes, oracle_field, oracle_neumann, oracle_reflected, solve_modes,
)
from helmholtz.specfun import green2d
from tests.conftest import LAMBDA, RHO, UNIT_DISK

OUTER = discretize(UNIT_DISK, 64)


def mode_data(m: int) -> BoundaryData:
    return BoundaryData(OUTER, np.exp(1j * m * OUTER.t))


def test_boundary_modes_of_single_mode():
    modes = boundary_modes(mode_data(3), 1.0)
    assert modes[3] == pytest.approx(1.0, abs=1e-14)
    assert max(abs(c) for m, c in modes.items() if m != 3) < 1e-14


def test_boundary_modes_reject_off_center_circle():
    shifted = discretize(CurveSpec(kind="circle", center=(0.1, 0.0), radius=1.0), 64)
    with pytest.raises(OracleError):
        boundary_modes(BoundaryData(shifted, np.ones(64)), 1.0)


def test_boundary_modes_reject_rough_data():
    curve = discretize(UNIT_DISK, 256)
    rough = BoundaryData(curve, np.exp(1j * 80 * curve.t))
    with pytest.raises(TailTooLarge):
        boundary_modes(rough, 1.0)


def test_disk_field_is_bessel_ratio():
    k = 2.0
    modes = solve_modes(AnnulusProblem(R=1.0, k=k), mode_data(2))
    points = np.array([[0.3, 0.1], [-0.5, 0.4]])
    value, _ = oracle_field(modes, points)
    r = np.hypot(points[:, 0], points[:, 1])
    theta = np.arctan2(points[:, 1], points[:, 0])
    expected = sp.jv(2, k * r) / sp.jv(2, k) * np.exp(2j * theta)
    np.testing.assert_allclose(value, expected, rtol=1e-12)


@pytest.mark.parametrize("bc", ["sound_soft", "impedance"])
def test_annulus_boundary_conditions_hold(bc):
    k = 2.0
    problem = AnnulusProblem(R=1.0, k=k, rho=RHO, bc=bc, lam=LAMBDA)
    modes = solve_modes(problem, mode_data(1))
    angles = np.linspace(0, 2 * np.pi, 9)
    outer = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    np.testing.assert_allclose(oracle_field(modes, outer)[0], np.exp(1j * angles), atol=1e-12)
    r = RHO * (1 + 1e-12)
    inner = r * np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    value, gradient = oracle_field(modes, inner)
    if bc == "sound_soft":
        np.testing.assert_allclose(value, 0, atol=1e-10)
    else:
        # ν 为 D 的外法向，即 +e_r
        normal = inner / r
        np.testing.assert_allclose(np.sum(gradient * normal, axis=-1) + LAMBDA * value, 0, atol=1e-9)


def test_neumann_trace_of_disk_mode():
    k = 2.0
    modes = solve_modes(AnnulusProblem(R=1.0, k=k), mode_data(1))
    trace = oracle_neumann(modes, mode_data(1))
    expected = k * sp.jvp(1, k) / sp.jv(1, k) * np.exp(1j * OUTER.t)
    np.testing.assert_allclose(trace.samples, expected, rtol=1e-12)


def test_mode_resonance_on_dirichlet_eigenvalue():
    k0 = sp.jn_zeros(0, 1)[0]
    with pytest.raises(ModeResonance):
        annulus_mode_solve(AnnulusProblem(R=1.0, k=k0), 0, 1.0)


def test_problem_validation():
    with pytest.raises(OracleError):
        AnnulusProblem(R=1.0, k=2.0, rho=1.2)
    with pytest.raises(OracleError):
        AnnulusProblem(R=1.0, k=2.0, rho=0.4, bc="neumann")


@pytest.mark.parametrize("bc", ["sound_soft", "impedance"])
def test_reflected_solution_cancels_green_on_obstacle(bc):
    k = 2.0
    x = np.array([0.1, 0.65])
    problem = AnnulusProblem(R=1.0, k=k, rho=RHO, bc=bc, lam=LAMBDA)
    modes = oracle_reflected(problem, x)
    angles = np.linspace(0, 2 * np.pi, 12, endpoint=False)
    r = RHO * (1 + 1e-12)
    points = r * np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    value, gradient = oracle_field(modes, points)
    green = green2d(k, points, x)
    if bc == "sound_soft":
        np.testing.assert_allclose(value + green.value, 0, atol=1e-9)
    else:
        normal = points / r
        total = np.sum((gradient + green.gradient_z) * normal, axis=-1) + LAMBDA * (value + green.value)
        np.testing.assert_allclose(total, 0, atol=1e-8)
    # 外边界上反射解为 0
    outer = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    np.testing.assert_allclose(oracle_field(modes, outer)[0], 0, atol=1e-10)


def test_reflected_solution_truncation_and_domain():
    problem = AnnulusProblem(R=1.0, k=2.0, rho=RHO, bc="sound_soft")
    with pytest.raises(TailTooLarge):
        oracle_reflected(problem, (0.41, 0.0), max_order=5)
    with pytest.raises(OracleError):
        oracle_reflected(problem, (0.2, 0.0))
    with pytest.raises(OracleError):
        oracle_reflected(AnnulusProblem(R=1.0, k=2.0), (0.5, 0.0))
