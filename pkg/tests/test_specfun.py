# -*- coding: utf-8 -*-

import numpy as np
import pytest
import scipy.special as sp

from core.errors import SpecialFunctionError
from helmholtz.specfun import (
    bessel, bessel_derivative, bessel_j01, bessel_j_table, bessel_y01, bessel_y_table, green2d, green3d, hankel1_01,
)

# 覆盖级数区与渐近区（切换点 12）
ARGUMENTS = np.concatenate([np.linspace(1e-3, 1.0, 25), np.linspace(1.0, 30.0, 120), [11.999, 12.0, 12.001, 80.0]])


def test_j01_matches_reference():
    j0, j1 = bessel_j01(ARGUMENTS)
    np.testing.assert_allclose(j0, sp.j0(ARGUMENTS), rtol=0, atol=5e-11)
    np.testing.assert_allclose(j1, sp.j1(ARGUMENTS), rtol=0, atol=5e-11)


def test_j01_symmetry_for_negative_arguments():
    j0, j1 = bessel_j01(-ARGUMENTS)
    np.testing.assert_allclose(j0, sp.j0(ARGUMENTS), rtol=0, atol=5e-11)
    np.testing.assert_allclose(j1, -sp.j1(ARGUMENTS), rtol=0, atol=5e-11)


def test_y01_matches_reference():
    y0, y1 = bessel_y01(ARGUMENTS)
    np.testing.assert_allclose(y0, sp.y0(ARGUMENTS), rtol=1e-10, atol=5e-11)
    np.testing.assert_allclose(y1, sp.y1(ARGUMENTS), rtol=1e-10, atol=5e-11)


def test_hankel_combines_j_and_y():
    h0, h1 = hankel1_01(ARGUMENTS)
    np.testing.assert_allclose(h0, sp.hankel1(0, ARGUMENTS), rtol=1e-10, atol=5e-11)
    np.testing.assert_allclose(h1, sp.hankel1(1, ARGUMENTS), rtol=1e-10, atol=5e-11)


@pytest.mark.parametrize("x", [0.05, 0.8, 2.0, 7.5, 20.0])
def test_j_table_high_orders(x):
    table = bessel_j_table(40, np.array([x]))[:, 0]
    np.testing.assert_allclose(table, sp.jv(np.arange(41), x), rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("x", [0.5, 2.0, 7.5, 20.0])
def test_y_table_forward_recurrence(x):
    table = bessel_y_table(12, np.array([x]))[:, 0]
    np.testing.assert_allclose(table, sp.yv(np.arange(13), x), rtol=1e-10, atol=1e-11)


def test_scalar_interface_and_derivatives():
    assert bessel("J", 3, 2.5) == pytest.approx(sp.jv(3, 2.5), abs=1e-12)
    assert bessel("Y", 2, 2.5) == pytest.approx(sp.yv(2, 2.5), rel=1e-10)
    assert bessel_derivative("J", 0, 1.7) == pytest.approx(sp.jvp(0, 1.7), abs=1e-12)
    assert bessel_derivative("J", 4, 1.7) == pytest.approx(sp.jvp(4, 1.7), abs=1e-12)
    assert bessel_derivative("Y", 1, 1.7) == pytest.approx(sp.yvp(1, 1.7), rel=1e-10)


@pytest.mark.parametrize("call", [
    lambda: bessel_y01(np.array([0.0, 1.0])),
    lambda: bessel("Y", 0, -1.0),
    lambda: bessel("J", -1, 1.0),
    lambda: bessel("J", 0, -0.5),
    lambda: bessel("K", 0, 1.0),
])
def test_domain_violations_raise(call):
    with pytest.raises(SpecialFunctionError):
        call()


def test_special_function_error_is_value_error():
    with pytest.raises(ValueError):
        bessel_y01(np.array([-2.0]))


def test_green2d_value_and_gradient():
    k = 2.0
    x = np.array([0.1, -0.2])
    z = np.array([[0.6, 0.3], [-0.4, 0.5], [0.1, 0.7]])
    g = green2d(k, z, x)
    r = np.linalg.norm(z - x, axis=-1)
    np.testing.assert_allclose(g.value, 0.25j * sp.hankel1(0, k * r), rtol=1e-10)
    step = 1e-6
    for axis in range(2):
        shift = np.zeros(2)
        shift[axis] = step
        fd = (green2d(k, z + shift, x).value - green2d(k, z - shift, x).value) / (2 * step)
        np.testing.assert_allclose(g.gradient_z[:, axis], fd, rtol=1e-6, atol=1e-9)


def test_green2d_is_symmetric_and_rejects_coincident_points():
    a, b = np.array([0.3, 0.1]), np.array([-0.2, 0.4])
    assert complex(green2d(3.0, a, b).value) == pytest.approx(complex(green2d(3.0, b, a).value), rel=1e-14)
    with pytest.raises(SpecialFunctionError):
        green2d(3.0, a, a)
    with pytest.raises(SpecialFunctionError):
        green2d(0.0, a, b)


def test_green3d_formula():
    value = green3d(1.5, np.array([0.0, 0.0, 1.0]), np.zeros(3))
    assert value == pytest.approx(np.exp(1.5j) / (4 * np.pi), rel=1e-14)
    with pytest.raises(SpecialFunctionError):
        green3d(-1.0, np.ones(3), np.zeros(3))
