import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from curvcheck.kernels import (
    SQUARE,
    UPSILON,
    c_delta,
    convexity_scan,
    nu,
    nu_kernel,
    nu_prime,
    nu_second,
    upsilon,
    upsilon_prime,
)


def test_upsilon_pinned_values():
    assert upsilon(0.0) == 0.0
    assert upsilon(1.0) == pytest.approx(math.e - 2.0, abs=1e-15)
    assert upsilon_prime(1.0) == pytest.approx(math.e - 1.0, abs=1e-15)


@given(st.floats(-50, 50))
def test_upsilon_nonnegative(r):
    assert upsilon(r) >= 0.0


def test_upsilon_tiny_arguments_keep_six_digits():
    # series: r^2/2 + r^3/6 dominates everything else at |r| <= 1e-8
    for r in [1e-8, -1e-8, 3e-9, -7e-10]:
        expected = r * r / 2.0 + r ** 3 / 6.0
        assert upsilon(r) == pytest.approx(expected, rel=1e-6)


def test_upsilon_symmetrized_dominates_square():
    grid = np.linspace(-10, 10, 2001)
    vals = upsilon(grid) + upsilon(-grid)
    assert np.all(vals >= grid ** 2 - 1e-12 * np.maximum(vals, 1.0))
    interior = grid != 0.0
    assert np.all(vals[interior] > grid[interior] ** 2)


def test_nu_zero_at_origin():
    for c, d in [(2.0, 1.0), (1.5, 0.5), (2.0, 5.0), (-1.0, 3.0)]:
        assert nu(c, d, 0.0) == 0.0


def test_nu_second_derivative_formula():
    # nu''_{1+lambda,lambda}(r) = e^r ((1+lambda) r + 2 + lambda) + e^{-r}
    assert nu_second(2.0, 1.0, 0.0) == pytest.approx(4.0, abs=1e-14)
    lam = 0.3
    r = 1.7
    expected = math.exp(r) * ((1 + lam) * r + 2 + lam) + math.exp(-r)
    assert nu_second(1 + lam, lam, r) == pytest.approx(expected, rel=1e-14)


def test_nu_derivatives_match_finite_differences():
    rng = np.random.default_rng(7)
    for c, d in [(2.0, 1.0), (2.0, 5.0), (1.25, 0.25)]:
        for r in rng.uniform(-3, 3, size=20):
            h = 1e-6
            fd1 = (nu(c, d, r + h) - nu(c, d, r - h)) / (2 * h)
            assert nu_prime(c, d, r) == pytest.approx(fd1, rel=1e-6, abs=1e-6)
            fd2 = (nu_prime(c, d, r + h) - nu_prime(c, d, r - h)) / (2 * h)
            assert nu_second(c, d, r) == pytest.approx(fd2, rel=1e-6, abs=1e-6)


def test_nu_one_plus_lambda_strictly_convex():
    for lam in np.arange(0.1, 1.05, 0.1):
        scan = convexity_scan(1 + lam, lam)
        assert scan.strictly_convex, f"lambda={lam}: min nu'' = {scan.minimum}"


def test_nu_2_5_convex_and_quartic_near_zero():
    scan = convexity_scan(2.0, 5.0)
    assert scan.minimum >= 0.0
    # second derivative vanishes at 0, so growth near 0 is quartic
    assert nu_second(2.0, 5.0, 0.0) == pytest.approx(0.0, abs=1e-14)
    r = 1e-3
    assert nu(2.0, 5.0, r) == pytest.approx(r ** 4 / 6.0, rel=1e-2)


def test_c_delta_one_is_exact():
    assert c_delta(1.0) == 1.0


def test_c_delta_bounds_hold_on_grid():
    grid = np.linspace(-30, 30, 5001)
    grid = grid[grid != 0]
    for delta in [1.5, 2.0, 3.0]:
        c = c_delta(delta)
        assert c > 0
        lhs = upsilon(grid) + upsilon(-grid)
        rhs = c * np.abs(grid) ** (1 + delta)
        assert np.all(lhs >= rhs * (1 - 1e-9))
        # optimality: the bound is tight somewhere
        assert np.min(lhs / rhs) == pytest.approx(1.0, rel=1e-3)


def test_kernel_derivative_consistency():
    grid = np.linspace(-4, 4, 81)
    h = 1e-6
    for kernel in [UPSILON, SQUARE, nu_kernel(2.0, 5.0, arg_scale=3.0, out_scale=1.5)]:
        fd = (kernel.value(grid + h) - kernel.value(grid - h)) / (2 * h)
        assert np.allclose(kernel.derivative(grid), fd, rtol=1e-6, atol=1e-6)
