"""Scalar kernels: Upsilon, its nu_{c,d} relatives, and pluggable H-kernels.

Upsilon(r) = exp(r) - r - 1 drives the curvature operators; the quadratic
kernel recovers the classical carre du champ. Kernels carry their derivative
so one operator implementation serves all of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar


def upsilon(r):
    """exp(r) - r - 1, computed as expm1(r) - r for accuracy near 0."""
    r = np.asarray(r, dtype=float)
    return np.expm1(r) - r


def upsilon_prime(r):
    return np.expm1(np.asarray(r, dtype=float))


def nu(c: float, d: float, r):
    """c * Upsilon'(r) * r + Upsilon(-r) - d * Upsilon(r)."""
    r = np.asarray(r, dtype=float)
    return c * upsilon_prime(r) * r + upsilon(-r) - d * upsilon(r)


def nu_prime(c: float, d: float, r):
    r = np.asarray(r, dtype=float)
    er = np.exp(r)
    return c * (er * r + np.expm1(r)) + (1.0 - np.exp(-r)) - d * np.expm1(r)


def nu_second(c: float, d: float, r):
    """nu_{c,d}''(r) = e^r (c (r + 2) - d) + e^{-r}."""
    r = np.asarray(r, dtype=float)
    return np.exp(r) * (c * (r + 2.0) - d) + np.exp(-r)


@dataclass(frozen=True)
class ConvexityScan:
    minimum: float
    argmin: float
    strictly_convex: bool


def convexity_scan(c: float, d: float, lo: float = -20.0, hi: float = 20.0,
                   num: int = 4001) -> ConvexityScan:
    """Minimum of nu_{c,d}'' over a uniform grid on [lo, hi]."""
    grid = np.linspace(lo, hi, num)
    vals = nu_second(c, d, grid)
    i = int(np.argmin(vals))
    m = float(vals[i])
    return ConvexityScan(minimum=m, argmin=float(grid[i]), strictly_convex=m > 0.0)


def c_delta(delta: float) -> float:
    """Optimal constant in Upsilon(r) + Upsilon(-r) >= c_delta |r|^(1+delta).

    delta = 1 returns the known exact value 1 (the infimum, attained only in
    the limit r -> 0). For delta > 1 the minimiser is interior and found by
    1-D minimisation of (2 cosh r - 2) / r^(1+delta) over r > 0.
    """
    if delta < 1.0:
        raise ValueError("delta must be >= 1")
    if delta == 1.0:
        return 1.0

    def objective(r):
        return (2.0 * np.cosh(r) - 2.0) / r ** (1.0 + delta)

    res = minimize_scalar(objective, bounds=(1e-8, 60.0), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.fun)


@dataclass(frozen=True)
class ScalarKernel:
    """H-kernel with paired derivative, both vectorised over numpy arrays."""

    name: str
    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]


UPSILON = ScalarKernel("upsilon", upsilon, upsilon_prime)

# H(r) = r^2 / 2 makes Psi_H the carre du champ Gamma and Psi_{2,H} = Gamma_2.
SQUARE = ScalarKernel(
    "square",
    lambda r: 0.5 * np.asarray(r, dtype=float) ** 2,
    lambda r: np.asarray(r, dtype=float),
)


def nu_kernel(c: float, d: float, arg_scale: float = 1.0,
              out_scale: float = 1.0) -> ScalarKernel:
    """H(r) = out_scale * nu_{c,d}(r / arg_scale), for nu-shaped probes."""
    if arg_scale <= 0:
        raise ValueError("arg_scale must be positive")

    def value(r):
        return out_scale * nu(c, d, np.asarray(r, dtype=float) / arg_scale)

    def derivative(r):
        return (out_scale / arg_scale) * nu_prime(c, d, np.asarray(r, dtype=float) / arg_scale)

    return ScalarKernel(f"nu:{c:g},{d:g}", value, derivative)


def custom_kernel(name: str, value: Callable, derivative: Callable) -> ScalarKernel:
    return ScalarKernel(name, value, derivative)
