"""CD-functions: the dimension term F in the curvature condition.

A CD-function is nonnegative on [0, inf) with F(0) = 0, F(r)/r strictly
increasing and 1/F integrable at infinity. F_0 denotes the trivial extension
by zero to negative arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import BadParams
from .kernels import nu, nu_prime

_VALIDATION_GRID = np.logspace(-4, 4, 100)


class CDFunction:
    """Base interface: value / derivative on [0, inf), trivial extension,
    inverse of F(r)/r, and a growth exponent estimate."""

    descriptor: str

    def value(self, r):
        raise NotImplementedError

    def derivative(self, r):
        raise NotImplementedError

    def trivial(self, r):
        """F_0(r): F(r) for r >= 0, zero for r < 0."""
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        pos = r > 0
        if np.any(pos):
            out[pos] = self.value(r[pos])
        return out if out.ndim else float(out)

    def g_inverse(self, s: float) -> float:
        """Inverse of r -> F(r)/r at s > 0, by bracketed root finding."""
        if s <= 0:
            raise BadParams("g_inverse needs s > 0")

        def h(r):
            return self.value(r) / r - s

        lo, hi = 1e-12, 1.0
        for _ in range(200):
            if h(hi) > 0:
                break
            hi *= 2.0
        else:
            raise BadParams("F(r)/r never exceeds s; not a CD-function?")
        for _ in range(200):
            if h(lo) < 0:
                break
            lo /= 2.0
        return float(brentq(h, lo, hi, xtol=1e-300, rtol=1e-12))

    def growth_exponent(self) -> float:
        """Largest delta with F'(r) r >= (1 + delta) F(r) on the check grid."""
        r = self._check_grid()
        ratio = self.derivative(r) * r / self.value(r)
        return float(np.min(ratio) - 1.0)

    def _check_grid(self) -> np.ndarray:
        return _VALIDATION_GRID

    def validate(self) -> None:
        r = self._check_grid()
        v = self.value(r)
        if np.any(v < 0):
            raise BadParams(f"{self.descriptor}: F < 0 on the check grid")
        frac = v / r
        if np.any(np.diff(frac) <= 0):
            raise BadParams(f"{self.descriptor}: F(r)/r not strictly increasing")
        z = self.value(np.array([0.0]))
        if abs(float(z[0])) > 1e-300:
            raise BadParams(f"{self.descriptor}: F(0) != 0")

    def integrable_reciprocal_at_infinity(self):
        return None  # subclasses answer analytically where possible

    def __repr__(self):
        return f"CDFunction({self.descriptor})"


@dataclass(repr=False)
class PowerType(CDFunction):
    """F(r) = r^(1+delta) / n."""

    n: float
    delta: float = 1.0

    def __post_init__(self):
        if self.n <= 0:
            raise BadParams("n must be positive")
        if self.delta < 1:
            raise BadParams("delta must be >= 1")
        self.descriptor = f"power:n={self.n:g},delta={self.delta:g}"

    def value(self, r):
        return np.asarray(r, dtype=float) ** (1.0 + self.delta) / self.n

    def derivative(self, r):
        return (1.0 + self.delta) * np.asarray(r, dtype=float) ** self.delta / self.n

    def g_inverse(self, s: float) -> float:
        # F(r)/r = r^delta / n inverts in closed form
        return float((self.n * s) ** (1.0 / self.delta))

    def growth_exponent(self) -> float:
        return self.delta

    def integrable_reciprocal_at_infinity(self):
        return True  # 1 + delta >= 2


@dataclass(repr=False)
class NuBased(CDFunction):
    """F(r) = out_scale * nu_{c,d}(-r / arg_scale)."""

    out_scale: float
    c: float
    d: float
    arg_scale: float

    def __post_init__(self):
        if self.out_scale <= 0 or self.arg_scale <= 0:
            raise BadParams("scales must be positive")
        parts = f"nu:{self.c:g},{self.d:g},scale={self.arg_scale:g}"
        if self.out_scale != self.arg_scale / 2.0:
            parts += f",out={self.out_scale:g}"
        self.descriptor = parts
        self.validate()

    def value(self, r):
        return self.out_scale * nu(self.c, self.d, -np.asarray(r, dtype=float) / self.arg_scale)

    def derivative(self, r):
        return -(self.out_scale / self.arg_scale) * nu_prime(
            self.c, self.d, -np.asarray(r, dtype=float) / self.arg_scale)

    def _check_grid(self) -> np.ndarray:
        # keep |r| / arg_scale clear of exp overflow
        hi = min(4.0, np.log10(500.0 * self.arg_scale))
        return np.logspace(-4, hi, 100)

    def integrable_reciprocal_at_infinity(self):
        return True  # exponential growth as r -> infinity


@dataclass(repr=False)
class Tabulated(CDFunction):
    """Monotone interpolant of sampled (grid, values) pairs.

    Integrability of 1/F at infinity cannot be decided from samples; the
    flag stays None and downstream quadrature treats it as unverified.
    """

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.ndim != 1 or self.grid.shape != self.values.shape:
            raise BadParams("grid and values must be matching 1-D arrays")
        if self.grid[0] > 0:
            self.grid = np.concatenate([[0.0], self.grid])
            self.values = np.concatenate([[0.0], self.values])
        self._interp = PchipInterpolator(self.grid, self.values, extrapolate=True)
        self._deriv = self._interp.derivative()
        self.descriptor = f"tabulated:{len(self.grid)}pts"

    def value(self, r):
        return self._interp(np.asarray(r, dtype=float))

    def derivative(self, r):
        return self._deriv(np.asarray(r, dtype=float))


@dataclass(repr=False)
class Scaled(CDFunction):
    """F(r) = amplitude * base(r / stretch); used by the Jensen criterion."""

    base: CDFunction
    amplitude: float
    stretch: float

    def __post_init__(self):
        if self.amplitude <= 0 or self.stretch <= 0:
            raise BadParams("amplitude and stretch must be positive")
        self.descriptor = (f"scaled[{self.base.descriptor};"
                           f"amp={self.amplitude:g},stretch={self.stretch:g}]")

    def value(self, r):
        return self.amplitude * self.base.value(np.asarray(r, dtype=float) / self.stretch)

    def derivative(self, r):
        return (self.amplitude / self.stretch) * self.base.derivative(
            np.asarray(r, dtype=float) / self.stretch)

    def growth_exponent(self) -> float:
        return self.base.growth_exponent()


def parse_cd_descriptor(text: str) -> CDFunction:
    """Parse compact descriptors: power:n=12,delta=1 and nu:2,5,scale=3[,out=1.5].

    For nu descriptors the output scale defaults to scale/2.
    """
    text = text.strip()
    if ":" not in text:
        raise BadParams(f"bad CD-function descriptor {text!r}")
    kind, _, body = text.partition(":")
    fields = [p for p in body.split(",") if p]
    try:
        if kind == "power":
            kv = _keyed(fields, "power")
            try:
                return PowerType(n=float(kv.pop("n")),
                                 delta=float(kv.pop("delta", 1.0)))
            except KeyError as e:
                raise BadParams(f"power descriptor missing {e}") from e
        if kind == "nu":
            positional = [p for p in fields if "=" not in p]
            if len(positional) != 2:
                raise BadParams("nu descriptor needs leading c,d values")
            c, d = (float(p) for p in positional)
            kv = _keyed([p for p in fields if "=" in p], "nu")
            scale = float(kv.pop("scale", 1.0))
            out = float(kv.pop("out", scale / 2.0))
            if kv:
                raise BadParams(f"unknown nu fields: {sorted(kv)}")
            return NuBased(out_scale=out, c=c, d=d, arg_scale=scale)
    except ValueError as e:
        raise BadParams(f"bad CD-function descriptor {text!r}: {e}") from e
    raise BadParams(f"unknown CD-function kind {kind!r}")


def _keyed(fields, kind) -> dict:
    kv = {}
    for part in fields:
        if "=" not in part:
            raise BadParams(f"{kind} descriptor field {part!r} needs key=value")
        k, _, v = part.partition("=")
        kv[k.strip()] = v.strip()
    return kv
