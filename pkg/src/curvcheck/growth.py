"""Concave growth functions and the entropy bounds built from them.

A growth function Phi is strictly increasing and concave with Phi(0+) >= 0;
the entropy-information inequality EI(Phi) reads Ent(f) <= Phi(I(f)) for
densities f. Power-type curvature certificates induce

    Phi'(r) = n / (2 (kappa n + r^delta)),

which integrates to (n/2) log(1 + r/(kappa n)) at delta = 1 and stays bounded
exactly when delta > 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .cdfunctions import CDFunction
from .errors import (
    BadParams,
    DivergentIntegral,
    NonIntegrableGrowth,
    NonIntegrableTail,
    QuadratureNonConvergent,
)

_GRID = np.logspace(-4, 4, 100)


def _quad(func, lo, hi, **kw) -> float:
    val, err, info, *rest = quad(func, lo, hi, epsabs=1e-9, epsrel=1e-10,
                                 limit=200, full_output=1, **kw)
    if rest:
        raise QuadratureNonConvergent(str(rest[0]))
    return float(val)


class GrowthFunction:
    """Base interface: value, derivative, and the tangent intercept
    Theta(r) = Phi(r) - Phi'(r) r used by the linearized inequality."""

    bounded: bool = False

    def value(self, r):
        raise NotImplementedError

    def derivative(self, r):
        raise NotImplementedError

    def second_derivative(self, r):
        raise NotImplementedError

    def theta(self, r):
        r = np.asarray(r, dtype=float)
        return self.value(r) - self.derivative(r) * r

    def value_at_infinity(self) -> float:
        if not self.bounded:
            return float("inf")
        raise NotImplementedError

    def validate(self) -> None:
        d = self.derivative(_GRID)
        if np.any(d <= 0):
            raise BadParams(f"{self.descriptor}: derivative not positive")
        if np.any(self.second_derivative(_GRID) > 1e-12):
            raise BadParams(f"{self.descriptor}: not concave")
        if np.any(self.theta(_GRID) < -1e-12):
            raise BadParams(f"{self.descriptor}: negative tangent intercept")

    @property
    def descriptor(self) -> str:
        raise NotImplementedError


def _fmt(x: float) -> str:
    # shortest form that still round-trips the float exactly
    s = format(float(x), "g")
    if float(s) == float(x):
        return s
    return format(float(x), ".17g")


@dataclass(frozen=True)
class LogGrowth(GrowthFunction):
    """Phi(r) = (n/2) log(1 + r/(kappa n)), the delta = 1 case."""

    n: float
    kappa: float

    def __post_init__(self):
        if self.n <= 0 or self.kappa <= 0:
            raise BadParams("LogGrowth needs n > 0 and kappa > 0")

    bounded = False

    def value(self, r):
        return 0.5 * self.n * np.log1p(np.asarray(r, dtype=float)
                                       / (self.kappa * self.n))

    def derivative(self, r):
        return self.n / (2.0 * (self.kappa * self.n + np.asarray(r, dtype=float)))

    def second_derivative(self, r):
        return -self.n / (2.0 * (self.kappa * self.n
                                 + np.asarray(r, dtype=float)) ** 2)

    @property
    def descriptor(self) -> str:
        return f"log:n={_fmt(self.n)},kappa={_fmt(self.kappa)}"


@dataclass(frozen=True)
class PowerIntegral(GrowthFunction):
    """Phi from integrating n / (2 (kappa n + s^delta)); bounded iff delta > 1."""

    n: float
    kappa: float
    delta: float

    def __post_init__(self):
        if self.n <= 0 or self.kappa <= 0:
            raise BadParams("PowerIntegral needs n > 0 and kappa > 0")
        if self.delta < 1:
            raise BadParams("delta must be >= 1")

    @property
    def bounded(self) -> bool:
        return self.delta > 1

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        return self.n / (2.0 * (self.kappa * self.n + r ** self.delta))

    def second_derivative(self, r):
        r = np.asarray(r, dtype=float)
        num = -self.n * self.delta * r ** (self.delta - 1.0)
        return num / (2.0 * (self.kappa * self.n + r ** self.delta) ** 2)

    def _scale(self) -> float:
        # the derivative halves around (kappa n)^(1/delta)
        return float((self.kappa * self.n) ** (1.0 / self.delta))

    def _value_scalar(self, r: float) -> float:
        if r < 0:
            raise BadParams("growth functions live on r >= 0")
        if r == 0.0:
            return 0.0
        mid = min(r, 10.0 * self._scale())
        head = _quad(lambda s: self.derivative(s), 0.0, mid)
        if r <= mid:
            return head
        # split keeps the adaptive rule honest on huge intervals
        return head + _quad(lambda s: self.derivative(s), mid, r)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        if r.ndim == 0:
            return self._value_scalar(float(r))
        return np.array([self._value_scalar(float(v)) for v in r.ravel()]
                        ).reshape(r.shape)

    def value_at_infinity(self) -> float:
        if not self.bounded:
            return float("inf")
        mid = 10.0 * self._scale()
        return (_quad(lambda s: self.derivative(s), 0.0, mid)
                + _quad(lambda s: self.derivative(s), mid, np.inf))

    @property
    def descriptor(self) -> str:
        return (f"powerint:n={_fmt(self.n)},kappa={_fmt(self.kappa)},"
                f"delta={_fmt(self.delta)}")


@dataclass(frozen=True)
class Linear(GrowthFunction):
    """Phi(r) = c r, the modified log-Sobolev case; no tail integrability."""

    c: float

    def __post_init__(self):
        if self.c <= 0:
            raise BadParams("Linear growth needs c > 0")

    bounded = False

    def value(self, r):
        return self.c * np.asarray(r, dtype=float)

    def derivative(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.c)

    def second_derivative(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    @property
    def descriptor(self) -> str:
        return f"linear:c={_fmt(self.c)}"


def parse_growth_descriptor(text: str) -> GrowthFunction:
    """Inverse of .descriptor; accepts log:, powerint: and linear: forms."""
    try:
        head, _, body = text.partition(":")
        kv = dict(item.split("=", 1) for item in body.split(",") if item)
        args = {k: float(v) for k, v in kv.items()}
        if head == "log":
            return LogGrowth(n=args.pop("n"), kappa=args.pop("kappa"))
        if head == "powerint":
            return PowerIntegral(n=args.pop("n"), kappa=args.pop("kappa"),
                                 delta=args.pop("delta"))
        if head == "linear":
            return Linear(c=args.pop("c"))
    except (KeyError, ValueError) as exc:
        raise BadParams(f"malformed growth descriptor {text!r}: {exc}") from None
    raise BadParams(f"unknown growth kind {head!r}")


def growth_from_power_cd(n: float, kappa: float, delta: float = 1.0) -> GrowthFunction:
    """Growth function induced by CD with F(r) = r^(1+delta)/n at rate kappa."""
    if n <= 0 or kappa <= 0:
        raise BadParams("need n > 0 and kappa > 0")
    if delta < 1:
        raise BadParams("delta must be >= 1")
    if delta == 1.0:
        return LogGrowth(n=n, kappa=kappa)
    return PowerIntegral(n=n, kappa=kappa, delta=delta)


def main_entropy_bound(fisher: float, kappa: float, F: CDFunction,
                       delta: float = None) -> float:
    """Entropy bound from the curvature ODE: integrates G(kappa /
    (e^{2 delta kappa t}(1 + kappa I / F(I)) - 1)) over t in (0, inf), where
    G inverts F(r)/r.

    The power-type case collapses to the growth function in closed form; the
    quadrature here is the generic route and is cross-checked against it.
    """
    if fisher <= 0:
        raise BadParams("fisher must be positive")
    if kappa <= 0:
        raise DivergentIntegral(
            "kappa <= 0 leaves the bound integral divergent")
    if delta is None:
        delta = F.growth_exponent()
    grid = F._check_grid()
    lhs = F.derivative(grid) * grid
    rhs = (1.0 + delta) * F.value(grid)
    if np.any(lhs < rhs * (1.0 - 1e-9)):
        raise BadParams("F does not satisfy F'(r) r >= (1+delta) F(r)")

    c = 1.0 + kappa * fisher / float(F.value(fisher))
    rate = 2.0 * delta * kappa

    def integrand(t: float) -> float:
        if rate * t > 700.0:
            return 0.0
        denom = np.exp(rate * t) * c - 1.0
        return F.g_inverse(kappa / denom)

    return _quad(integrand, 0.0, np.inf)


def deviation_partial_integral(phi: GrowthFunction, t: float) -> float:
    """integral of Phi(s^2)/s^2 over (0, t]; the integrand extends
    continuously by Phi'(0) at 0."""
    if t < 0:
        raise BadParams("t must be nonnegative")
    if t == 0.0:
        return 0.0
    if isinstance(phi, LogGrowth):
        kn = phi.kappa * phi.n
        root = np.sqrt(kn)
        return float(0.5 * phi.n * (2.0 / root * np.arctan(t / root)
                                    - np.log1p(t * t / kn) / t))

    def integrand(s: float) -> float:
        if s < 1e-150:
            return float(phi.derivative(0.0))
        return float(phi.value(s * s)) / (s * s)

    return _quad(integrand, 0.0, t)


def deviation_tail_integral(phi: GrowthFunction) -> float:
    """integral of Phi(s^2)/s^2 over (0, inf); finite only when Phi grows
    strictly sublinearly."""
    if isinstance(phi, Linear):
        raise NonIntegrableGrowth(
            "linear growth gives a constant integrand at infinity")
    if isinstance(phi, LogGrowth):
        return float(0.5 * np.pi * np.sqrt(phi.n / phi.kappa))

    def integrand(s: float) -> float:
        if s < 1e-150:
            return float(phi.derivative(0.0))
        return float(phi.value(s * s)) / (s * s)

    return _quad(integrand, 0.0, np.inf)


def diameter_bound(phi: GrowthFunction) -> float:
    """Two-sided deviation bound 2 * integral of Phi(s^2)/s^2 ds."""
    return 2.0 * deviation_tail_integral(phi)


def ultracontractivity_params(phi: GrowthFunction, p: float, q: float,
                              uc_rho: float) -> tuple:
    """(t, m) pair for norm improvement from p to q at parameter uc_rho:
    t = integral over (p, q) of Phi'(uc_rho r)/r dr,
    m = Phi(uc_rho p)/p - Phi(uc_rho q)/q.
    """
    if not 1.0 <= p <= q:
        raise BadParams("need 1 <= p <= q")
    if uc_rho <= 0:
        raise BadParams("uc_rho must be positive")
    infinite = np.isinf(q)
    if infinite and isinstance(phi, Linear):
        raise NonIntegrableTail(
            "Phi'/r with constant Phi' is not integrable at infinity")
    if p == q:
        return 0.0, 0.0
    if isinstance(phi, Linear):
        # Phi(r)/r is constant, so the two endpoint terms cancel
        return float(phi.c * np.log(q / p)), 0.0
    if isinstance(phi, LogGrowth) and p == 1.0 and infinite:
        t = np.log1p(phi.kappa * phi.n / uc_rho) / (2.0 * phi.kappa)
        m = 0.5 * phi.n * np.log1p(uc_rho / (phi.kappa * phi.n))
        return float(t), float(m)

    def integrand(r: float) -> float:
        return float(phi.derivative(uc_rho * r)) / r

    # tail-to-tail difference: quad's infinite-range transform is far more
    # reliable than an adaptive rule on a huge finite interval
    t = _quad(integrand, p, np.inf)
    m_head = float(phi.value(uc_rho * p)) / p
    if infinite:
        m_tail = 0.0  # Phi(uc_rho q)/q -> 0 once Phi'/r is integrable
    else:
        t -= _quad(integrand, q, np.inf)
        m_tail = float(phi.value(uc_rho * q)) / q
    return float(t), float(m_head - m_tail)
