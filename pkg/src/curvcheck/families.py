"""Example chain factory.

Each family comes bundled with its certified (kappa, F) pair where one is
known. Certificates are exact constructions, not fits; verify_cd_random is
expected to find zero violations against them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
from scipy.special import logsumexp
from scipy.stats import poisson as poisson_dist

from .cdfunctions import CDFunction, NuBased, PowerType
from .chains import build_chain, truncate_birth_death
from .errors import BadParams, TruncationInsufficient
from .kernels import c_delta

POISSON_TAIL_TOL = 1e-8


@dataclass(frozen=True)
class Certificate:
    kappa: float
    cd_function: CDFunction

    def describe(self) -> str:
        return f"kappa={self.kappa:.12g}, F={self.cd_function.descriptor}"


@dataclass(frozen=True)
class ExampleResult:
    chain: MarkovChain
    certificate: Optional[Certificate]
    notes: str = ""


def make_example(family: str, params: Optional[Mapping] = None) -> ExampleResult:
    """Build a named example chain with its certificate, if one exists.

    Families: two_point(a, b), complete(n, alpha), weighted_complete(l,
    alpha, delta), hypercube(d), birth_death(a, b, cutoff | lam, cutoff).
    alpha is the curvature/dimension trade-off of the complete families and
    must lie in (0, l_star/2); it defaults to l_star/4.
    """
    params = dict(params or {})
    try:
        builder = _FAMILIES[family]
    except KeyError:
        raise BadParams(f"unknown family {family!r}; "
                        f"choose from {sorted(_FAMILIES)}") from None
    try:
        result = builder(**params)
    except TypeError as exc:
        # unknown keyword or non-scalar value for a scalar parameter
        raise BadParams(f"bad parameters for family {family!r}: {exc}") from None
    chain = result.chain
    chain.meta.setdefault("family", family)
    chain.meta.setdefault("family_params", dict(params))
    return result


def _two_point(a: float = 1.0, b: float = 1.0) -> ExampleResult:
    a, b = float(a), float(b)
    if a <= 0 or b <= 0:
        raise BadParams("two_point rates must be positive")
    chain = build_chain({"states": ["0", "1"], "rates": [[0, 1, a], [1, 0, b]]})
    lam = min(a / b, b / a)
    cert = Certificate(
        kappa=0.0,
        cd_function=NuBased(out_scale=a * b / 2.0, c=1.0 + lam, d=lam,
                            arg_scale=max(a, b)),
    )
    return ExampleResult(chain, cert, notes="kappa set to 0; F carries all strength")


def _complete(n: int = 3, alpha: float = None) -> ExampleResult:
    n = int(n)
    if n < 2:
        raise BadParams("complete graph needs n >= 2")
    if alpha is None:
        alpha = 0.25
    alpha = float(alpha)
    if not 0.0 < alpha < 0.5:
        raise BadParams("alpha must lie in (0, 1/2)")
    rates = [[x, y, 1.0] for x in range(n) for y in range(n) if x != y]
    chain = build_chain({"states": [str(i) for i in range(n)], "rates": rates})
    cert = Certificate(
        kappa=float(np.sqrt(2.0 * n * (1.0 - 2.0 * alpha))),
        cd_function=PowerType(n=n / alpha, delta=1.0),
    )
    return ExampleResult(chain, cert)


def _weighted_complete(l: Sequence[float], alpha: float = None,
                       delta: float = 1.0) -> ExampleResult:
    weights = np.asarray(l, dtype=float)
    if weights.ndim != 1 or len(weights) < 2:
        raise BadParams("l must be a 1-D weight list with >= 2 entries")
    if np.any(weights <= 0):
        raise BadParams("weights must be positive")
    delta = float(delta)
    if delta < 1:
        raise BadParams("delta must be >= 1")
    l_star = float(weights.min())
    l_one = float(weights.sum())
    if alpha is None:
        alpha = l_star / 4.0
    alpha = float(alpha)
    if not 0.0 < alpha < l_star / 2.0:
        raise BadParams(f"alpha must lie in (0, {l_star / 2.0:g})")
    n = len(weights)
    rates = [[x, y, float(weights[y])] for x in range(n) for y in range(n) if x != y]
    chain = build_chain({"states": [str(i) for i in range(n)], "rates": rates})
    # F(r) = alpha * c_delta * r^(1+delta) / |l|_1^delta, written as power type
    cert = Certificate(
        kappa=float(np.sqrt(2.0 * l_one * (l_star - 2.0 * alpha))),
        cd_function=PowerType(n=l_one ** delta / (alpha * c_delta(delta)),
                              delta=delta),
    )
    return ExampleResult(chain, cert)


def _hypercube(d: int = 3) -> ExampleResult:
    d = int(d)
    if d < 1:
        raise BadParams("hypercube needs d >= 1")
    n = 1 << d
    states = [format(u, f"0{d}b") for u in range(n)]
    rates = [[states[u], states[u ^ (1 << i)], 1.0]
             for u in range(n) for i in range(d)]
    chain = build_chain({"states": states, "rates": rates})
    cert = Certificate(
        kappa=2.0,
        cd_function=NuBased(out_scale=d / 2.0, c=2.0, d=5.0, arg_scale=float(d)),
    )
    return ExampleResult(chain, cert)


def _birth_death(a=None, b=None, cutoff: int = None, lam: float = None) -> ExampleResult:
    if lam is not None:
        if a is not None or b is not None:
            raise BadParams("give either lam or explicit a/b rates, not both")
        lam = float(lam)
        if lam <= 0:
            raise BadParams("lam must be positive")
        a_fun = lambda x: lam
        b_fun = lambda x: float(x)
    else:
        if a is None or b is None:
            raise BadParams("birth_death needs a and b rates (or lam)")
        a_fun = _as_rate_function(a, "a")
        b_fun = _as_rate_function(b, "b")
    if cutoff is None:
        raise BadParams("birth_death needs an explicit cutoff")
    chain = truncate_birth_death(a_fun, b_fun, int(cutoff))
    if lam is not None:
        chain.meta["lam"] = lam
    notes = ("no certificate: steep test functions concentrated below a point "
             "drive the quadratic form under kappa*Psi + F for every admissible "
             "(kappa, F), so no CD condition of this type holds")
    return ExampleResult(chain, None, notes=notes)


def _as_rate_function(spec, name: str) -> Callable[[int], float]:
    if callable(spec):
        return spec
    values = np.asarray(spec, dtype=float)
    if values.ndim != 1:
        raise BadParams(f"{name} must be a callable or a 1-D rate list")

    def fun(x: int) -> float:
        if x >= len(values):
            raise BadParams(f"{name} rate list too short for requested cutoff")
        return float(values[x])

    return fun


_FAMILIES = {
    "two_point": _two_point,
    "complete": _complete,
    "weighted_complete": _weighted_complete,
    "hypercube": _hypercube,
    "birth_death": _birth_death,
}


def poisson_test_function(lam: float, k: float, cutoff: int):
    """Exponential test density f_k(x) = e^(kx - lam(e^k - 1)) on the truncated
    state space, renormalized to unit mean against the truncated measure.

    Returns (chain, f, renorm) where renorm is the pre-normalization mass.
    Raises TruncationInsufficient when the shifted distribution, which is
    Poisson with mean lam*e^k, leaves more than POISSON_TAIL_TOL of its mass
    above the cutoff.
    """
    lam, k = float(lam), float(k)
    cutoff = int(cutoff)
    tail = float(poisson_dist.sf(cutoff, lam * np.exp(k)))
    if not tail < POISSON_TAIL_TOL:
        raise TruncationInsufficient(
            f"P(Poisson({lam * np.exp(k):.4g}) > {cutoff}) = {tail:.3e} "
            f"exceeds {POISSON_TAIL_TOL:g}; raise the cutoff")
    chain = make_example("birth_death", {"lam": lam, "cutoff": cutoff}).chain
    x = np.arange(cutoff + 1, dtype=float)
    # log f_k = k x - lam (e^k - 1); normalize in log space so the mass never
    # overflows even when individual exponents are large
    log_f = k * x - lam * np.expm1(k)
    log_mass = float(logsumexp(log_f, b=chain.pi))
    log_f -= log_mass
    if float(log_f.max()) > 700.0:
        raise BadParams(
            f"k*cutoff = {k * cutoff:.4g} puts the test function outside "
            "double-precision range; no admissible cutoff exists for this k")
    return chain, np.exp(log_f), float(np.exp(log_mass))


def hypercube_eta_maps(d: int) -> np.ndarray:
    """Coordinate-flip maps eta_i(u) = u xor e_i as an index array of shape
    (d, 2^d); eta[i, u] is the state reached by flipping bit i of u."""
    d = int(d)
    if d < 1:
        raise BadParams("hypercube needs d >= 1")
    n = 1 << d
    u = np.arange(n)
    return np.stack([u ^ (1 << i) for i in range(d)])
