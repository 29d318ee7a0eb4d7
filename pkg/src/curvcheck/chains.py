"""Finite reversible continuous-time Markov chains.

A chain is a finite state set, nonnegative off-diagonal jump rates k(x, y)
and a stationary probability density pi satisfying detailed balance
pi(x) k(x, y) = pi(y) k(y, x). State labels are arbitrary strings mapped to
dense indices at build time; all numerics run on the index space.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    BadParams,
    DetailedBalanceViolated,
    NegativeRate,
    NonIrreducible,
    ZeroRateInsideRange,
)

MEASURE_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class MarkovChain:
    states: tuple[str, ...]
    rates: np.ndarray          # off-diagonal rates, zero diagonal
    pi: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rates.setflags(write=False)
        self.pi.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.states)}

    @property
    def generator(self) -> np.ndarray:
        """Full rate matrix with diagonal -sum of off-diagonal row entries."""
        L = self.rates.copy()
        np.fill_diagonal(L, -self.rates.sum(axis=1))
        return L

    def neighbors(self, i: int) -> np.ndarray:
        return np.nonzero((self.rates[i] > 0) | (self.rates[:, i] > 0))[0]

    def ball(self, i: int, radius: int) -> np.ndarray:
        """Indices within graph distance `radius` of state i (inclusive)."""
        seen = {i}
        frontier = {i}
        for _ in range(radius):
            nxt = set()
            for j in frontier:
                nxt.update(int(v) for v in self.neighbors(j))
            frontier = nxt - seen
            seen |= frontier
            if not frontier:
                break
        return np.array(sorted(seen), dtype=int)

    def as_spec(self) -> dict:
        rates = [[self.states[i], self.states[j], float(self.rates[i, j])]
                 for i in range(self.n) for j in range(self.n)
                 if self.rates[i, j] > 0]
        return {"states": list(self.states), "rates": rates,
                "pi": [float(p) for p in self.pi]}

    def spec_hash(self) -> str:
        blob = json.dumps(self.as_spec(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class LocalStats:
    m1: np.ndarray
    m2: np.ndarray
    n_stat: np.ndarray
    m1_inf: float
    m1_sup: float


def _check_irreducible(K: np.ndarray) -> None:
    n, _ = connected_components(csr_matrix(K > 0), directed=True,
                                connection="strong")
    if n != 1:
        raise NonIrreducible(f"rate graph has {n} strongly connected components")


def stationary_measure(rates: np.ndarray) -> np.ndarray:
    """Solve pi L = 0, pi > 0, sum pi = 1 for the given off-diagonal rates.

    Dense nullspace of the transposed generator via SVD; robust at the
    scales this library targets.
    """
    K = np.asarray(rates, dtype=float)
    _check_irreducible(K)
    L = K.copy()
    np.fill_diagonal(L, -K.sum(axis=1))
    _, _, vh = np.linalg.svd(L.T)
    pi = vh[-1]
    pi = pi / pi.sum()
    if np.any(pi <= 0):
        raise NonIrreducible("stationary solve produced nonpositive mass")
    return pi


def build_chain(spec, tol: float = MEASURE_RTOL) -> MarkovChain:
    """Construct a validated chain from a spec mapping or (states, rates) data.

    Accepted forms:
      {"states": [...], "rates": [[x, y, value], ...], "pi": optional}
      {"family": name, "params": {...}}
    """
    if isinstance(spec, Mapping) and "family" in spec:
        from .families import make_example
        return make_example(spec["family"], spec.get("params", {})).chain

    states = [str(s) for s in spec["states"]]
    if len(states) < 2:
        raise BadParams("need at least 2 states")
    if len(set(states)) != len(states):
        raise BadParams("duplicate state labels")
    idx = {s: i for i, s in enumerate(states)}
    n = len(states)
    K = np.zeros((n, n))
    for x, y, v in spec["rates"]:
        x, y, v = str(x), str(y), float(v)
        if x not in idx or y not in idx:
            raise BadParams(f"rate references unknown state ({x}, {y})")
        if x == y:
            raise BadParams("diagonal rates are implied, do not list them")
        if v < 0:
            raise NegativeRate(f"k({x}, {y}) = {v}")
        K[idx[x], idx[y]] = v

    _check_irreducible(K)

    pi_given = spec.get("pi")
    if pi_given is None:
        pi = stationary_measure(K)
    else:
        pi = np.asarray([float(p) for p in pi_given])
        if pi.shape != (n,) or np.any(pi <= 0):
            raise BadParams("pi must list one positive value per state")
        if abs(pi.sum() - 1.0) > 1e-8:
            raise BadParams("pi must sum to 1")
        flux = pi[:, None] * K
        resid = np.max(np.abs(flux - flux.T))
        if resid > tol * max(K.max(), 1.0):
            raise DetailedBalanceViolated(
                f"max |pi k - (pi k)^T| = {resid:.3e}")

    chain = MarkovChain(states=tuple(states), rates=K, pi=pi)
    _validate_reversibility(chain, tol)
    return chain


def _validate_reversibility(chain: MarkovChain, tol: float) -> None:
    flux = chain.pi[:, None] * chain.rates
    resid = np.max(np.abs(flux - flux.T))
    scale = max(float(chain.rates.max()), 1.0)
    if resid > 1e-8 * scale:
        raise DetailedBalanceViolated(
            f"chain is not reversible: residual {resid:.3e}")


def local_stats(chain: MarkovChain) -> LocalStats:
    K = chain.rates
    m1 = K.sum(axis=1)
    m2 = K @ m1
    n_stat = (K * K.T).sum(axis=1)
    return LocalStats(m1=m1, m2=m2, n_stat=n_stat,
                      m1_inf=float(m1.min()), m1_sup=float(m1.max()))


def truncate_birth_death(a: Callable[[int], float], b: Callable[[int], float],
                         cutoff: int) -> MarkovChain:
    """Birth-death chain on {0..cutoff} with the outbound rate at the cutoff
    dropped. pi follows the one-step balance recursion
    a(x) pi(x) = b(x+1) pi(x+1), then is normalised.
    """
    if cutoff < 1:
        raise BadParams("cutoff must be >= 1")
    n = cutoff + 1
    K = np.zeros((n, n))
    for x in range(cutoff):
        ax = float(a(x))
        if ax <= 0:
            raise ZeroRateInsideRange(f"a({x}) = {ax}")
        K[x, x + 1] = ax
    for x in range(1, n):
        bx = float(b(x))
        if bx <= 0:
            raise ZeroRateInsideRange(f"b({x}) = {bx}")
        K[x, x - 1] = bx

    log_pi = np.zeros(n)
    for x in range(cutoff):
        log_pi[x + 1] = log_pi[x] + np.log(K[x, x + 1]) - np.log(K[x + 1, x])
    log_pi -= log_pi.max()
    pi = np.exp(log_pi)
    pi /= pi.sum()

    states = tuple(str(x) for x in range(n))
    return MarkovChain(states=states, rates=K, pi=pi,
                       meta={"truncated": True, "cutoff": cutoff})


def parse_chain_spec(text: str) -> MarkovChain:
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as e:
        raise BadParams(f"chain spec is not valid JSON: {e}") from e
    if not isinstance(spec, dict):
        raise BadParams("chain spec must be a JSON object")
    return build_chain(spec)
