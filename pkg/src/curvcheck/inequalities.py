"""Functional-inequality checks driven by growth functions and certificates.

Every check returns an InequalityReport: per-parameter slack, a pass flag,
and on failure the concrete input that broke the bound. Checks are pure and
rely on the semigroup/operator layer for the analytic ingredients.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np
from scipy.optimize import minimize, nnls
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path
from scipy.special import logsumexp

from .chains import MarkovChain, local_stats
from .errors import BadParams, SolverNotConverged, VanishingEntry
from .families import poisson_test_function
from .growth import (
    GrowthFunction,
    LogGrowth,
    deviation_partial_integral,
    deviation_tail_integral,
    ultracontractivity_params,
)
from .operators import gamma
from .semigroup import entropy, evolve, fisher_information

__all__ = [
    "InequalityReport",
    "ei_check",
    "bounded_phi_entropy_check",
    "poisson_sharpness",
    "PoissonSharpness",
    "ultracontractivity_params",
    "ultracontractivity_check",
    "lipschitz_seminorm",
    "unit_lipschitz",
    "fisher_lipschitz_check",
    "exp_integrability_check",
    "nash_check",
    "resistance_distance",
    "resistance_diameter",
    "ResistanceResult",
    "ResistanceDiameter",
]

PASS_TOL = 1e-10


@dataclass(frozen=True)
class InequalityReport:
    kind: str
    passed: bool
    grid: tuple          # parameter values the slack entries index
    slack: tuple
    params: dict
    witness: Optional[dict] = None

    def min_slack(self) -> float:
        return min(self.slack) if self.slack else float("inf")

    def rows(self):
        return list(zip(self.grid, self.slack))

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "grid": list(self.grid),
            "slack": list(self.slack),
            "params": {k: v for k, v in self.params.items()},
            "witness": self.witness,
        }


def _finish(kind: str, grid, slack, params, tol, witness_input=None) -> InequalityReport:
    grid = tuple(float(g) for g in grid)
    slack = tuple(float(s) for s in slack)
    bad = [i for i, s in enumerate(slack) if s < -tol]
    witness = None
    if bad:
        worst = min(bad, key=lambda i: slack[i])
        witness = {"parameter": grid[worst], "slack": slack[worst]}
        if witness_input is not None:
            witness["input"] = witness_input
    return InequalityReport(kind=kind, passed=not bad, grid=grid, slack=slack,
                            params=params, witness=witness)


def ei_check(chain: MarkovChain, f, phi: GrowthFunction,
             r_grid=None) -> InequalityReport:
    """Entropy-information inequality Ent(f) <= Phi(I(f)) plus its tangent
    family Ent(f) <= Phi'(r) I(f) + Theta(r) * int f dmu over an r grid.

    The tangent form is the one that survives for non-normalized f; at
    r = I(f) it reproduces the plain slack exactly for densities.
    """
    f = np.asarray(f, dtype=float)
    ent = entropy(chain, f)
    fish = fisher_information(chain, f)
    mass = float(f @ chain.pi)
    normalized = abs(mass - 1.0) <= 1e-8

    if r_grid is None:
        center = fish if fish > 0 else 1.0
        r_grid = center * np.logspace(-2, 2, 41)
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(r_grid <= 0):
        raise BadParams("r grid must be positive")

    lin = phi.derivative(r_grid) * fish + phi.theta(r_grid) * mass - ent
    plain = float(phi.value(fish) - ent) if normalized else None
    tangent = (float(phi.derivative(fish) * fish + phi.theta(fish) * mass - ent)
               if fish > 0 else None)

    grid = list(r_grid)
    slack = list(lin)
    if plain is not None:
        grid.append(fish)
        slack.append(plain)
    scale = 1.0 + abs(ent) + abs(float(phi.value(max(fish, 1e-300))))
    params = {"phi": phi.descriptor, "entropy": ent, "fisher": fish,
              "mass": mass, "plain_slack": plain, "tangent_slack": tangent}
    return _finish("ei", grid, slack, params, PASS_TOL * scale,
                   witness_input=list(map(float, f)))


def bounded_phi_entropy_check(chain: MarkovChain, f,
                              phi: GrowthFunction) -> InequalityReport:
    """For bounded Phi, EI implies Ent(f) <= Phi(inf) * ||f||_1 for every
    positive f; finiteness of the state space in disguise."""
    if not phi.bounded:
        raise BadParams("phi must be bounded; use a delta > 1 growth function")
    f = np.asarray(f, dtype=float)
    ent = entropy(chain, f)
    limit = phi.value_at_infinity()
    slack = limit * float(f @ chain.pi) - ent
    return _finish("ei-bounded", [limit], [slack],
                   {"phi": phi.descriptor, "entropy": ent},
                   PASS_TOL * (1.0 + abs(ent) + limit),
                   witness_input=list(map(float, f)))


@dataclass(frozen=True)
class PoissonSharpness:
    entropy: float
    fisher: float
    ratio: float
    entropy_closed: float
    fisher_closed: float
    ratio_closed: float
    lam: float
    k: float
    cutoff: int


def poisson_sharpness(lam: float, k: float, cutoff: int) -> PoissonSharpness:
    """Ent and I of the exponential tilt f_k = e^{kx - lam(e^k - 1)} under a
    truncated Poisson(lam) measure, against the closed forms
    lam(k e^k - e^k + 1) and lam k (e^k - 1).

    The ratio climbs from 1/2 toward 1 as k grows: no sublinear growth
    function can absorb the whole family.
    """
    if k <= 0:
        raise BadParams("k must be positive for a sharpness ratio")
    chain, f, mass = poisson_test_function(lam, k, cutoff)
    ent = entropy(chain, f)
    fish = fisher_information(chain, f)
    ek = np.exp(k)
    ent_closed = lam * (k * ek - ek + 1.0)
    fish_closed = lam * k * (ek - 1.0)
    return PoissonSharpness(entropy=ent, fisher=fish, ratio=ent / fish,
                            entropy_closed=float(ent_closed),
                            fisher_closed=float(fish_closed),
                            ratio_closed=float(ent_closed / fish_closed),
                            lam=lam, k=k, cutoff=cutoff)


def _log_norm_exp(chain: MarkovChain, g: np.ndarray, p: float) -> float:
    # log ||e^g||_p under pi; p = inf means the max
    if np.isinf(p):
        return float(np.max(g))
    return float(logsumexp(p * g, b=chain.pi) / p)


def ultracontractivity_check(chain: MarkovChain, f, phi: GrowthFunction,
                             t: float = None, uc_rho: float = None,
                             p: float = 1.0, q: float = np.inf) -> InequalityReport:
    """Exponential-moment smoothing along the heat flow.

    With t given (LogGrowth only): log ||e^{P_t f}||_inf <=
    (n/2) log(1 + 1/(2 kappa t)) + log ||e^f||_1, the relaxed closed form.
    With uc_rho given: t and m come from ultracontractivity_params and the
    general p -> q bound is checked at that horizon.
    """
    f = np.asarray(f, dtype=float)
    if (t is None) == (uc_rho is None):
        raise BadParams("give exactly one of t or uc_rho")
    if t is not None:
        if not isinstance(phi, LogGrowth):
            raise BadParams("the fixed-t form needs a LogGrowth certificate")
        if t <= 0:
            raise BadParams("t must be positive")
        log_rhs = (0.5 * phi.n * np.log1p(1.0 / (2.0 * phi.kappa * t))
                   + _log_norm_exp(chain, f, 1.0))
        horizon = float(t)
        q_used = np.inf
    else:
        horizon, m = ultracontractivity_params(phi, p, q, uc_rho)
        log_rhs = m + _log_norm_exp(chain, f, p)
        q_used = q
    log_lhs = _log_norm_exp(chain, evolve(chain, f, horizon), q_used)
    slack = float(log_rhs - log_lhs)
    params = {"phi": phi.descriptor, "t": horizon, "p": p,
              "q": None if np.isinf(q_used) else q_used,
              "log_lhs": log_lhs, "log_rhs": log_rhs}
    return _finish("ultracontractivity", [horizon], [slack], params,
                   PASS_TOL * (1.0 + abs(log_lhs) + abs(log_rhs)),
                   witness_input=list(map(float, f)))


def lipschitz_seminorm(chain: MarkovChain, f) -> float:
    """sqrt of the worst-state carre du champ."""
    return float(np.sqrt(np.max(gamma(chain, f))))


def unit_lipschitz(chain: MarkovChain, f) -> np.ndarray:
    """Scale f to unit Lipschitz seminorm; exact by homogeneity."""
    c = lipschitz_seminorm(chain, f)
    if c == 0.0:
        raise BadParams("constant functions cannot be normalized")
    return np.asarray(f, dtype=float) / c


def fisher_lipschitz_check(chain: MarkovChain, f,
                           s_grid=None) -> InequalityReport:
    """I(e^{sf}) <= C^2 s^2 int e^{sf} dmu with C the Lipschitz seminorm."""
    f = np.asarray(f, dtype=float)
    c = lipschitz_seminorm(chain, f)
    if s_grid is None:
        s_grid = np.linspace(-5.0, 5.0, 41)
    s_grid = np.asarray(s_grid, dtype=float)
    slack = []
    for s in s_grid:
        g = np.exp(s * f)
        lhs = fisher_information(chain, g)
        rhs = c * c * s * s * float(g @ chain.pi)
        slack.append(rhs - lhs)
    scale = 1.0 + max(abs(v) for v in slack)
    return _finish("fisher-lipschitz", s_grid, slack,
                   {"lipschitz": c}, PASS_TOL * scale,
                   witness_input=list(map(float, f)))


def exp_integrability_check(chain: MarkovChain, f, phi: GrowthFunction,
                            t_grid=None,
                            mean_deviation: bool = True) -> InequalityReport:
    """log int e^{tf} dmu <= t int f dmu + |t| * int_0^{|t|} Phi(s^2)/s^2 ds
    for 1-Lipschitz f, plus the sup-deviation bound when the tail integral
    converges.

    Negative t is covered by applying the bound to -f.
    """
    f = np.asarray(f, dtype=float)
    c = lipschitz_seminorm(chain, f)
    if c > 1.0 + 1e-8:
        raise BadParams(f"f must be 1-Lipschitz; seminorm {c:.6g}")
    if t_grid is None:
        t_grid = np.linspace(-5.0, 5.0, 21)
    t_grid = np.asarray(t_grid, dtype=float)
    mean = float(f @ chain.pi)
    slack = []
    for t in t_grid:
        at = abs(float(t))
        bound = t * mean + at * deviation_partial_integral(phi, at)
        lhs = logsumexp(t * f, b=chain.pi)
        slack.append(float(bound - lhs))
    params = {"phi": phi.descriptor, "lipschitz": c, "mean": mean}
    if mean_deviation:
        tail = deviation_tail_integral(phi)  # NonIntegrableGrowth for Linear
        dev = float(np.max(np.abs(f - mean)))
        params["deviation_bound"] = tail
        params["deviation"] = dev
        params["deviation_slack"] = tail - dev
        t_grid = np.append(t_grid, np.inf)
        slack.append(tail - dev)
    scale = 1.0 + max(abs(v) for v in slack)
    return _finish("exp-integrability", t_grid, slack, params,
                   PASS_TOL * scale, witness_input=list(map(float, f)))


def nash_check(chain: MarkovChain, f, alpha: float, beta: float,
               A: float) -> InequalityReport:
    """||f||_2^{2 alpha + 2} <= (A ||f||_2^2 + I(f^2)/beta)^alpha ||f||_1^2,
    compared in log space."""
    if A < 1.0:
        raise BadParams("A must be >= 1")
    if alpha <= 0 or beta <= 0:
        raise BadParams("alpha and beta must be positive")
    f = np.asarray(f, dtype=float)
    if np.any(f == 0.0):
        raise VanishingEntry("f must be nonzero in every state")
    l1 = float(np.abs(f) @ chain.pi)
    l2sq = float((f * f) @ chain.pi)
    fish = fisher_information(chain, f * f)
    log_lhs = (alpha + 1.0) * np.log(l2sq)
    log_rhs = alpha * np.log(A * l2sq + fish / beta) + 2.0 * np.log(l1)
    slack = float(log_rhs - log_lhs)
    params = {"alpha": alpha, "beta": beta, "A": A, "l1": l1,
              "l2_sq": l2sq, "fisher_sq": fish}
    return _finish("nash", [0.0], [slack], params,
                   PASS_TOL * (1.0 + abs(log_lhs) + abs(log_rhs)),
                   witness_input=list(map(float, f)))


@dataclass(frozen=True)
class ResistanceResult:
    value: float
    converged: bool
    kkt_residual: float
    f: tuple
    graph_distance: float
    distance_bound_ok: bool


@dataclass(frozen=True)
class ResistanceDiameter:
    value: float
    pair: tuple
    converged: bool
    results: dict = field(repr=False, default_factory=dict)


def _gamma_gradients(chain: MarkovChain, f: np.ndarray) -> np.ndarray:
    # rows: constraint index z; columns: d Gamma(f)(z) / d f(w)
    K = chain.rates
    diff = f[None, :] - f[:, None]
    grad = K * diff
    np.fill_diagonal(grad, -np.sum(K * diff, axis=1))
    return grad


def _graph_distances(chain: MarkovChain) -> np.ndarray:
    adj = csr_matrix((chain.rates > 0).astype(float))
    return shortest_path(adj, method="D", unweighted=True, directed=False)


def resistance_distance(chain: MarkovChain, x, y, seed: int = 0,
                        starts: int = 4,
                        strict: bool = False) -> ResistanceResult:
    """rho(x, y) = max f(y) - f(x) over Gamma(f) <= 1 everywhere.

    Concave program with quadratic constraints; solved from the rescaled
    graph-distance profile plus perturbed restarts, rescaled back into the
    feasible set, and certified by a nonnegative-multiplier KKT residual.
    """
    from .cd import state_index

    xi = state_index(chain, x)
    yi = state_index(chain, y)
    if xi == yi:
        return ResistanceResult(0.0, True, 0.0, tuple(np.zeros(chain.n)),
                                0.0, True)
    n = chain.n
    free = np.array([i for i in range(n) if i != xi])
    ypos = int(np.nonzero(free == yi)[0][0])

    def embed(v: np.ndarray) -> np.ndarray:
        fv = np.zeros(n)
        fv[free] = v
        return fv

    def rescaled(v: np.ndarray):
        # push to the constraint boundary along the ray; Gamma is quadratic
        fv = embed(v)
        worst = float(np.max(gamma(chain, fv)))
        if worst > 0.0 and fv[yi] > 0.0:
            fv = fv / np.sqrt(worst)
        elif worst > 1.0:
            fv = fv / np.sqrt(worst)
        return fv, float(fv[yi])

    cons = [{
        "type": "ineq",
        "fun": lambda v: 1.0 - gamma(chain, embed(v)),
        "jac": lambda v: -_gamma_gradients(chain, embed(v))[:, free],
    }]

    dists = _graph_distances(chain)
    base = dists[xi]
    g0 = gamma(chain, base)
    v_base = (base / np.sqrt(np.max(g0)))[free]

    rng = np.random.default_rng(seed)
    best_f, best_val = rescaled(v_base)
    for trial in range(starts):
        v0 = v_base if trial == 0 else v_base + 0.3 * rng.normal(size=len(free))
        res = minimize(lambda v: -v[ypos], v0, jac=lambda v: -np.eye(len(free))[ypos],
                       constraints=cons, method="SLSQP",
                       options={"maxiter": 400, "ftol": 1e-12})
        fv, val = rescaled(res.x)
        if val > best_val:
            best_f, best_val = fv, val

    g = gamma(chain, best_f)
    active = np.nonzero(g >= 1.0 - 1e-6)[0]
    if len(active):
        cols = _gamma_gradients(chain, best_f)[active][:, free].T
        target = np.eye(len(free))[ypos]
        _, resid = nnls(cols, target)
        kkt = float(resid)
    else:
        kkt = 1.0  # an unconstrained maximizer of a linear objective cannot exist
    converged = kkt < 1e-6
    if strict and not converged:
        raise SolverNotConverged(
            f"resistance_distance({chain.states[xi]},{chain.states[yi]}): "
            f"KKT residual {kkt:.3e}")

    dist = float(dists[xi, yi])
    m1_sup = local_stats(chain).m1_sup
    bound_ok = dist <= np.sqrt(m1_sup / 2.0) * best_val * (1.0 + 1e-9)
    return ResistanceResult(value=best_val, converged=converged,
                            kkt_residual=kkt,
                            f=tuple(float(v) for v in best_f),
                            graph_distance=dist, distance_bound_ok=bound_ok)


def resistance_diameter(chain: MarkovChain, seed: int = 0,
                        threads: int = 1) -> ResistanceDiameter:
    """Max resistance distance over unordered state pairs."""
    pairs = list(combinations(range(chain.n), 2))

    def solve(pair):
        return pair, resistance_distance(chain, pair[0], pair[1], seed=seed)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            solved = list(pool.map(solve, pairs))
    else:
        solved = [solve(p) for p in pairs]

    results = {(chain.states[i], chain.states[j]): r
               for (i, j), r in solved}
    (pi, pj), best = max(solved, key=lambda item: item[1].value)
    return ResistanceDiameter(value=best.value,
                              pair=(chain.states[pi], chain.states[pj]),
                              converged=all(r.converged for _, r in solved),
                              results=results)
