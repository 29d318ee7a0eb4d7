"""Curvature-dimension verification, falsification and estimation.

The CD condition under test reads, pointwise in x and for every f,

    Psi_{2,Upsilon}(f)(x) >= kappa Psi_Upsilon(f)(x) + F_0(-Lf(x)).

Randomized search cannot certify it, only falsify; the example families ship
constructive certificates, and sampling against those must find nothing.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .cdfunctions import CDFunction, Scaled
from .chains import MarkovChain, local_stats
from .errors import BadParams, DegenerateNeighborhood, MalformedMaps
from .kernels import upsilon, upsilon_prime
from .operators import gamma, gamma2, generator_apply, psi2_upsilon, psi_upsilon
from .sampling import resolve_seed, trial_function, trial_rngs
from .semigroup import entropy, fisher_information

SLACK_REL_TOL = 1e-8


def state_index(chain: MarkovChain, x) -> int:
    if isinstance(x, str):
        try:
            return chain.index[x]
        except KeyError:
            raise BadParams(f"unknown state {x!r}") from None
    i = int(x)
    if not 0 <= i < chain.n:
        raise BadParams(f"state index {i} out of range")
    return i


def cd_slack_all(chain: MarkovChain, f, kappa: float,
                 F: Optional[CDFunction]):
    """Per-state slack and the roundoff tolerance scaled to the terms."""
    psi2 = psi2_upsilon(chain, f)
    kpsi = kappa * psi_upsilon(chain, f)
    if F is None:
        fterm = np.zeros_like(psi2)
    else:
        fterm = np.asarray(F.trivial(-generator_apply(chain, f)))
    slack = psi2 - kpsi - fterm
    tol = SLACK_REL_TOL * (1.0 + np.abs(psi2) + np.abs(kpsi) + np.abs(fterm))
    return slack, tol


def cd_slack(chain: MarkovChain, x, f, kappa: float,
             F: Optional[CDFunction]) -> float:
    slack, _ = cd_slack_all(chain, f, kappa, F)
    return float(slack[state_index(chain, x)])


@dataclass(frozen=True)
class CDVerdict:
    status: str                 # certified-by-family | falsified | passed-sampling
    worst_slack: float
    witness_state: Optional[str]
    witness_f: Optional[tuple]
    trials: int
    seed: int

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "worstSlack": self.worst_slack,
            "witnessState": self.witness_state,
            "witnessF": list(self.witness_f) if self.witness_f is not None else None,
            "trials": self.trials,
            "seed": self.seed,
        }


def _family_certificate(chain: MarkovChain):
    family = chain.meta.get("family")
    if family is None:
        return None
    from .families import make_example

    params = chain.meta.get("family_params", {})
    try:
        return make_example(family, params).certificate
    except BadParams:
        return None


def matches_family_certificate(chain: MarkovChain, kappa: float,
                               F: Optional[CDFunction]) -> bool:
    cert = _family_certificate(chain)
    if cert is None or F is None:
        return False
    return (abs(kappa - cert.kappa) <= 1e-12 * (1.0 + abs(cert.kappa))
            and F.descriptor == cert.cd_function.descriptor)


def verify_cd_random(chain: MarkovChain, kappa: float, F: Optional[CDFunction],
                     trials: int = 10000, seed=None, threads: int = 1) -> CDVerdict:
    """Randomized falsification attempt over seeded trial functions.

    Deterministic for a fixed root seed no matter how trials are scheduled:
    each trial owns a spawned generator, and the reported witness is the
    slack-minimal (trial, state) pair with index tie-breaking.
    """
    if trials < 1:
        raise BadParams("trials must be >= 1")
    root = resolve_seed(seed)
    rngs = trial_rngs(root, trials)
    n = chain.n

    def run_block(indices):
        best = (np.inf, -1, -1, None)        # raw slack, trial, state, f
        violation = (np.inf, -1, -1, None)   # same shape, violations only
        for i in indices:
            f = trial_function(rngs[i], n, i)
            slack, tol = cd_slack_all(chain, f, kappa, F)
            j = int(np.argmin(slack))
            key = (float(slack[j]), i, j)
            if key < best[:3]:
                best = (*key, f)
            bad = np.nonzero(slack < -tol)[0]
            if len(bad):
                jb = int(bad[np.argmin(slack[bad])])
                vkey = (float(slack[jb]), i, jb)
                if vkey < violation[:3]:
                    violation = (*vkey, f)
        return best, violation

    if threads > 1:
        chunks = np.array_split(np.arange(trials), threads * 4)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_block, [c for c in chunks if len(c)]))
    else:
        results = [run_block(range(trials))]

    best = min((r[0] for r in results), key=lambda b: b[:3])
    violation = min((r[1] for r in results), key=lambda b: b[:3])

    worst = float(best[0])
    if violation[3] is not None:
        return CDVerdict(status="falsified", worst_slack=worst,
                         witness_state=chain.states[violation[2]],
                         witness_f=tuple(float(v) for v in violation[3]),
                         trials=trials, seed=root)
    status = ("certified-by-family"
              if matches_family_certificate(chain, kappa, F) else "passed-sampling")
    return CDVerdict(status=status, worst_slack=worst,
                     witness_state=chain.states[best[2]] if best[2] >= 0 else None,
                     witness_f=tuple(float(v) for v in best[3]) if best[3] is not None else None,
                     trials=trials, seed=root)


_VARIANTS = {
    "upsilon": (psi2_upsilon, psi_upsilon),
    "bakry_emery": (gamma2, gamma),
}


@dataclass(frozen=True)
class KappaEstimate:
    value: float
    variant: str
    state: str
    witness_f: tuple
    evaluations: int


def estimate_kappa_infty(chain: MarkovChain, x, variant: str = "upsilon",
                         seed=None, starts: int = 12) -> KappaEstimate:
    """Heuristic inf of Psi_2/Psi (resp. Gamma_2/Gamma) at x over nonconstant
    f supported on the 2-ball of x.

    Every evaluated ratio is an upper bound for any admissible kappa; the
    returned value is exactly the minimum over all evaluated candidates.
    """
    if variant not in _VARIANTS:
        raise BadParams(f"variant must be one of {sorted(_VARIANTS)}")
    num_op, den_op = _VARIANTS[variant]
    xi = state_index(chain, x)
    ball = chain.ball(xi, 2)
    free = ball[ball != xi]
    if len(free) == 0:
        raise DegenerateNeighborhood(f"state {chain.states[xi]} has no neighbors")

    n = chain.n
    record = {"value": np.inf, "f": None, "count": 0}

    def ratio(v) -> float:
        f = np.zeros(n)
        f[free] = v
        den = float(den_op(chain, f)[xi])
        num = float(num_op(chain, f)[xi])
        record["count"] += 1
        # ratios where Psi vanishes put no constraint on kappa
        if den <= 1e-8 * (1.0 + abs(num)):
            return np.inf
        val = num / den
        if val < record["value"]:
            record["value"] = val
            record["f"] = f
        return val

    def objective(v) -> float:
        val = ratio(v)
        return 1e6 if not np.isfinite(val) else val

    # deterministic spike probes along every free direction
    tgrid = np.concatenate([-np.logspace(-2, 1, 10), np.logspace(-2, 1, 10)])
    for j in range(len(free)):
        for t in tgrid:
            v = np.zeros(len(free))
            v[j] = t
            ratio(v)

    rng = np.random.default_rng(resolve_seed(seed))
    for _ in range(starts):
        v0 = rng.normal(size=len(free))
        minimize(objective, v0, method="Nelder-Mead",
                 options={"maxiter": 400 * len(free), "xatol": 1e-10,
                          "fatol": 1e-12})

    # scaling ladder on the best shape found: small amplitudes approach the
    # Gamma_2/Gamma limit from the Upsilon side
    if record["f"] is not None:
        shape = record["f"][free].copy()
        for lam in (0.3, 0.1, 0.03, 0.01, 3e-3, 1e-3):
            ratio(lam * shape)

    return KappaEstimate(value=float(record["value"]), variant=variant,
                         state=chain.states[xi],
                         witness_f=tuple(record["f"]) if record["f"] is not None else (),
                         evaluations=record["count"])


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    infinite: bool
    state: str
    witness_f: Optional[tuple]
    evaluations: int


def estimate_dimension(chain: MarkovChain, x, kappa: float, delta: float = 1.0,
                       seed=None, samples: int = 200) -> DimensionEstimate:
    """Heuristic sup of (-Lf(x))^(1+delta) / (Psi_2 - kappa Psi)(f)(x) over f
    with -Lf(x) > 0; flags +infinity when a sample drives the denominator
    nonpositive while the numerator stays positive."""
    if delta < 1:
        raise BadParams("delta must be >= 1")
    xi = state_index(chain, x)
    ball = chain.ball(xi, 2)
    free = ball[ball != xi]
    if len(free) == 0:
        raise DegenerateNeighborhood(f"state {chain.states[xi]} has no neighbors")
    n = chain.n

    record = {"value": 0.0, "f": None, "count": 0, "infinite": False}

    def ratio(v) -> float:
        f = np.zeros(n)
        f[free] = v
        d = -float(generator_apply(chain, f)[xi])
        record["count"] += 1
        if d <= 0:
            return 0.0
        psi2 = float(psi2_upsilon(chain, f)[xi])
        kpsi = kappa * float(psi_upsilon(chain, f)[xi])
        den = psi2 - kpsi
        tol = 1e-10 * (1.0 + abs(psi2) + abs(kpsi))
        if den <= tol:
            record["infinite"] = True
            record["f"] = f
            return np.inf
        val = d ** (1.0 + delta) / den
        if val > record["value"]:
            record["value"] = val
            record["f"] = f
        return val

    # descending two-step ramps through each neighbor, the probe family that
    # exposes unbounded dimension on birth-death chains
    sgrid = np.concatenate([-np.logspace(-2, 1.2, 24), np.logspace(-2, 1.2, 24)])
    nbrs_x = set(int(v) for v in chain.neighbors(xi))
    for y in chain.neighbors(xi):
        second = [int(z) for z in chain.neighbors(int(y))
                  if int(z) != xi and int(z) not in nbrs_x]
        for s in sgrid:
            v = np.zeros(len(free))
            v[free == y] = s
            for z in second:
                v[free == z] = 2.0 * s
            ratio(v)
            if record["infinite"]:
                break
        if record["infinite"]:
            break

    if not record["infinite"]:
        rngs = trial_rngs(resolve_seed(seed), samples)
        for i, rng in enumerate(rngs):
            ratio(trial_function(rng, n, i)[free])
            if record["infinite"]:
                break

    if not record["infinite"] and record["f"] is not None:
        def neg(v):
            val = ratio(v)
            return -val if np.isfinite(val) else -1e12

        minimize(neg, record["f"][free], method="Nelder-Mead",
                 options={"maxiter": 200 * len(free)})

    return DimensionEstimate(
        value=float("inf") if record["infinite"] else float(record["value"]),
        infinite=record["infinite"], state=chain.states[xi],
        witness_f=tuple(record["f"]) if record["f"] is not None else None,
        evaluations=record["count"])


def gamma_hypothesis_slack(chain: MarkovChain, f, kappa: float,
                           gamma_fun: CDFunction, alpha) -> np.ndarray:
    """Pointwise slack of Psi_2 >= kappa Psi + alpha(x) sum_y k(x,y)
    gamma(|f(x)-f(y)|), the hypothesis behind the Jensen dimension bound."""
    f = np.asarray(f, dtype=float)
    alpha = np.broadcast_to(np.asarray(alpha, dtype=float), (chain.n,))
    diffs = np.abs(f[None, :] - f[:, None])
    term = alpha * (chain.rates * gamma_fun.value(diffs)).sum(axis=1)
    return psi2_upsilon(chain, f) - kappa * psi_upsilon(chain, f) - term


def jensen_dimension_bound(chain: MarkovChain, kappa: float,
                           gamma_fun: CDFunction, alpha,
                           m1_bound: Optional[float] = None,
                           check_samples: int = 0, seed=None) -> Optional[CDFunction]:
    """F(r) = alpha_min * M_inf * gamma(r / M_sup) from the pointwise gamma
    hypothesis via Jensen.

    m1_bound, when given, replaces both M_1 extremes by a uniform bound (any
    value >= M_{1,sup} keeps the conclusion valid and yields the uniform
    family form). Returns None when alpha vanishes: no dimension term.
    """
    alpha = np.broadcast_to(np.asarray(alpha, dtype=float), (chain.n,))
    if np.any(alpha < 0):
        raise BadParams("alpha must be nonnegative")
    a_star = float(alpha.min())
    if check_samples > 0:
        rngs = trial_rngs(resolve_seed(seed), check_samples)
        for i, rng in enumerate(rngs):
            f = trial_function(rng, chain.n, i)
            slack = gamma_hypothesis_slack(chain, f, kappa, gamma_fun, alpha)
            scale = 1.0 + np.abs(psi2_upsilon(chain, f))
            if np.any(slack < -SLACK_REL_TOL * scale):
                raise BadParams("gamma hypothesis fails on a sampled function")
    if a_star == 0.0:
        return None
    stats = local_stats(chain)
    m_inf = float(m1_bound) if m1_bound is not None else stats.m1_inf
    m_sup = float(m1_bound) if m1_bound is not None else stats.m1_sup
    if m1_bound is not None and m1_bound < stats.m1_sup:
        raise BadParams("m1_bound must dominate M_1 everywhere")
    return Scaled(base=gamma_fun, amplitude=a_star * m_inf, stretch=m_sup)


@dataclass(frozen=True)
class NegativeCriterionRow:
    state: str
    n_over_m1sq: float
    min_value: float
    argmin_t: float
    violated: bool


def negative_criterion(chain: MarkovChain, states=None, n: float = 1.0,
                       t_lo: float = -40.0) -> list[NegativeCriterionRow]:
    """Spike-function criterion against CD_Upsilon(0, n).

    For the spike f = t off x, 0 at x, the condition forces

        g(t) = (N/M1^2)(Y'(t) t + Y(-t)) + Y'(t) t - Y(t) - t^2/n >= 0

    for all t < 0 (Y = Upsilon). A strictly negative minimum certifies that
    CD_Upsilon(0, n) fails at x.
    """
    if n <= 0:
        raise BadParams("n must be positive")
    stats = local_stats(chain)
    if states is None:
        idxs = list(range(chain.n))
    else:
        idxs = [state_index(chain, s) for s in states]
    if not idxs:
        raise BadParams("need at least one state")

    t = np.linspace(t_lo, -1e-9, 20001)
    up_t = upsilon_prime(t) * t
    base = up_t - upsilon(t) - t * t / n
    sym = up_t + upsilon(-t)
    rows = []
    for i in idxs:
        r = float(stats.n_stat[i] / stats.m1[i] ** 2)
        g = r * sym + base
        j = int(np.argmin(g))
        gmin, tmin = float(g[j]), float(t[j])
        rows.append(NegativeCriterionRow(
            state=chain.states[i], n_over_m1sq=r, min_value=gmin,
            argmin_t=tmin, violated=gmin < -1e-10))
    return rows


@dataclass(frozen=True)
class IndicatorProbe:
    entropy_closed: float
    fisher_closed: float
    entropy_direct: float
    fisher_direct: float
    f: tuple


def indicator_probe(chain: MarkovChain, x, epsilon: float) -> IndicatorProbe:
    """Near-indicator density f_x: epsilon off x, mass-preserving at x.

    Closed forms for Ent and I are evaluated alongside the generic
    functionals; the pair must agree to roundoff.
    """
    if not 0.0 < epsilon < 1.0:
        raise BadParams("epsilon must lie in (0, 1)")
    xi = state_index(chain, x)
    px = float(chain.pi[xi])
    head = 1.0 - epsilon * (1.0 - px)
    f = np.full(chain.n, epsilon)
    f[xi] = head / px

    ent_closed = head * np.log(head / px) + epsilon * np.log(epsilon) * (1.0 - px)
    m1x = float(chain.rates[xi].sum())
    fisher_closed = m1x * (1.0 - epsilon) * np.log(head / (epsilon * px))
    return IndicatorProbe(entropy_closed=float(ent_closed),
                          fisher_closed=float(fisher_closed),
                          entropy_direct=entropy(chain, f),
                          fisher_direct=fisher_information(chain, f),
                          f=tuple(f))


@dataclass(frozen=True)
class RicciFlatReport:
    ok: bool
    failed_condition: Optional[str]
    location: Optional[dict]

    def __bool__(self):
        return self.ok


def ricci_flat_check(chain: MarkovChain, eta: np.ndarray) -> RicciFlatReport:
    """Literal check of the four structure-map conditions on a d-regular
    unweighted graph: maps send each state to a distinct neighbor, are
    involutive, and commute as set families."""
    eta = np.asarray(eta)
    if eta.ndim != 2 or eta.shape[1] != chain.n:
        raise MalformedMaps(f"eta must be (d, {chain.n}); got {eta.shape}")
    if not np.issubdtype(eta.dtype, np.integer):
        raise MalformedMaps("eta entries must be state indices")
    if np.any(eta < 0) or np.any(eta >= chain.n):
        raise MalformedMaps("eta entries out of state range")
    K = chain.rates
    off = K[~np.eye(chain.n, dtype=bool)]
    if not np.all(np.isin(off, (0.0, 1.0))):
        raise BadParams("graph must be unweighted (unit rates)")
    degrees = K.sum(axis=1)
    if not np.all(degrees == degrees[0]):
        raise BadParams("graph must be regular")
    d = int(degrees[0])
    if eta.shape[0] != d:
        raise MalformedMaps(f"need {d} maps for a {d}-regular graph; "
                            f"got {eta.shape[0]}")

    for i in range(d):
        for u in range(chain.n):
            v = int(eta[i, u])
            if v == u or K[u, v] != 1.0:
                return RicciFlatReport(False, "i", {"i": i, "u": chain.states[u]})
    for u in range(chain.n):
        targets = eta[:, u]
        if len(set(int(v) for v in targets)) != d:
            return RicciFlatReport(False, "ii", {"u": chain.states[u]})
    for x in range(chain.n):
        for i in range(d):
            lhs = {int(eta[j, eta[i, x]]) for j in range(d)}
            rhs = {int(eta[i, eta[j, x]]) for j in range(d)}
            if lhs != rhs:
                return RicciFlatReport(False, "iii", {"i": i, "x": chain.states[x]})
    for i in range(d):
        bad = eta[i, eta[i]] != np.arange(chain.n)
        if np.any(bad):
            u = int(np.nonzero(bad)[0][0])
            return RicciFlatReport(False, "iv", {"i": i, "u": chain.states[u]})
    return RicciFlatReport(True, None, None)
