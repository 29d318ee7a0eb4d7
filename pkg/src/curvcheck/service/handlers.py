"""Request handlers shared by the HTTP routes and the CLI.

Each handler is a pure function from a request model to a response model;
domain exceptions (InputError/MathError subclasses) propagate to the caller,
which maps them to HTTP statuses or exit codes.
"""

from __future__ import annotations

import math
import re
from typing import Optional

import numpy as np

from .. import __version__
from ..cd import _family_certificate, estimate_kappa_infty, verify_cd_random
from ..cdfunctions import PowerType, parse_cd_descriptor
from ..chains import MarkovChain, build_chain, local_stats
from ..errors import BadParams
from ..growth import LogGrowth, parse_growth_descriptor
from ..inequalities import (
    InequalityReport,
    ei_check,
    exp_integrability_check,
    nash_check,
    resistance_diameter,
    ultracontractivity_check,
    unit_lipschitz,
)
from ..sampling import random_density, random_nonvanishing, resolve_seed, trial_rngs
from ..semigroup import check_entropy_ode, entropy_trajectory, geometric_grid
from . import models

ULTRA_T_GRID = (0.01, 0.1, 1.0)


def build(spec: models.ChainSpec) -> MarkovChain:
    return build_chain(spec.as_build_dict())


def _meta(chain: MarkovChain, seed: int) -> models.ReportMeta:
    return models.ReportMeta(spec_hash=chain.spec_hash(), seed=int(seed),
                             tool_version=__version__)


def _certificate_model(chain: MarkovChain) -> Optional[models.CertificateModel]:
    cert = _family_certificate(chain)
    if cert is None:
        return None
    return models.CertificateModel(kappa=float(cert.kappa),
                                   cdfun=cert.cd_function.descriptor)


def parse_time_grid(text: str) -> np.ndarray:
    """Grid descriptors: geom:t0=...,ratio=...,count=... for now."""
    m = re.fullmatch(r"geom:t0=([^,]+),ratio=([^,]+),count=(\d+)", text.strip())
    if not m:
        raise BadParams(f"unrecognized grid descriptor {text!r}; "
                        "expected geom:t0=...,ratio=...,count=...")
    try:
        return geometric_grid(float(m.group(1)), float(m.group(2)),
                              int(m.group(3)))
    except ValueError as e:
        raise BadParams(f"bad grid numbers in {text!r}: {e}") from e


def handle_chain_check(req: models.ChainCheckRequest) -> models.ChainCheckResponse:
    chain = build_chain(req.chain.as_build_dict(), tol=req.tol)
    stats = local_stats(chain)
    return models.ChainCheckResponse(
        meta=_meta(chain, resolve_seed(None)),
        states=list(chain.states),
        reversible=True,
        pi=[float(p) for p in chain.pi],
        stats=models.LocalStatsModel(
            m1=[float(v) for v in stats.m1],
            m2=[float(v) for v in stats.m2],
            n_stat=[float(v) for v in stats.n_stat],
            m1_inf=stats.m1_inf,
            m1_sup=stats.m1_sup,
        ),
        family=chain.meta.get("family"),
        certificate=_certificate_model(chain),
    )


def handle_curvature(req: models.CurvatureRequest) -> models.CurvatureResponse:
    chain = build(req.chain)
    seed = resolve_seed(req.seed)
    variant = "bakry_emery" if req.variant == "be" else req.variant
    targets = [req.state] if req.state is not None else list(chain.states)
    rows = []
    for s in targets:
        est = estimate_kappa_infty(chain, s, variant=variant, seed=seed,
                                   starts=req.starts)
        rows.append(models.KappaRow(state=est.state, kappa=float(est.value),
                                    evaluations=est.evaluations))
    return models.CurvatureResponse(
        meta=_meta(chain, seed),
        variant=variant,
        rows=rows,
        minimum=float(min(r.kappa for r in rows)),
    )


def handle_cd_verify(req: models.CDVerifyRequest) -> models.CDVerifyResponse:
    chain = build(req.chain)
    F = parse_cd_descriptor(req.cdfun) if req.cdfun is not None else None
    verdict = verify_cd_random(chain, req.kappa, F, trials=req.trials,
                               seed=req.seed, threads=req.threads)
    return models.CDVerifyResponse(
        meta=_meta(chain, verdict.seed),
        kappa=req.kappa,
        cdfun=F.descriptor if F is not None else None,
        status=verdict.status,
        worst_slack=float(verdict.worst_slack),
        witness_state=verdict.witness_state,
        witness_f=list(verdict.witness_f) if verdict.witness_f is not None else None,
        trials=verdict.trials,
    )


def handle_entropy_decay(req: models.EntropyDecayRequest) -> models.EntropyDecayResponse:
    chain = build(req.chain)
    times = parse_time_grid(req.grid)
    traj = entropy_trajectory(chain, np.asarray(req.density, dtype=float), times)

    kappa, F = req.kappa, None
    if req.cdfun is not None:
        if kappa is None:
            raise BadParams("cdfun without kappa; give both or neither")
        F = parse_cd_descriptor(req.cdfun)
    if kappa is None:
        cert = _family_certificate(chain)
        if cert is not None:
            kappa, F = cert.kappa, cert.cd_function
    report = check_entropy_ode(traj, kappa, F) if kappa is not None else None

    rows = []
    for j, (t, lam, lp, lpp) in enumerate(traj.rows()):
        slack = float(report.slack[j]) if report is not None else None
        rows.append(models.TrajectoryRow(t=float(t), lam=float(lam),
                                         lam_prime=float(lp),
                                         lam_pprime=float(lpp), slack=slack))
    return models.EntropyDecayResponse(
        meta=_meta(chain, resolve_seed(None)),
        rows=rows,
        kappa=float(kappa) if kappa is not None else None,
        cdfun=F.descriptor if F is not None else None,
        min_slack=report.min_slack if report is not None else None,
        ok=report.ok if report is not None else None,
        clamped=traj.clamped,
    )


def handle_diameter(req: models.DiameterRequest) -> models.DiameterResponse:
    chain = build(req.chain)
    seed = resolve_seed(req.seed)
    diam = resistance_diameter(chain, seed=seed, threads=req.threads)

    bound = bound_ok = None
    cert = _family_certificate(chain)
    if (cert is not None and cert.kappa > 0
            and isinstance(cert.cd_function, PowerType)
            and cert.cd_function.delta == 1.0):
        bound = float(math.pi * math.sqrt(cert.cd_function.n / cert.kappa))
        bound_ok = bool(diam.value <= bound * (1.0 + 1e-9))

    pairs = [models.PairRow(x=x, y=y, rho=float(r.value), converged=r.converged)
             for (x, y), r in sorted(diam.results.items())]
    return models.DiameterResponse(
        meta=_meta(chain, seed),
        diameter=float(diam.value),
        pair=diam.pair,
        converged=diam.converged,
        bound=bound,
        bound_ok=bound_ok,
        pairs=pairs,
    )


def _clean_params(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if isinstance(v, float) and not math.isfinite(v):
            out[k] = None
        else:
            out[k] = v
    return out


def _suite_report(kind: str, reports: list, params: dict) -> models.SuiteReport:
    worst = min(range(len(reports)), key=lambda i: reports[i].min_slack())
    sweep = [(float(g), float(s)) for g, s in reports[worst].rows()
             if math.isfinite(g)]
    return models.SuiteReport(
        kind=kind,
        passed=all(r.passed for r in reports),
        samples=len(reports),
        min_slack=float(reports[worst].min_slack()),
        worst_sample=worst,
        sweep=sweep,
        params=_clean_params(params),
    )


def handle_inequalities(req: models.InequalitiesRequest) -> models.InequalitiesResponse:
    chain = build(req.chain)
    phi = parse_growth_descriptor(req.growth)
    seed = resolve_seed(req.seed)
    n = chain.n
    suites = []

    for suite in req.suite:
        rngs = trial_rngs(seed, req.trials)
        if suite == "ei":
            reports = [ei_check(chain, random_density(rng, chain.pi), phi)
                       for rng in rngs]
            suites.append(_suite_report("ei", reports, {"growth": phi.descriptor}))
        elif suite == "ultra":
            reports = []
            for rng in rngs:
                f = rng.normal(size=n)
                per_t = [ultracontractivity_check(chain, f, phi, t=t)
                         for t in ULTRA_T_GRID]
                slack = [r.slack[0] for r in per_t]
                reports.append(_merge_sweeps(per_t, ULTRA_T_GRID, slack))
            suites.append(_suite_report("ultra", reports,
                                        {"growth": phi.descriptor,
                                         "t_grid": list(ULTRA_T_GRID)}))
        elif suite == "lip":
            reports = [exp_integrability_check(
                chain, unit_lipschitz(chain, rng.normal(size=n)), phi)
                for rng in rngs]
            suites.append(_suite_report("lip", reports,
                                        {"growth": phi.descriptor}))
        elif suite == "nash":
            if not isinstance(phi, LogGrowth):
                raise BadParams("nash suite derives (alpha, beta) from a "
                                "log growth descriptor; got "
                                f"{phi.descriptor!r}")
            alpha, beta, A = phi.n / 2.0, phi.kappa * phi.n, 1.0
            reports = [nash_check(chain, random_nonvanishing(rng, n),
                                  alpha, beta, A) for rng in rngs]
            suites.append(_suite_report("nash", reports,
                                        {"alpha": alpha, "beta": beta, "A": A}))

    return models.InequalitiesResponse(
        meta=_meta(chain, seed),
        growth=phi.descriptor,
        suites=suites,
        passed=all(s.passed for s in suites),
    )


def _merge_sweeps(reports: list, grid, slack):
    # collapse per-t ultracontractivity reports into one sweep-shaped report
    return InequalityReport(
        kind="ultracontractivity",
        passed=all(r.passed for r in reports),
        grid=tuple(float(t) for t in grid),
        slack=tuple(float(s) for s in slack),
        params=reports[0].params,
        witness=None,
    )


def handle_example(req: models.ExampleRequest) -> models.ExampleResponse:
    from ..families import make_example

    result = make_example(req.family, req.params)
    chain = result.chain
    cert = result.certificate
    return models.ExampleResponse(
        meta=_meta(chain, resolve_seed(None)),
        family=req.family,
        params=chain.meta.get("family_params", dict(req.params)),
        spec=chain.as_spec(),
        certificate=(models.CertificateModel(kappa=float(cert.kappa),
                                             cdfun=cert.cd_function.descriptor)
                     if cert is not None else None),
        notes=result.notes,
    )
