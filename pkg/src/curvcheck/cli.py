"""Command-line front end.

Thin client over the service handlers: parse argv into request models, run,
render. Exit codes: 0 success, 2 inadmissible input, 3 mathematical failure
(falsified condition, violated bound, or a computation that could not
produce a trustworthy result). JSON artifacts are byte-identical for
identical argv and seed; every JSON report embeds the chain spec hash, the
resolved seed, and the tool version.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from pydantic import ValidationError

from . import __version__
from .errors import BadParams, InputError, MathError
from .service import handlers, models

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MATH = 3


# ------------------------------------------------------------------- I/O

def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    p = Path(path)
    if not p.is_file():
        raise BadParams(f"no such file: {path}")
    return p.read_text()


def _load_chain_spec(path: str) -> models.ChainSpec:
    try:
        data = json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise BadParams(f"chain spec is not valid JSON: {e}") from e
    return models.ChainSpec.model_validate(data)


def _load_density(path: str) -> list[float]:
    try:
        data = json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise BadParams(f"density file is not valid JSON: {e}") from e
    if not isinstance(data, list):
        raise BadParams("density file must be a JSON array of numbers")
    return [float(v) for v in data]


def _emit_json(payload: dict, path: str) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit_csv(header: list[str], rows: list, path: str) -> None:
    if path == "-":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _emit(args, resp, human: list[str], csv_header: list[str],
          csv_rows: list) -> None:
    to_stdout = args.json == "-" or args.csv == "-"
    if args.json == "-" and args.csv == "-":
        raise BadParams("only one of --json/--csv may write to stdout")
    if not to_stdout:
        for line in human:
            print(line)
    if args.json:
        _emit_json(resp.model_dump(mode="json"), args.json)
    if args.csv:
        _emit_csv(csv_header, csv_rows, args.csv)


def _fmt(x, digits: int = 9) -> str:
    if x is None:
        return "n/a"
    return f"{x:.{digits}g}"


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    return os.cpu_count() or 1


# ------------------------------------------------------------- subcommands

def _run_chain_check(args) -> int:
    req = models.ChainCheckRequest(chain=_load_chain_spec(args.spec),
                                   tol=args.tol)
    resp = handlers.handle_chain_check(req)
    human = [f"chain ok: {len(resp.states)} states, reversible "
             f"(hash {resp.meta.spec_hash})",
             f"m1 range [{_fmt(resp.stats.m1_inf)}, {_fmt(resp.stats.m1_sup)}]"]
    if resp.family:
        human.append(f"family: {resp.family}")
    if resp.certificate:
        human.append(f"certificate: kappa={_fmt(resp.certificate.kappa)}, "
                     f"F={resp.certificate.cdfun}")
    rows = [[s, _fmt(p, 12), _fmt(m1, 12), _fmt(m2, 12), _fmt(ns, 12)]
            for s, p, m1, m2, ns in zip(resp.states, resp.pi, resp.stats.m1,
                                        resp.stats.m2, resp.stats.n_stat)]
    _emit(args, resp, human, ["state", "pi", "m1", "m2", "n_stat"], rows)
    return EXIT_OK


def _run_curvature(args) -> int:
    req = models.CurvatureRequest(chain=_load_chain_spec(args.spec),
                                  variant=args.variant, state=args.state,
                                  seed=args.seed, starts=args.starts)
    resp = handlers.handle_curvature(req)
    human = [f"kappa_infty estimates ({resp.variant} variant, "
             f"seed {resp.meta.seed}):"]
    human += [f"  state {r.state}: {_fmt(r.kappa)}" for r in resp.rows]
    human.append(f"minimum: {_fmt(resp.minimum)}")
    rows = [[r.state, _fmt(r.kappa, 12), r.evaluations] for r in resp.rows]
    _emit(args, resp, human, ["state", "kappa", "evaluations"], rows)
    return EXIT_OK


def _run_cd_verify(args) -> int:
    req = models.CDVerifyRequest(chain=_load_chain_spec(args.spec),
                                 kappa=args.kappa, cdfun=args.cdfun,
                                 trials=args.trials, seed=args.seed,
                                 threads=_threads(args))
    resp = handlers.handle_cd_verify(req)
    fdesc = resp.cdfun if resp.cdfun is not None else "none"
    human = [f"CD(kappa={_fmt(resp.kappa)}, F={fdesc}): {resp.status}",
             f"worst slack {_fmt(resp.worst_slack)} over {resp.trials} trials "
             f"(seed {resp.meta.seed})"]
    if resp.status == "falsified":
        human.append(f"witness state {resp.witness_state}")
    rows = [[resp.status, _fmt(resp.worst_slack, 12), resp.witness_state,
             resp.trials, resp.meta.seed]]
    _emit(args, resp, human,
          ["status", "worst_slack", "witness_state", "trials", "seed"], rows)
    return EXIT_MATH if resp.status == "falsified" else EXIT_OK


def _run_entropy_decay(args) -> int:
    if args.spec == "-" and args.density == "-":
        raise BadParams("spec and density cannot both read stdin")
    req = models.EntropyDecayRequest(chain=_load_chain_spec(args.spec),
                                     density=_load_density(args.density),
                                     grid=args.grid, kappa=args.kappa,
                                     cdfun=args.cdfun)
    resp = handlers.handle_entropy_decay(req)
    human = []
    if resp.kappa is not None:
        fdesc = resp.cdfun if resp.cdfun is not None else "none"
        verdict = "holds" if resp.ok else "VIOLATED"
        human.append(f"entropy ODE against kappa={_fmt(resp.kappa)}, "
                     f"F={fdesc}: {verdict} "
                     f"(min slack {_fmt(resp.min_slack)})")
    else:
        human.append("no (kappa, F) supplied and no family certificate; "
                     "trajectory only")
    if resp.clamped:
        human.append("warning: positivity floor hit during evolution")
    human.append(f"{'t':>12} {'Lambda':>14} {'Lambda_prime':>14} "
                 f"{'Lambda_pprime':>14}")
    for r in resp.rows:
        human.append(f"{r.t:>12.6g} {r.lam:>14.6e} {r.lam_prime:>14.6e} "
                     f"{r.lam_pprime:>14.6e}")
    rows = [[_fmt(r.t, 12), _fmt(r.lam, 12), _fmt(r.lam_prime, 12),
             _fmt(r.lam_pprime, 12),
             "" if r.slack is None else _fmt(r.slack, 12)]
            for r in resp.rows]
    _emit(args, resp, human,
          ["t", "lambda", "lambda_prime", "lambda_pprime", "slack"], rows)
    if resp.ok is False:
        return EXIT_MATH
    return EXIT_OK


def _run_diameter(args) -> int:
    req = models.DiameterRequest(chain=_load_chain_spec(args.spec),
                                 seed=args.seed, threads=_threads(args))
    resp = handlers.handle_diameter(req)
    human = [f"resistance diameter {_fmt(resp.diameter)} attained at "
             f"({resp.pair[0]}, {resp.pair[1]})"]
    if resp.bound is not None:
        word = "holds" if resp.bound_ok else "VIOLATED"
        human.append(f"certificate bound pi*sqrt(n/kappa) = "
                     f"{_fmt(resp.bound)}; diameter <= bound: {word}")
    else:
        human.append("no power-type certificate; no diameter bound to check")
    if not resp.converged:
        human.append("warning: at least one pair solver missed its KKT "
                     "tolerance")
    rows = [[p.x, p.y, _fmt(p.rho, 12), p.converged] for p in resp.pairs]
    _emit(args, resp, human, ["x", "y", "rho", "converged"], rows)
    if resp.bound_ok is False or not resp.converged:
        return EXIT_MATH
    return EXIT_OK


def _run_inequalities(args) -> int:
    suites = [s.strip() for s in args.suite.split(",") if s.strip()]
    req = models.InequalitiesRequest(chain=_load_chain_spec(args.spec),
                                     growth=args.growth, suite=suites,
                                     trials=args.trials, seed=args.seed)
    resp = handlers.handle_inequalities(req)
    human = [f"growth {resp.growth}, {args.trials} samples per suite, "
             f"seed {resp.meta.seed}"]
    for s in resp.suites:
        word = "pass" if s.passed else "FAIL"
        human.append(f"suite {s.kind}: {word} "
                     f"(min slack {_fmt(s.min_slack)})")
    rows = [[s.kind, _fmt(g, 12), _fmt(sl, 12)]
            for s in resp.suites for g, sl in s.sweep]
    _emit(args, resp, human, ["suite", "parameter", "slack"], rows)
    return EXIT_OK if resp.passed else EXIT_MATH


def _parse_scalar(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def _parse_params(tokens: list[str]) -> dict:
    params = {}
    for tok in tokens:
        if "=" not in tok:
            raise BadParams(f"family params look like key=value; got {tok!r}")
        key, value = tok.split("=", 1)
        if "," in value:
            params[key] = [_parse_scalar(v) for v in value.split(",")]
        else:
            params[key] = _parse_scalar(value)
    return params


def _run_example(args) -> int:
    req = models.ExampleRequest(family=args.family,
                                params=_parse_params(args.params))
    resp = handlers.handle_example(req)
    if args.emit == "spec":
        # family form keeps the certificate discoverable downstream
        spec = {"family": resp.family, "params": resp.params}
        sys.stdout.write(json.dumps(spec, sort_keys=True) + "\n")
        return EXIT_OK
    human = [f"{resp.family} with params {resp.params} "
             f"({len(resp.spec['states'])} states, hash {resp.meta.spec_hash})"]
    if resp.certificate:
        human.append(f"certificate: kappa={_fmt(resp.certificate.kappa)}, "
                     f"F={resp.certificate.cdfun}")
    else:
        human.append("no certificate for this family")
    if resp.notes:
        human.append(f"notes: {resp.notes}")
    rows = [[x, y, _fmt(v, 12)] for x, y, v in resp.spec["rates"]]
    _emit(args, resp, human, ["x", "y", "rate"], rows)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", metavar="PATH",
                   help="write the JSON report to PATH ('-' for stdout)")
    p.add_argument("--csv", metavar="PATH",
                   help="write CSV rows to PATH ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvcheck",
        description="Curvature-dimension diagnostics for reversible "
                    "continuous-time Markov chains.")
    parser.add_argument("--version", action="version",
                        version=f"curvcheck {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    chain = sub.add_parser("chain", help="chain spec utilities")
    chain_sub = chain.add_subparsers(dest="action", required=True)
    check = chain_sub.add_parser("check",
                                 help="validate a chain spec, print stats")
    check.add_argument("spec", help="chain spec JSON path ('-' for stdin)")
    check.add_argument("--tol", type=float, default=1e-10,
                       help="relative tolerance for measure identities")
    _add_output_flags(check)
    check.set_defaults(run=_run_chain_check)

    curv = sub.add_parser("curvature", help="estimate kappa_infty per state")
    curv.add_argument("spec")
    curv.add_argument("--variant", choices=["upsilon", "be"],
                      default="upsilon")
    curv.add_argument("--state", help="restrict to one state label")
    curv.add_argument("--seed", type=int)
    curv.add_argument("--starts", type=int, default=12)
    _add_output_flags(curv)
    curv.set_defaults(run=_run_curvature)

    cd = sub.add_parser("cd", help="curvature-dimension conditions")
    cd_sub = cd.add_subparsers(dest="action", required=True)
    verify = cd_sub.add_parser("verify",
                               help="randomized falsification of CD(kappa,F)")
    verify.add_argument("spec")
    verify.add_argument("--kappa", type=float, required=True)
    verify.add_argument("--cdfun", help="CD function descriptor, e.g. "
                                        "power:n=12,delta=1 or nu:2,5,scale=3")
    verify.add_argument("--trials", type=int, default=10000)
    verify.add_argument("--seed", type=int)
    verify.add_argument("--threads", type=int,
                        help="worker threads (default: available cores); "
                             "results do not depend on this")
    _add_output_flags(verify)
    verify.set_defaults(run=_run_cd_verify)

    ent = sub.add_parser("entropy-decay",
                         help="entropy trajectory and ODE slack")
    ent.add_argument("spec")
    ent.add_argument("--density", required=True,
                     help="JSON array of density values ('-' for stdin)")
    ent.add_argument("--grid", default="geom:t0=0.01,ratio=1.6,count=12",
                     help="time grid descriptor geom:t0=..,ratio=..,count=..")
    ent.add_argument("--kappa", type=float,
                     help="override the certificate curvature")
    ent.add_argument("--cdfun", help="override the certificate CD function")
    _add_output_flags(ent)
    ent.set_defaults(run=_run_entropy_decay)

    diam = sub.add_parser("diameter",
                          help="resistance diameter and certificate bound")
    diam.add_argument("spec")
    diam.add_argument("--seed", type=int)
    diam.add_argument("--threads", type=int,
                      help="worker threads (default: available cores); "
                           "results do not depend on this")
    _add_output_flags(diam)
    diam.set_defaults(run=_run_diameter)

    ineq = sub.add_parser("inequalities",
                          help="entropy-information, smoothing, Lipschitz, "
                               "Nash suites")
    ineq.add_argument("spec")
    ineq.add_argument("--suite", default="ei,ultra,lip,nash",
                      help="comma-separated subset of ei,ultra,lip,nash")
    ineq.add_argument("--growth", required=True,
                      help="growth descriptor, e.g. log:n=12,kappa=1.732")
    ineq.add_argument("--trials", type=int, default=1000)
    ineq.add_argument("--seed", type=int)
    _add_output_flags(ineq)
    ineq.set_defaults(run=_run_inequalities)

    ex = sub.add_parser("example", help="build a named example chain")
    ex.add_argument("family")
    ex.add_argument("params", nargs="*",
                    help="key=value pairs, lists comma-separated (l=1,2,3)")
    ex.add_argument("--emit", choices=["report", "spec"], default="report",
                    help="'spec' prints a pipeable chain spec JSON")
    _add_output_flags(ex)
    ex.set_defaults(run=_run_example)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except ValidationError as e:
        first = e.errors()[0]
        loc = ".".join(str(p) for p in first["loc"])
        print(f"input error: {loc}: {first['msg']}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as e:
        print(f"input error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT
    except MathError as e:
        print(f"math failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
