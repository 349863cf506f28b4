"""Command-line front end.

Exit codes: 0 ok, 1 verification failed, 2 precondition or bad input,
3 parse error, 4 resource limit.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import gens
from .bounds import compute_bounds
from .cover import (
    CliqueCover,
    SetRepresentation,
    format_certificate,
    lint_certificate,
    load_artifact,
    verify_clique_cover,
    verify_representation,
    verify_theta_cover,
)
from .errors import InputError, ParseError, PreconditionError, ResourceError, ThetaLabError
from .exact import SolveLimits, cc_exact, independence_number, theta_exact, vartheta_exact
from .experiment import ExperimentSpec, run_experiment
from .hypergraph import balance_violations, dump_hypergraph, format_hypergraph, load_hypergraph, max_degree
from .randcover import (
    BalancedConfig,
    GeneralConfig,
    balanced_cover,
    balanced_trials,
    general_cover,
    general_trials,
)

EXIT_OK, EXIT_INVALID, EXIT_PRECONDITION, EXIT_PARSE, EXIT_RESOURCE = 0, 1, 2, 3, 4


def _emit(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_gen(args) -> int:
    family = args.family
    if family == "balanced-hard":
        n = args.n
        if args.round:
            n, _ = gens.round_parameters(n, args.d, args.k)
        inst = gens.gen_balanced_hard(n, args.d, args.k, args.seed)
        G, header = inst.hypergraph, inst.metadata
    elif family == "linear":
        inst = gens.gen_linear_kpartite(args.m or args.n // args.k, args.d, args.k, args.seed)
        G, header = inst.hypergraph, inst.metadata
    elif family == "blowup":
        if not args.source:
            raise InputError("blowup needs --from FILE with a 2-graph")
        F, _ = load_hypergraph(args.source)
        inst = gens.gen_blowup_even(F, args.ell)
        G, header = inst.hypergraph, inst.metadata
    elif family == "steiner":
        G = gens.gen_partial_steiner(args.n, args.k, args.seed)
        header = {"generator": "steiner", "n": args.n, "k": args.k, "seed": args.seed}
    else:
        G = gens.gen_random_bounded(args.n, args.d, args.k, args.seed)
        header = {"generator": "random", "n": args.n, "d": args.d, "k": args.k, "seed": args.seed}
    if args.out:
        dump_hypergraph(G, args.out, header)
    else:
        sys.stdout.write(format_hypergraph(G, header))
    print(f"fingerprint {G.fingerprint} k={G.k} n={G.n} m={len(G)}", file=sys.stderr)
    return EXIT_OK


def _smallest_balanced_d(G) -> int:
    d = max(2, max_degree(G, 1))
    while balance_violations(G, d):
        d += 1
    return d


def cmd_cover(args) -> int:
    G, _ = load_hypergraph(args.instance)
    mode = "fixed-t" if args.fixed_t else "adaptive"
    if args.alg == "balanced":
        d = args.d if args.d is not None else _smallest_balanced_d(G)
        cert = balanced_cover(G, BalancedConfig(d=d, seed=args.seed, t_cap=args.t_cap, mode=mode,
                                                workers=args.workers))
        bound = balanced_trials(max(G.n, 2), d, G.k)
    else:
        d = args.d if args.d is not None else max(3, max_degree(G, 1))
        cert = general_cover(G, GeneralConfig(d=d, seed=args.seed, t_cap=args.t_cap, mode=mode,
                                              workers=args.workers))
        bound = general_trials(max(G.n, 2), d, G.k)
    if args.out:
        _emit(args.out, format_certificate(cert))
    print("n,d,k,alg,seed,t_achieved,bound,complete")
    print(f"{G.n},{d},{G.k},{args.alg},{args.seed},{cert.t_achieved},{bound},{str(cert.complete).lower()}")
    return EXIT_OK


def cmd_verify(args) -> int:
    G, _ = load_hypergraph(args.instance)
    failures = 0
    if args.d_balanced is not None:
        bad = balance_violations(G, args.d_balanced)
        print(f"{args.d_balanced}-balanced: {'yes' if not bad else 'no ' + str(bad)}")
        failures += bool(bad)
    if args.max_degree is not None:
        delta = max_degree(G, 1)
        print(f"max degree Δ={delta} <= {args.max_degree}: {'yes' if delta <= args.max_degree else 'no'}")
        failures += delta > args.max_degree
    if args.pair_degree:
        delta2 = max_degree(G, 2) if G.k >= 2 else 0
        print(f"pair degree Δ_2={delta2} <= 1: {'yes' if delta2 <= 1 else 'no'}")
        failures += delta2 > 1
    if args.artifact:
        artifact = load_artifact(args.artifact)
        if isinstance(artifact, SetRepresentation):
            verdict, what = verify_representation(G, artifact), "representation"
        elif isinstance(artifact, CliqueCover):
            verdict, what = verify_clique_cover(G, artifact), "clique cover"
        else:
            verdict, what = verify_theta_cover(G, artifact), "certificate"
            for msg in lint_certificate(artifact):
                print(f"lint: {msg}", file=sys.stderr)
        if verdict:
            print(f"{what} valid")
        else:
            print(f"{what} invalid: {verdict.reason}")
            failures += 1
    return EXIT_INVALID if failures else EXIT_OK


def cmd_exact(args) -> int:
    G, _ = load_hypergraph(args.instance)
    limits = SolveLimits(max_vertices=args.max_vertices, time_budget=args.time_budget)
    theta = theta_exact(G, limits)
    vt = vartheta_exact(G, limits)
    alpha = independence_number(G, limits)
    dual = cc_exact(G.complement(), limits).size
    print(f"Theta={theta}")
    print(f"vartheta={vt.size}{'' if vt.optimal else ' (optimality unproven)'}")
    print(f"alpha={alpha}")
    print(f"Theta(complement)={dual} {'==' if dual == vt.size else '!='} vartheta")
    return EXIT_OK if dual == vt.size else EXIT_INVALID


def cmd_experiment(args) -> int:
    with open(args.spec) as fh:
        spec = ExperimentSpec.from_json(fh.read(), os.path.dirname(os.path.abspath(args.spec)))
    if args.output:
        spec.output = args.output
    path = run_experiment(spec, paranoid=args.paranoid)
    print(path)
    return EXIT_OK


def cmd_bounds(args) -> int:
    report = compute_bounds(args.n, args.d, args.k, args.alpha, args.t)
    for key, value in report.as_dict().items():
        if value is not None:
            print(f"{key}={value!r}" if isinstance(value, float) else f"{key}={value}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="theta-lab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("family", choices=["balanced-hard", "linear", "blowup", "steiner", "random"])
    g.add_argument("--n", type=int, default=0)
    g.add_argument("--m", type=int, default=None, help="part size (linear family)")
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--ell", type=int, default=2)
    g.add_argument("--from", dest="source", default=None)
    g.add_argument("--round", action="store_true", help="round n with round_parameters")
    g.add_argument("--out", "-o", default=None)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("cover", help="run a randomized covering algorithm")
    c.add_argument("instance")
    c.add_argument("--alg", choices=["balanced", "general"], default="balanced")
    c.add_argument("--d", type=int, default=None)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--adaptive", action="store_true", help="draw trials until covered (default)")
    c.add_argument("--fixed-t", action="store_true", help="run exactly the bound's trial count")
    c.add_argument("--t-cap", type=int, default=None)
    c.add_argument("--workers", type=int, default=None)
    c.add_argument("--out", "-o", default=None)
    c.set_defaults(func=cmd_cover)

    v = sub.add_parser("verify", help="check a certificate/representation/clique cover or audit an instance")
    v.add_argument("instance")
    v.add_argument("artifact", nargs="?")
    v.add_argument("--d-balanced", type=int, default=None)
    v.add_argument("--max-degree", type=int, default=None)
    v.add_argument("--pair-degree", action="store_true", help="require every pair in at most one edge")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("exact", help="exact Theta, vartheta and alpha on a small instance")
    e.add_argument("instance")
    e.add_argument("--max-vertices", type=int, default=16)
    e.add_argument("--time-budget", type=float, default=60.0)
    e.set_defaults(func=cmd_exact)

    x = sub.add_parser("experiment", help="run a JSON experiment file")
    x.add_argument("spec")
    x.add_argument("--output", default=None)
    x.add_argument("--paranoid", action="store_true", help="re-verify every completed certificate")
    x.set_defaults(func=cmd_experiment)

    b = sub.add_parser("bounds", help="evaluate the bound formulas")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--alpha", type=int, default=None)
    b.add_argument("--t", type=int, default=None)
    b.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (PreconditionError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ThetaLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
