"""Command-line driver: ``polyvi <command> [problem.json] [flags]``.

Exit codes: 0 ok, 1 input error, 2 inconclusive result.
Every output embeds the seed and a hash of the resolved solver config, and
identical invocations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import __version__
from .analysis import copositivity_check, existence_certificate, is_r0_pair
from .io import ProblemFileError, dumps, load_problem
from .kkt import LICQError, SolveConfig, solve
from .polyhedra import CapExceeded, EmptySetError, PolyhedralSet
from .polymap import DimensionError
from .stability import PremiseError, genericity_experiment, grid_product, hoelder_fit, solution_map_sweep

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2

_INPUT_ERRORS = (ProblemFileError, LICQError, CapExceeded, EmptySetError, PremiseError, DimensionError)


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _overrides(args) -> dict:
    out = {}
    if args.seed is not None:
        out["seed"] = args.seed
    if args.threads is not None:
        out["threads"] = args.threads
    if args.tol is not None:
        out["verify_tol"] = args.tol
    return out


def _envelope(cfg: SolveConfig, command, result) -> dict:
    return {
        "command": command,
        "version": __version__,
        "seed": cfg.seed,
        "config_hash": cfg.digest(),
        "config": cfg.to_json(),
        "result": result,
    }


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# commands


def cmd_solve(args):
    pf = load_problem(args.problem, _overrides(args))
    S = solve(pf.problem, pf.config)
    _emit(dumps(_envelope(pf.config, "solve", S.to_json())), args.out)
    return EXIT_INCONCLUSIVE if S.status == "inconclusive" else EXIT_OK


def cmd_r0(args):
    pf = load_problem(args.problem, _overrides(args))
    v = is_r0_pair(pf.K, pf.P, pf.config)
    _emit(dumps(_envelope(pf.config, "r0", v.to_json())), args.out)
    return EXIT_INCONCLUSIVE if v.status == "inconclusive" else EXIT_OK


def cmd_copositive(args):
    pf = load_problem(args.problem, _overrides(args))
    v = copositivity_check(pf.P, pf.K, budget=args.budget, seed=pf.config.seed)
    _emit(dumps(_envelope(pf.config, "copositive", v.to_json())), args.out)
    return EXIT_INCONCLUSIVE if v.status == "inconclusive" else EXIT_OK


def cmd_certify(args):
    pf = load_problem(args.problem, _overrides(args))
    cert = existence_certificate(pf.problem, pf.config, budget=args.budget)
    _emit(dumps(_envelope(pf.config, "certify", cert.to_json())), args.out)
    undecided = cert.p_in_int_sc_dual is None or cert.copositivity.status == "inconclusive"
    if cert.conclusion == "no_certificate" and undecided:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_sweep(args):
    pf = load_problem(args.problem, _overrides(args))
    grid = grid_product(args.grid, pf.P.n)
    res = solution_map_sweep(pf.K, pf.P, grid, pf.config)
    if args.out is not None and args.out.endswith(".json"):
        text = dumps(_envelope(pf.config, "sweep", res.to_json()))
    else:
        text = f"# seed={res.seed} config_hash={res.config_hash}\n" + res.to_csv()
    _emit(text, args.out)
    if any(c.status in ("inconclusive", "error") for c in res.cells):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_hoelder(args):
    pf = load_problem(args.problem, _overrides(args))
    anchor = pf.p if args.anchor is None else np.asarray(args.anchor, dtype=float)
    if anchor.shape != (pf.P.n,):
        raise ProblemFileError(f"--anchor needs {pf.P.n} values")
    fit = hoelder_fit(pf.K, pf.P, anchor, radii=args.radii, samples_per_radius=args.samples, cfg=pf.config)
    _emit(dumps(_envelope(pf.config, "hoelder", fit.to_json())), args.out)
    return EXIT_OK


_GENERIC_SETS = {
    "orthant": PolyhedralSet.orthant,
    "whole": PolyhedralSet.whole_space,
    "box": lambda n: PolyhedralSet.box(np.zeros(n), np.ones(n)),
}


def cmd_generic(args):
    cfg = SolveConfig(**_overrides(args))
    K = _GENERIC_SETS[args.K](args.n)
    stats = genericity_experiment(args.n, args.d, K, args.trials, seed=cfg.seed, mode=args.mode, cfg=cfg)
    _emit(dumps(_envelope(cfg, "generic", stats.to_json())), args.out)
    return EXIT_INCONCLUSIVE if stats.inconclusive else EXIT_OK


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed (default: config or 0)")
    common.add_argument("--threads", type=int, default=None, help="worker threads for face solves")
    common.add_argument("--tol", type=float, default=None, help="verification tolerance")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="polyvi", description="Polynomial variational inequalities over polyhedra.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_problem(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("problem", help='problem JSON file, or "-" for stdin')
        sp.set_defaults(func=func)
        return sp

    with_problem("solve", cmd_solve, "compute the solution set of VI(K, P + p)")
    with_problem("r0", cmd_r0, "decide whether (K, P) is an R0-pair")
    sp = with_problem("copositive", cmd_copositive, "test copositivity of P on K")
    sp.add_argument("--budget", type=int, default=32, help="starts per face")
    sp = with_problem("certify", cmd_certify, "existence certificate for VI(K, P + p)")
    sp.add_argument("--budget", type=int, default=32, help="copositivity starts per face")
    sp = with_problem("sweep", cmd_sweep, "solve on a grid of p values (CSV, or JSON if --out ends in .json)")
    sp.add_argument("--grid", type=_floats, default=[-1.0, 0.0, 1.0],
                    help="values per coordinate, e.g. --grid=-1,0,1")
    sp = with_problem("hoelder", cmd_hoelder, "fit a local upper-Hoelder exponent")
    sp.add_argument("--anchor", type=_floats, default=None, help="anchor p (default: p from the file)")
    sp.add_argument("--radii", type=_floats, default=[1e-1, 1e-2, 1e-3, 1e-4])
    sp.add_argument("--samples", type=int, default=16, help="directions per radius")

    sp = sub.add_parser("generic", parents=[common], help="Monte-Carlo genericity experiment")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--K", choices=sorted(_GENERIC_SETS), default="orthant")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--mode", choices=["finite_valued", "r0"], default="finite_valued")
    sp.set_defaults(func=cmd_generic)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (*_INPUT_ERRORS, ValueError) as exc:
        print(f"polyvi {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
