"""Command line front end.

    tdrk-lab check [--method NAME | --file TABLEAU]
    tdrk-lab stability --method NAME [--eps E] [--samples N] [--seed S]
                       [--mode shared|per-stage] [--grid SPEC] [--out DIR]
    tdrk-lab solve --method NAME --problem P --nx N --dt DT --tf T
                   [--high FMT] [--low FMT] [--impl 1|2] [--out FILE]
    tdrk-lab converge [--config FILE] [overrides...]
    tdrk-lab epsilon --problem P --nx N --low FMT [--impl 1|2]

Exit status is 0 on success, 1 for usage or value errors, 2 when a file
cannot be read or written.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

from .catalog import get_method, list_methods
from .harness import (ExperimentConfig, characterize_epsilon, emit_outputs,
                      estimate_order, run_convergence)
from .integrator import StepConfig, integrate
from .precision import Format
from .problems import make_problem
from .spectral import Build
from .stability import (DEFAULT_SEED, RegionGrid, emit_region_svg,
                        scan_region)
from .tableau import (check_order_conditions, check_perturbation_order,
                      parse_tableau)

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fmt(name: str) -> Format:
    return Format.parse(name)


def _split(text: str, conv):
    return tuple(conv(tok) for tok in text.split(",") if tok)


def _parse_grid(spec: str) -> RegionGrid:
    toks = spec.split(",")
    if len(toks) != 6:
        raise _UsageError(
            "--grid wants re_min,re_max,im_min,im_max,n_re,n_im")
    return RegionGrid(float(toks[0]), float(toks[1]), float(toks[2]),
                      float(toks[3]), int(toks[4]), int(toks[5]))


def _cmd_check(args) -> int:
    if args.file is None and args.method is None:
        for name in list_methods():
            card = get_method(name)
            t = card.tableau
            print(f"{card.name}: stages={t.stages} order={card.claimed_p} "
                  f"noise_order={card.claimed_m} [{card.source}]")
        return 0
    if args.file is not None:
        tab = parse_tableau(Path(args.file).read_text())
        name = Path(args.file).name
    else:
        card = get_method(args.method)
        tab, name = card.tableau, card.name
    print(f"{name}: {tab.stages} stages")
    print(check_order_conditions(tab))
    print(f"noise order m = {check_perturbation_order(tab)}")
    return 0


def _cmd_stability(args) -> int:
    card = get_method(args.method)
    grid = _parse_grid(args.grid) if args.grid else RegionGrid()
    scan = scan_region(card.tableau, grid=grid, epsilon=args.eps,
                       n_samples=args.samples, seed=args.seed,
                       delta_mode=args.mode, label=card.name)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = emit_region_svg(scan, out / f"{card.name}_eps{args.eps:g}.svg")
    total = grid.n_re * grid.n_im
    print(f"{card.name} eps={args.eps:g}: {scan.stable_cells}/{total} "
          f"cells stable")
    print(f"wrote {path} and {path.with_suffix('.csv')}")
    return 0


def _cmd_solve(args) -> int:
    card = get_method(args.method)
    high = _fmt(args.high)
    low = _fmt(args.low) if args.low else high
    problem = make_problem(args.problem, args.nx, high, low,
                           Build(args.impl))
    cfg = StepConfig(card, problem, args.dt, args.tf)
    traj = integrate(cfg)
    u = traj.final_state.to_float64()
    x = problem.grid()
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "u"])
        for xi, ui in zip(x, u):
            writer.writerow([f"{xi:.12g}", f"{ui:.17g}"])
    if traj.diverged:
        print(f"diverged after {traj.steps_taken} steps; "
              f"last finite state in {args.out}")
        return 0
    print(f"{card.name} on {args.problem}: {traj.steps_taken} steps, "
          f"state in {args.out}")
    exact = problem.exact_solution(args.tf)
    if exact is not None:
        err = float(abs(u - exact.to_float64()).max())
        print(f"max error vs exact solution: {err:.6e}")
    return 0


def _cmd_converge(args) -> int:
    if args.config:
        config = ExperimentConfig.from_json(args.config)
    else:
        config = ExperimentConfig()
    over = {}
    if args.problem:
        over["problem"] = args.problem
    if args.methods:
        over["methods"] = _split(args.methods, str)
    if args.nx:
        over["nx"] = _split(args.nx, int)
    if args.dts:
        over["dts"] = _split(args.dts, float)
    if args.pairs:
        over["pairs"] = tuple(tuple(p.split("/")) for p in args.pairs.split(","))
    if args.tf is not None:
        over["t_final"] = args.tf
    if args.impl is not None:
        over["impl"] = args.impl
    if args.ref_dt is not None:
        over["ref_dt"] = args.ref_dt
    if args.out:
        over["out_dir"] = args.out
    if over:
        config = replace(config, **over)
    records = run_convergence(config)
    paths = emit_outputs(records, config.out_dir)
    for name in config.methods:
        mrecs = [r for r in records if r.method.lower() == name.lower()]
        for nx in config.nx:
            for pair in sorted({(r.high, r.low) for r in mrecs}):
                sel = [r for r in mrecs
                       if r.nx == nx and (r.high, r.low) == pair]
                p = estimate_order([r.dt for r in sel],
                                   [r.error_max for r in sel])
                tag = "n/a" if p is None else f"{p:.2f}"
                print(f"{sel[0].method} nx={nx} {sel[0].pair_label}: "
                      f"observed order {tag}")
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_epsilon(args) -> int:
    low = _fmt(args.low)
    val = characterize_epsilon(args.problem, args.nx, low, Build(args.impl))
    print(f"eps_eff({args.problem}, nx={args.nx}, low={low.value}, "
          f"impl={args.impl}) = {val:.6e}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="tdrk-lab",
                     description="two-derivative Runge-Kutta laboratory")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("check", help="verify order conditions of a tableau")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--method", help="catalog method name")
    g.add_argument("--file", help="tableau text file")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("stability", help="scan a linear stability region")
    p.add_argument("--method", required=True)
    p.add_argument("--eps", type=float, default=0.0,
                   help="second-derivative noise level")
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--mode", choices=("shared", "per-stage"),
                   default="shared")
    p.add_argument("--grid", help="re_min,re_max,im_min,im_max,n_re,n_im")
    p.add_argument("--out", default=".")
    p.set_defaults(func=_cmd_stability)

    p = sub.add_parser("solve", help="integrate one problem once")
    p.add_argument("--method", required=True)
    p.add_argument("--problem", required=True)
    p.add_argument("--nx", type=int, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--tf", type=float, required=True)
    p.add_argument("--high", default="b64")
    p.add_argument("--low", default=None)
    p.add_argument("--impl", type=int, choices=(1, 2), default=1)
    p.add_argument("--out", default="state.csv")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("converge", help="run a convergence study")
    p.add_argument("--config", help="JSON experiment description")
    p.add_argument("--problem")
    p.add_argument("--methods", help="comma-separated catalog names")
    p.add_argument("--nx", help="comma-separated grid sizes")
    p.add_argument("--dts", help="comma-separated step sizes")
    p.add_argument("--pairs", help="high/low pairs, e.g. b64/b16,b64/b64")
    p.add_argument("--tf", type=float)
    p.add_argument("--impl", type=int, choices=(1, 2))
    p.add_argument("--ref-dt", type=float, dest="ref_dt")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("epsilon", help="measure effective noise of the "
                       "low-format second derivative")
    p.add_argument("--problem", default="advection")
    p.add_argument("--nx", type=int, default=50)
    p.add_argument("--low", required=True)
    p.add_argument("--impl", type=int, choices=(1, 2), default=1)
    p.set_defaults(func=_cmd_epsilon)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"tdrk-lab: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (_UsageError, ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"tdrk-lab: error: {msg}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"tdrk-lab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
