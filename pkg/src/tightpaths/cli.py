"""Command line entry point: ``python3 -m tightpaths <command>``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import harness
from .closer import check_certificate


def _cmd_run(args) -> int:
    cfg = harness.load_config(args.config)
    cfg = harness.with_overrides(cfg, base_seed=args.seed, trials=args.trials, cert_dir=args.cert_dir)
    out = args.out or cfg.out or "results.csv"
    rows, aggs = harness.run_experiment(cfg, jobs=args.jobs, out=out)
    for a in aggs:
        print(f"{a['cell']}: trials={a['trials']} certified={a['certified_rate']:.2f} "
              f"closed={a['closed_rate']:.2f} mean L_C/n={a['mean_LC_over_n']:.4f} "
              f"(curve {a['l1_over_n']:.4f})")
    print(f"wrote {out}")
    return 0


def _cmd_trial(args) -> int:
    cell = harness.Cell(args.n, args.k, args.j, args.c)
    chain = tuple(float(x) for x in args.c_chain.split(",")) if args.c_chain else ()
    cfg = harness.ExperimentConfig(cells=[cell], delta=args.delta, eps=args.eps, omega=args.omega, c_chain=chain,
                                   p0_fraction=args.p0_fraction, stub_edges=args.stub_edges, budget=args.budget,
                                   close_weak_families=args.close_weak, force_close=args.force_close,
                                   cert_dir=args.cert)
    res = harness.run_trial(cell, args.seed, cfg)
    for name in harness.RESULT_FIELDS:
        print(f"{name:>18} = {getattr(res, name)}")
    return 0 if res.closed else 1


def _cmd_bruteforce(args) -> int:
    from .exact import BudgetExceeded, SmallInstance, brute_longest_cycle, brute_longest_path
    inst = SmallInstance.from_file(args.edges, n=args.n, j=args.j, cap=args.cap, budget=args.budget)
    try:
        print(f"longest path: {brute_longest_path(inst)}")
        cyc = brute_longest_cycle(inst)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"longest cycle: {cyc if cyc is not None else 'none'}")
    return 0


def _cmd_check(args) -> int:
    bad = 0
    for path in args.certificates:
        try:
            verdict = check_certificate(path)
        except (ValueError, KeyError) as exc:
            print(f"{path}: FAIL: unreadable certificate ({exc})")
            bad += 1
            continue
        print(f"{path}: {verdict}")
        bad += not verdict.ok
    return 1 if bad else 0


def _cmd_plot(args) -> int:
    harness.plot_curve(args.results, args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tightpaths", description="Long tight paths and cycles in random hypergraphs")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an INI-configured experiment grid")
    p.add_argument("config")
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, help="override base_seed")
    p.add_argument("--trials", type=int)
    p.add_argument("--cert-dir")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("trial", help="run one seeded trial and print its record")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=0.3)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--omega", type=float)
    p.add_argument("--c-chain", help="comma-separated c_1..c_{j-1}")
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--p0-fraction", type=float)
    p.add_argument("--stub-edges", type=int)
    p.add_argument("--close-weak", action="store_true", help="also close families that miss the pair bound")
    p.add_argument("--force-close", action="store_true", help="debug: second-round probability 1")
    p.add_argument("--cert", metavar="DIR", help="write a certificate into DIR on success")
    p.set_defaults(func=_cmd_trial)

    p = sub.add_parser("bruteforce", help="exact longest path and cycle of a small edge list")
    p.add_argument("edges")
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--cap", type=int, default=12)
    p.add_argument("--budget", type=int, default=5_000_000)
    p.set_defaults(func=_cmd_bruteforce)

    p = sub.add_parser("check", help="re-verify cycle certificates")
    p.add_argument("certificates", nargs="+")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("plot", help="plot mean L_C/n against the curve")
    p.add_argument("results")
    p.add_argument("--out", default="curve.svg")
    p.set_defaults(func=_cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)
