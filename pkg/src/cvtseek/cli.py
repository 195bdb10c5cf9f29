"""Command-line entry point.

Exit codes: 0 ok, 2 usage error, 3 Lloyd did not converge, 4 estimator
degeneracy during a run, 5 an experiment check failed.
"""
import argparse
from dataclasses import replace
import json
import os
import sys

import numpy as np

from . import harness
from .cvt import LloydConfig, compute_cvt
from .errors import CvtSeekError
from .formation import (KINDS, build_cvt_formation, formation_json, formation_moments,
                        make_formation, min_pairwise_distance)
from .harness import Scenario

EXPERIMENTS = ("fig3", "fig4", "fig5-uniform", "fig5-faulty", "table1")

EXIT_USAGE, EXIT_NOT_CONVERGED, EXIT_DEGENERATE, EXIT_CHECK_FAILED = 2, 3, 4, 5


class UsageError(Exception):
    pass


def _write(path, text):
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _load_scenario(ref):
    if ref is None:
        raise UsageError("--scenario is required")
    if os.path.exists(ref):
        with open(ref) as fh:
            return Scenario.from_json(fh.read())
    if ref.endswith(".json"):
        raise UsageError(f"scenario file not found: {ref}")
    try:
        return harness.get_scenario(ref)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None


def cmd_cvt(args):
    if args.n is None or args.n < 4:
        raise UsageError("cvt needs --n >= 4")
    cfg = LloydConfig(max_iters=args.max_iters or 500)
    res = compute_cvt(args.n, args.seed, cfg)
    dmin = min_pairwise_distance(build_cvt_formation(res.generators, np.zeros(3), 1.0))
    if args.out:
        _write(args.out, res.to_json() + "\n")
    print(f"N={res.n} converged={str(res.converged).lower()} iterations={res.iterations} "
          f"displacement={res.displacement:.3e} energy={res.energy:.6f} d_min={dmin:.4f}")
    return 0 if res.converged else EXIT_NOT_CONVERGED


def _formation_from_args(args):
    if args.n is None:
        raise UsageError("--n is required")
    try:
        return make_formation(args.kind, args.n, args.d, args.center, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_formation(args):
    f = _formation_from_args(args)
    text = formation_json(f) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_diagnose(args):
    f = _formation_from_args(args)
    try:
        mom = formation_moments(f)
    except CvtSeekError as exc:
        print(f"degenerate formation: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    report = {"kind": f.kind, "N": f.n, "D": f.radius,
              "d_min": min_pairwise_distance(f), **mom.to_dict()}
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        _write(args.out, text)
    sys.stdout.write(text)
    return 0


def cmd_run(args):
    s = _load_scenario(args.scenario)
    cfg = s.cfg
    if args.max_iters is not None:
        cfg = replace(cfg, max_iters=args.max_iters)
    if args.true_center_value:
        cfg = replace(cfg, true_center_value=True)
    s = replace(s, cfg=cfg, base_seed=s.base_seed if args.seed is None else args.seed)
    tr = harness.run_scenario(s)
    text = tr.to_csv()
    if args.out:
        _write(args.out, text)
    err = tr.est_error_norm
    print(f"scenario={s.name} iterations={tr.n_records - 1} "
          f"final_dist={tr.dist_to_source[-1]:.6f} mean_est_error={err.mean():.6e}")
    if tr.error:
        print(f"run aborted: {tr.error}", file=sys.stderr)
        return EXIT_DEGENERATE
    return 0


def _report(checks):
    ok = True
    for name, passed, detail in checks:
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
        ok &= bool(passed)
    return 0 if ok else EXIT_CHECK_FAILED


def cmd_experiment(args):
    name = args.name
    out = args.out or "."
    if name == "table1":
        rows = harness.dmin_table()
        _write(os.path.join(out, "table1.csv"), harness.dmin_table_csv(rows))
        for r in rows:
            print(f"N={r['N']:>3} sym_dmin={r['sym_dmin']:.4f} "
                  f"(built formation {r['sym_dmin_built']:.4f}) cvt_dmin={r['cvt_dmin']:.4f}")
        return _report(harness.check_table1(rows))
    if name == "fig3":
        s = _seeded(harness.get_scenario("fig3"), args)
        cmp = harness.estimator_comparison(s)
        _write(os.path.join(out, "fig3.csv"), cmp.to_csv())
        return _report(harness.check_fig3(cmp))
    if name == "fig4":
        s = _seeded(harness.get_scenario("fig4"), args)
        traces = harness.radius_sweep(s)
        _write(os.path.join(out, "fig4.csv"), harness.radius_sweep_csv(traces))
        return _report(harness.check_fig4(traces))
    if name in ("fig5-uniform", "fig5-faulty"):
        stats = {}
        for kind in ("cvt", "symmetric"):
            s = _seeded(harness.get_scenario(f"{name}-{kind}"), args)
            if args.trials is not None:
                s = replace(s, trials=args.trials)
            stats[kind] = harness.monte_carlo(s, workers=args.jobs)
            _write(os.path.join(out, f"{name}-{kind}.csv"), stats[kind].to_csv())
            print(f"{kind}: final mean={stats[kind].final_mean:.4f} "
                  f"std={stats[kind].final_std:.4f} aborted={len(stats[kind].aborted)}")
        check = harness.check_fig5_uniform if name == "fig5-uniform" else harness.check_fig5_faulty
        return _report(check(stats["cvt"], stats["symmetric"]))
    raise UsageError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")


def _seeded(s, args):
    if args.max_iters is not None:
        s = replace(s, cfg=replace(s.cfg, max_iters=args.max_iters))
    if args.true_center_value:
        s = replace(s, cfg=replace(s.cfg, true_center_value=True))
    return s if args.seed is None else replace(s, base_seed=args.seed)


def build_parser():
    p = argparse.ArgumentParser(prog="cvtseek", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def shape_args(sp):
        sp.add_argument("--kind", choices=KINDS, default="cvt")
        sp.add_argument("--n", type=int)
        sp.add_argument("--d", type=float, default=1.0)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--center", type=float, nargs=3, default=(0.0, 0.0, 0.0))
        sp.add_argument("--out")

    sp = sub.add_parser("cvt", help="compute a constrained CVT on the unit sphere")
    sp.add_argument("--n", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-iters", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_cvt)

    sp = sub.add_parser("formation", help="write robot positions as JSON")
    shape_args(sp)
    sp.set_defaults(func=cmd_formation)

    sp = sub.add_parser("diagnose", help="print formation moments and d_min")
    shape_args(sp)
    sp.set_defaults(func=cmd_diagnose)

    sp = sub.add_parser("run", help="run one source-seeking scenario")
    sp.add_argument("--scenario", help="builtin name or JSON path")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--max-iters", type=int)
    sp.add_argument("--true-center-value", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("experiment", help="reproduce a table or figure")
    sp.add_argument("name", help=", ".join(EXPERIMENTS))
    sp.add_argument("--seed", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--max-iters", type=int)
    sp.add_argument("--true-center-value", action="store_true")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_experiment)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
