"""Command-line front end.

Subcommands:

  run <config>                 full experiment from a TOML config
  check-inequalities           randomized scalar-inequality suite
  calibrate-constant           measure the Riesz-convolution constant
  compare-oracle <config>      series vs exponential-RK integrator gap
  growth <config>              growth-order fits of the complex extension

Exit code is 0 iff every enabled check passed.  The environment variable
NSSERIES_THREADS overrides the FFT worker thread count (default 1).
"""

from __future__ import annotations

import argparse
import json
import sys

from .convolve import calibrate_riesz_constant
from .experiment import load_config, run_experiment, emit_report
from .scalar_bounds import run_inequality_checks


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    report = run_experiment(cfg)
    paths = emit_report(report)
    print(f"rho = {report.rho:.6g}  chosen_K = {report.chosen_K}  "
          f"passed = {report.passed}")
    for p in paths:
        print(f"wrote {p}")
    return 0 if report.passed else 1


def _cmd_check_inequalities(args) -> int:
    results = run_inequality_checks(seed=args.seed, cases=args.cases)
    for name, worst in results.items():
        if name == "passed":
            continue
        status = "ok" if worst <= 1e-12 else "FAIL"
        print(f"{name:32s} worst violation {worst: .3e}  {status}")
    print(f"passed = {results['passed']}")
    return 0 if results["passed"] else 1


def _cmd_calibrate(args) -> int:
    c_hat = calibrate_riesz_constant(corpus_size=args.corpus_size,
                                     seed=args.seed)
    print(f"C_hat = {c_hat:.6g}  (corpus_size={args.corpus_size}, "
          f"seed={args.seed})")
    return 0


def _cmd_compare_oracle(args) -> int:
    cfg = load_config(args.config)
    cfg.checks.oracle = True
    cfg.checks.envelopes = False
    cfg.checks.complex_ext = False
    report = run_experiment(cfg)
    if report.oracle:
        print(json.dumps({"sup_gap": report.oracle["sup_gap"],
                          "u0_l2": report.oracle["u0_l2"],
                          "pass": report.oracle_pass}, indent=2))
    for err in report.errors:
        print(f"error: {err}", file=sys.stderr)
    return 0 if report.oracle_pass else 1


def _cmd_growth(args) -> int:
    cfg = load_config(args.config)
    cfg.checks.complex_ext = True
    cfg.checks.oracle = False
    cfg.checks.envelopes = False
    report = run_experiment(cfg)
    paths = emit_report(report)
    for fit in report.growth:
        if fit.get("degenerate"):
            print("degenerate fit (zero field)")
        else:
            print(f"t={fit['t']:.3g} order={fit['order']:.4f} "
                  f"residual={fit['residual']:.2e}")
    for p in paths:
        print(f"wrote {p}")
    for err in report.errors:
        print(f"error: {err}", file=sys.stderr)
    return 0 if report.growth_pass else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nsseries", description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a full experiment")
    p_run.add_argument("config")
    p_run.set_defaults(func=_cmd_run)

    p_ineq = sub.add_parser("check-inequalities",
                            help="randomized scalar inequality suite")
    p_ineq.add_argument("--seed", type=int, default=0)
    p_ineq.add_argument("--cases", type=int, default=10_000)
    p_ineq.set_defaults(func=_cmd_check_inequalities)

    p_cal = sub.add_parser("calibrate-constant",
                           help="measure the Riesz-convolution constant")
    p_cal.add_argument("--corpus-size", type=int, default=64)
    p_cal.add_argument("--seed", type=int, default=0)
    p_cal.set_defaults(func=_cmd_calibrate)

    p_cmp = sub.add_parser("compare-oracle",
                           help="series vs integrator cross-check")
    p_cmp.add_argument("config")
    p_cmp.set_defaults(func=_cmd_compare_oracle)

    p_gr = sub.add_parser("growth", help="growth-order fits")
    p_gr.add_argument("config")
    p_gr.set_defaults(func=_cmd_growth)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
