"""Command-line entry point: ``qclip <subcommand> ...``."""
import argparse
import json
import sys

import numpy as np

from .errors import ConfigError
from .report import CSV_COLUMNS, read_csv
from .runner import EXIT_CODES, EXIT_HELP, RunConfig, run_verification


def kernels_check(n_pairs=2000, seed=0):
    """Quick randomized check of the Green-function and Poisson-gradient bounds."""
    from .kernels import BoundaryTrace, DiskSpec, green_gradient, poisson_gradient_bound

    rng = np.random.default_rng(seed)
    worst = np.inf
    disks = [DiskSpec(), DiskSpec(0.3 - 0.2j, 0.5), DiskSpec(-1 + 2j, 2.5)]
    for disk in disks:
        r = disk.radius * np.sqrt(rng.uniform(0, 0.98, (2, n_pairs)))
        t = 2 * np.pi * rng.uniform(size=(2, n_pairs))
        zeta, omega = disk.center + r * np.exp(1j * t)
        g, dw, dwb = green_gradient(disk, zeta, omega)
        d = np.abs(zeta - omega)
        worst = min(worst, np.min(2 / d - np.abs(g)), np.min(2 / d**2 - np.abs(dw)), np.min(2 / d**2 - np.abs(dwb)))
    tr = BoundaryTrace.from_function(lambda e: e.real, n=4096)
    lhs, rhs = poisson_gradient_bound(tr, 0.0)
    ok = worst >= -1e-10 and abs(rhs - 4 / np.pi) <= 1e-6 and lhs <= rhs
    print(f"green bounds worst slack {worst:.3e}")
    print(f"poisson gradient Re(eta): lhs {lhs:.8f} rhs {rhs:.8f} (4/pi = {4 / np.pi:.8f})")
    return 0 if ok else 1


def _run(path, stages, json_out=None, csv_out=None):
    try:
        cfg = RunConfig.load(path)
        if json_out:
            cfg.output_json = json_out
        if csv_out:
            cfg.output_csv = csv_out
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CODES["config"]
    res = run_verification(cfg, stages)
    rep = res.report
    for name, st in rep.get("stages", {}).items():
        slack = st.get("min_slack")
        print(f"{name:12s} {'pass' if st['pass'] else 'FAIL'}" + (f"  min_slack={slack:.3e}" if isinstance(slack, float) else ""))
    for key in ("C_interior", "C_boundary", "C_global", "empirical_max_grad"):
        if key in rep:
            print(f"{key:20s} {rep[key]:.6g}")
    if "error" in rep:
        print(f"error: {rep['error']}", file=sys.stderr)
    print(f"stage={res.stage} exit={res.exit_code}")
    return res.exit_code


def report_summary(csv_path=None, json_path=None):
    """Summarise saved artifacts; exits with the recorded status."""
    code = 0
    if json_path:
        try:
            with open(json_path) as fh:
                rep = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            print(f"cannot read {json_path}: {e}", file=sys.stderr)
            return EXIT_CODES["config"]
        code = int(rep.get("exit_code", 0))
        print(f"stage={rep.get('stage')} exit={code} pass={rep.get('pass')}")
        for key in ("C_global", "empirical_max_grad"):
            if key in rep:
                print(f"{key:20s} {rep[key]}")
    if csv_path:
        try:
            rows = read_csv(csv_path)
        except OSError as e:
            print(f"cannot read {csv_path}: {e}", file=sys.stderr)
            return EXIT_CODES["config"]
        if rows and tuple(rows[0]) != CSV_COLUMNS:
            print(f"unexpected CSV columns {tuple(rows[0])}", file=sys.stderr)
            return EXIT_CODES["config"]
        if rows:
            worst = min(rows, key=lambda r: r["slack"])
            print(f"{len(rows)} rows, max grad {max(r['grad_fd'] for r in rows):.6g}, "
                  f"min slack {worst['slack']:.6g} at ({worst['z_re']:.4g}, {worst['z_im']:.4g})")
    return code


def build_parser():
    p = argparse.ArgumentParser(
        prog="qclip",
        description="Numerical audits of gradient bounds for quasiconformal solutions of elliptic systems.",
        epilog=EXIT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="cmd", required=True)
    k = sub.add_parser("kernels-check", help="randomized Green / Poisson kernel checks")
    k.add_argument("--pairs", type=int, default=2000)
    k.add_argument("--seed", type=int, default=0)
    for name, helptext in [("audit", "inequality audits only"),
                           ("bounds-interior", "interior estimates at configured base points"),
                           ("pipeline", "audits followed by the global Lipschitz pipeline")]:
        s = sub.add_parser(name, help=helptext, epilog=EXIT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
        s.add_argument("config")
        s.add_argument("--json", help="override the JSON report path")
        s.add_argument("--csv", help="override the CSV path")
    r = sub.add_parser("report", help="summarise saved JSON / CSV artifacts")
    r.add_argument("--csv")
    r.add_argument("--json")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.cmd == "kernels-check":
        return kernels_check(args.pairs, args.seed)
    if args.cmd == "report":
        if not (args.csv or args.json):
            print("report needs --csv and/or --json", file=sys.stderr)
            return EXIT_CODES["config"]
        return report_summary(args.csv, args.json)
    stages = {"audit": "audit", "bounds-interior": "interior", "pipeline": "pipeline"}[args.cmd]
    return _run(args.config, stages, args.json, args.csv)


if __name__ == "__main__":
    sys.exit(main())
