"""Run every config in configs/ through the full pipeline and tabulate the outcome."""
import argparse
import glob
import os
import time

from qclip.runner import RunConfig, run_verification

HERE = os.path.dirname(os.path.abspath(__file__))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--configs", default=os.path.join(HERE, "..", "configs"))
    args = ap.parse_args()
    os.makedirs(os.path.join(HERE, "..", "out"), exist_ok=True)
    print(f"{'config':22s} {'exit':>4s} {'stage':16s} {'emp grad':>9s} {'C_global':>10s} {'time':>6s}")
    for path in sorted(glob.glob(os.path.join(args.configs, "*.json"))):
        t0 = time.perf_counter()
        res = run_verification(RunConfig.load(path))
        rep = res.report
        emp = rep.get("empirical_max_grad", float("nan"))
        C = rep.get("C_global", float("nan"))
        name = os.path.splitext(os.path.basename(path))[0]
        print(f"{name:22s} {res.exit_code:4d} {res.stage:16s} {emp:9.4f} {C:10.4g} {time.perf_counter() - t0:6.2f}")


if __name__ == "__main__":
    main()
