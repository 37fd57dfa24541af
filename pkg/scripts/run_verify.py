"""Run every verification suite and print a one-line summary per check."""

import argparse
import sys

from phasequant.verify import SUITES, VerifyConfig, run_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--hbar", type=float, default=1.0)
    args = ap.parse_args()

    ok = True
    for suite in SUITES:
        report = run_suite(suite, args.seed, VerifyConfig(hbar=args.hbar))
        for c in report.checks:
            mark = "ok  " if c.passed else "FAIL"
            print(f"{mark} {c.identity:<36} dev={c.max_deviation:.2e} tol={c.tolerance:.0e} {c.wall_time:6.2f}s")
        ok &= report.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
