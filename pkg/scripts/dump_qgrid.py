"""Write Q, W and the smoothed W of a state on an (x, p) grid to CSV."""

import argparse
from pathlib import Path

import numpy as np

from phasequant import parse_state
from phasequant.phasespace import qgrid_rows, rows_to_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--state", default="fock:1")
    ap.add_argument("--hbar", type=float, default=1.0)
    ap.add_argument("--points", type=int, default=31)
    ap.add_argument("--out", type=Path, default=Path("qgrid.csv"))
    args = ap.parse_args()

    psi = parse_state(args.state, args.hbar)
    axis = np.linspace(-4, 4, args.points) * np.sqrt(args.hbar)
    rows = qgrid_rows(psi, axis, axis)
    args.out.write_text(rows_to_csv(rows, ["x", "p", "Q", "W", "smoothedW"]))

    err = max(abs(r["Q"] - r["smoothedW"]) for r in rows)
    wmin = min(r["W"] for r in rows)
    print(f"{len(rows)} rows -> {args.out}")
    print(f"max |Q - smoothed W| = {err:.2e}, min W = {wmin:.4f}")


if __name__ == "__main__":
    main()
