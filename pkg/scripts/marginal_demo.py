"""Q-function x-marginal versus the Born density for a few states.

The Q marginal is the Born density blurred by a Gaussian of variance hbar/2,
so its second moment exceeds the Born one by exactly that amount.
"""

import argparse

import numpy as np

from phasequant import coherent_state, fock_state, vacuum
from phasequant.phasespace import born_density_x, marginal_second_moments, q_marginal_x


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--hbar", type=float, default=1.0)
    args = ap.parse_args()
    h = args.hbar

    states = {
        "vacuum": vacuum(hbar=h),
        "fock 1": fock_state(1, hbar=h),
        "fock 3": fock_state(3, hbar=h),
        "coherent 1.2": coherent_state(1.2, hbar=h),
    }
    xs = np.linspace(-6, 6, 1201) * np.sqrt(h)
    print(f"hbar = {h}")
    print(f"{'state':<14}{'<x^2>_Q':>12}{'<x^2>_Born':>12}{'diff':>10}{'sup gap':>10}")
    for name, psi in states.items():
        q2, b2 = marginal_second_moments(psi)
        gap = np.max(np.abs(q_marginal_x(psi, xs) - born_density_x(psi, xs)))
        print(f"{name:<14}{q2:12.6f}{b2:12.6f}{q2 - b2:10.6f}{gap:10.4f}")


if __name__ == "__main__":
    main()
